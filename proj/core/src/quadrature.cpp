#include "fracporo/quadrature.hpp"

#include <cmath>

namespace fracporo {

const TriangleRule& triangle_rule_degree2() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 2;
    r.points = {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}},
                {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}},
                {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return r;
  }();
  return rule;
}

// Radon's 7-point rule.
const TriangleRule& triangle_rule_degree5() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    r.points.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}});
    r.weights.push_back(9.0 / 40.0);
    for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      r.points.push_back({{b, a, a}});
      r.points.push_back({{a, b, a}});
      r.points.push_back({{a, a, b}});
      r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
  }();
  return rule;
}

const EdgeRule& edge_rule_gauss5() {
  static const EdgeRule rule = [] {
    EdgeRule r;
    r.degree = 9;
    const double x1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double x2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double w0 = 128.0 / 225.0;
    const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    const double xs[5] = {-x2, -x1, 0.0, x1, x2};
    const double ws[5] = {w2, w1, w0, w1, w2};
    for (int i = 0; i < 5; ++i) {
      r.points.push_back(0.5 * (xs[i] + 1.0));
      r.weights.push_back(0.5 * ws[i]);
    }
    return r;
  }();
  return rule;
}

}  // namespace fracporo
