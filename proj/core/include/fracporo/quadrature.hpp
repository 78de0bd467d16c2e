#pragma once

#include <array>
#include <vector>

namespace fracporo {

/// Rule on the reference triangle in barycentric coordinates. Weights are
/// normalized to sum to one, so integrals are area * sum(w f).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on [0, 1]; weights sum to one.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

const TriangleRule& triangle_rule_degree2();
const TriangleRule& triangle_rule_degree5();
/// 5-point Gauss-Legendre, exact to degree 9.
const EdgeRule& edge_rule_gauss5();

}  // namespace fracporo
