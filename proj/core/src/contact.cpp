#include "fracporo/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracporo/quadrature.hpp"

namespace fracporo {

double psi_eps(const Vec2& v, double eps) {
  // sqrt(|v|^2 + eps^2) - eps written to avoid cancellation for |v| << eps.
  const double n2 = v.squaredNorm();
  return n2 / (std::sqrt(n2 + eps * eps) + eps);
}

Vec2 psi_eps_grad(const Vec2& v, double eps) { return v / std::sqrt(v.squaredNorm() + eps * eps); }

StickSlipResult classify_stick_slip(double delta, const Vec2& sigma_T, double threshold,
                                    const Vec2& slip_rate, double tol, double angle_tol) {
  StickSlipResult r;
  if (delta <= 0.0 || sigma_T.norm() < threshold - tol) return r;
  r.state = FrictionState::kSlip;
  const double s2 = sigma_T.squaredNorm();
  const double v = slip_rate.norm();
  if (s2 > 0.0) r.lambda = -slip_rate.dot(sigma_T) / s2;
  r.residual = v > 0.0 ? (slip_rate + r.lambda * sigma_T).norm() / v : 0.0;
  r.consistent = r.lambda >= 0.0 && r.residual <= angle_tol;
  return r;
}

ContactOperator::ContactOperator(const MeshBundle& geometry, const DofMap& dofs,
                                 const MaterialParams& params)
    : params_(params), num_u_(dofs.num_u()) {
  const Mesh2D& mesh = geometry.mesh;
  const FractureMesh& frac = geometry.fracture;
  const EdgeRule& rule = edge_rule_gauss5();
  for (int e_id = 0; e_id < static_cast<int>(frac.edges.size()); ++e_id) {
    const FractureEdge& e = frac.edges[e_id];
    const std::array<const FracturePair*, 2> ends{&mesh.fracture_pairs[e.a],
                                                  &mesh.fracture_pairs[e.b]};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      QuadPoint qp;
      qp.edge = e_id;
      const double xi = rule.points[q];
      qp.phi = {1.0 - xi, xi};
      qp.position = qp.phi[0] * ends[0]->position + qp.phi[1] * ends[1]->position;
      qp.weight = e.length * rule.weights[q];
      qp.normal = e.normal;
      for (int c = 0; c < 2; ++c) {
        for (int k = 0; k < 2; ++k) {
          // Tips are single nodes, so their jump is zero and they carry no dofs here.
          const bool tip = ends[c]->is_tip();
          qp.plus[c][k] = tip ? -1 : dofs.u_free(ends[c]->plus, k);
          qp.minus[c][k] = tip ? -1 : dofs.u_free(ends[c]->minus, k);
        }
      }
      points_.push_back(qp);
    }
  }
}

Vec2 ContactOperator::jump_at(const Vector& V, int q) const {
  const QuadPoint& qp = points_[q];
  Vec2 j = Vec2::Zero();
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < 2; ++k) {
      if (qp.plus[c][k] >= 0) j[k] += qp.phi[c] * V[qp.plus[c][k]];
      if (qp.minus[c][k] >= 0) j[k] -= qp.phi[c] * V[qp.minus[c][k]];
    }
  }
  return j;
}

double ContactOperator::delta_at(const Vector& U, const QuadPoint& qp) const {
  const int q = static_cast<int>(&qp - points_.data());
  const double measure = params_.normal_jump_sign * -jump_at(U, q).dot(qp.normal);
  return penetration_depth(measure, params_.g0);
}

void ContactOperator::scatter(Vector& r, const QuadPoint& qp, const Vec2& direction) const {
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < 2; ++k) {
      const double v = qp.phi[c] * direction[k];
      if (qp.plus[c][k] >= 0) r[qp.plus[c][k]] += v;
      if (qp.minus[c][k] >= 0) r[qp.minus[c][k]] -= v;
    }
  }
}

Vector ContactOperator::normal_compliance_residual(const Vector& U) const {
  Vector r = Vector::Zero(num_u_);
  if (params_.c_n <= 0.0) return r;
  for (const auto& qp : points_) {
    const double d = delta_at(U, qp);
    if (d <= 0.0) continue;
    const double traction = params_.c_n * positive_power(d, params_.m_n);
    // d/d[v] of s(-[v].n+) is -s n+.
    scatter(r, qp, qp.weight * traction * -params_.normal_jump_sign * qp.normal);
  }
  return r;
}

double ContactOperator::contact_energy(const Vector& U) const {
  if (params_.c_n <= 0.0) return 0.0;
  double energy = 0.0;
  for (const auto& qp : points_) {
    energy += qp.weight * positive_power(delta_at(U, qp), params_.m_n + 1.0);
  }
  return params_.c_n / (params_.m_n + 1.0) * energy;
}

double ContactOperator::friction_functional(const Vector& U, const Vector& V) const {
  if (params_.c_T <= 0.0) return 0.0;
  double j = 0.0;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const QuadPoint& qp = points_[q];
    const double w = positive_power(delta_at(U, qp), params_.m_T);
    if (w > 0.0) j += qp.weight * w * tangential(jump_at(V, static_cast<int>(q)), qp.normal).norm();
  }
  return params_.c_T * j;
}

double ContactOperator::regularized_friction(const Vector& U, const Vector& V, double eps) const {
  if (params_.c_T <= 0.0) return 0.0;
  double j = 0.0;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const QuadPoint& qp = points_[q];
    const double w = positive_power(delta_at(U, qp), params_.m_T);
    if (w > 0.0) {
      j += qp.weight * w * psi_eps(tangential(jump_at(V, static_cast<int>(q)), qp.normal), eps);
    }
  }
  return params_.c_T * j;
}

Vector ContactOperator::regularized_friction_residual(const Vector& U, const Vector& X,
                                                      double eps) const {
  Vector r = Vector::Zero(num_u_);
  if (params_.c_T <= 0.0) return r;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const QuadPoint& qp = points_[q];
    const double w = positive_power(delta_at(U, qp), params_.m_T);
    if (w <= 0.0) continue;
    const Vec2 g = psi_eps_grad(tangential(jump_at(X, static_cast<int>(q)), qp.normal), eps);
    scatter(r, qp, qp.weight * params_.c_T * w * g);
  }
  return r;
}

double ContactOperator::friction_weight(const Vector& U) const {
  if (params_.c_T <= 0.0) return 0.0;
  double total = 0.0;
  for (const auto& qp : points_) total += qp.weight * positive_power(delta_at(U, qp), params_.m_T);
  return params_.c_T * total;
}

std::vector<ContactPoint> ContactOperator::evaluate(const Vector& U, const Vector& X, double eps,
                                                    double tol) const {
  std::vector<ContactPoint> out(points_.size());
  double max_threshold = 0.0;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const QuadPoint& qp = points_[q];
    ContactPoint& cp = out[q];
    cp.edge = qp.edge;
    cp.position = qp.position;
    cp.weight = qp.weight;
    cp.jump = jump_at(U, static_cast<int>(q));
    cp.slip_rate = tangential(jump_at(X, static_cast<int>(q)), qp.normal);
    cp.normal_measure = params_.normal_jump_sign * -cp.jump.dot(qp.normal);
    cp.delta = penetration_depth(cp.normal_measure, params_.g0);
    cp.normal_traction = params_.c_n * positive_power(cp.delta, params_.m_n);
    cp.threshold = params_.c_T * positive_power(cp.delta, params_.m_T);
    cp.sigma_T = -cp.threshold * psi_eps_grad(cp.slip_rate, eps);
    max_threshold = std::max(max_threshold, cp.threshold);
  }
  if (tol <= 0.0) tol = 1e-8 * (max_threshold + std::numeric_limits<double>::min());
  for (auto& cp : out) {
    cp.friction = classify_stick_slip(cp.delta, cp.sigma_T, cp.threshold, cp.slip_rate, tol);
  }
  return out;
}

}  // namespace fracporo
