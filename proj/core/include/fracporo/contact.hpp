#pragma once

#include <array>
#include <vector>

#include "fracporo/constitutive.hpp"
#include "fracporo/mesh.hpp"
#include "fracporo/types.hpp"

namespace fracporo {

/// Smooth norm sqrt(|v|^2 + eps^2) - eps.
double psi_eps(const Vec2& v, double eps);
/// v / sqrt(|v|^2 + eps^2).
Vec2 psi_eps_grad(const Vec2& v, double eps);

enum class FrictionState { kStick, kSlip };

struct StickSlipResult {
  FrictionState state = FrictionState::kStick;
  // Least-squares fit of slip_rate = -lambda sigma_T (slip points only).
  double lambda = 0.0;
  // |slip_rate + lambda sigma_T| / |slip_rate|.
  double residual = 0.0;
  // Slip with lambda >= 0 and residual within the angular tolerance.
  bool consistent = true;
};

/// Stick when the penetration is zero or |sigma_T| < threshold - tol.
StickSlipResult classify_stick_slip(double delta, const Vec2& sigma_T, double threshold,
                                    const Vec2& slip_rate, double tol, double angle_tol = 1e-6);

/// Per-quadrature-point quantities on the fracture faces.
struct ContactPoint {
  int edge = -1;
  Point2 position = Point2::Zero();
  double weight = 0.0;    // length * rule weight
  Vec2 jump = Vec2::Zero();        // [u] = u+ - u-
  Vec2 slip_rate = Vec2::Zero();   // tangential part of [x]
  double normal_measure = 0.0;     // s (-[u].n+)
  double delta = 0.0;              // (normal_measure - g0)+
  double normal_traction = 0.0;    // c_n delta^m_n
  Vec2 sigma_T = Vec2::Zero();     // -c_T delta^m_T psi'_eps(slip_rate)
  double threshold = 0.0;          // c_T delta^m_T
  StickSlipResult friction;
};

/// Fracture-face operators acting on free displacement coefficient vectors.
/// The normal measure uses s = params.normal_jump_sign.
class ContactOperator {
 public:
  ContactOperator(const MeshBundle& geometry, const DofMap& dofs, const MaterialParams& params);

  bool enabled() const { return params_.c_n > 0.0 || params_.c_T > 0.0; }
  int num_u() const { return num_u_; }
  int num_points() const { return static_cast<int>(points_.size()); }

  /// <P_n(u), v> = int c_n delta^m_n s(-[v].n+) ds, one entry per free dof.
  Vector normal_compliance_residual(const Vector& U) const;
  /// R(u) = c_n / (m_n + 1) int delta^(m_n + 1) ds.
  double contact_energy(const Vector& U) const;
  /// j(u, v) = int c_T delta^m_T |v_T| ds.
  double friction_functional(const Vector& U, const Vector& V) const;
  /// J_eps(u, v) = int c_T delta^m_T psi_eps(v_T) ds.
  double regularized_friction(const Vector& U, const Vector& V, double eps) const;
  /// z -> int c_T delta^m_T psi'_eps([x]_T) . [z]_T ds.
  Vector regularized_friction_residual(const Vector& U, const Vector& X, double eps) const;
  /// int c_T delta^m_T ds; bounds |J_eps - j| / eps.
  double friction_weight(const Vector& U) const;

  /// Default tolerance 1e-8 (c_T max delta^m_T + floor) when tol <= 0.
  std::vector<ContactPoint> evaluate(const Vector& U, const Vector& X, double eps,
                                     double tol = 0.0) const;

  /// Jump of a free displacement vector at quadrature point q.
  Vec2 jump_at(const Vector& V, int q) const;

 private:
  struct QuadPoint {
    int edge = -1;
    Point2 position = Point2::Zero();
    double weight = 0.0;
    Vec2 normal = Vec2::Zero();
    // Basis value and free dofs (x, y) of the plus/minus node at each edge end.
    std::array<double, 2> phi{};
    std::array<std::array<int, 2>, 2> plus{};
    std::array<std::array<int, 2>, 2> minus{};
  };

  double delta_at(const Vector& U, const QuadPoint& qp) const;
  Vec2 tangential(const Vec2& v, const Vec2& n) const { return v - v.dot(n) * n; }
  // Adds coeff * [basis] . direction into r for the dofs touched by qp.
  void scatter(Vector& r, const QuadPoint& qp, const Vec2& direction) const;

  MaterialParams params_;
  std::vector<QuadPoint> points_;
  int num_u_ = 0;
};

}  // namespace fracporo
