#pragma once

#include <functional>

#include "fracporo/mesh.hpp"
#include "fracporo/types.hpp"

namespace fracporo {

/// Physical coefficients of the bulk, the fracture and its faces. SI units.
struct MaterialParams {
  double G = 1.0;        // shear modulus
  double lambda = 1.0;   // Lame lambda
  double alpha = 1.0;    // Biot coefficient
  double inv_M = 1.0;    // 1/M, Biot compressibility
  double c_f = 0.0;      // fluid compressibility
  double phi0 = 0.2;     // reference porosity
  double mu_f = 1.0;     // fluid viscosity
  Mat2 K = Mat2::Identity();  // permeability tensor
  double rho_fr = 1000.0;     // reference fluid density
  double g = 9.81;            // gravitational constant
  Vec2 grad_eta = Vec2::UnitY();  // gradient of the vertical distance eta
  double c_fc = 1.0;     // fracture storage coefficient
  double gamma = 0.0;    // viscous damping
  double c_n = 0.0;      // normal stiffness coefficient
  double m_n = 1.0;      // normal exponent
  double c_T = 0.0;      // friction coefficient
  double m_T = 1.0;      // friction exponent
  double g0 = 0.0;       // undeformed fracture width
  // Orientation of the normal-jump measure entering the contact laws:
  // +1 uses -[u].n+ as written in the compliance law, -1 uses [u].n+
  // (activation under interpenetration).
  double normal_jump_sign = 1.0;

  /// Bulk storage coefficient 1/M + c_f phi0.
  double storage() const { return inv_M + c_f * phi0; }
  /// Throws ValidationError naming the first violated invariant.
  void validate(bool friction_enabled) const;
};

/// Given fracture width used in the cubic-law permeability.
class WidthProfile {
 public:
  enum class Kind { kTipPower, kUniform };

  WidthProfile() = default;
  /// w(s,t) = w0 (1 + rate t) (d1 d2 / L^2)^(1/2 + tip_exponent), with d1, d2
  /// the arc distances to the two tips.
  static WidthProfile tip_power(double w0, double tip_exponent, double length,
                                double growth_rate = 0.0);
  /// Constant width along the whole fracture (tips included).
  static WidthProfile uniform(double w0, double growth_rate = 0.0);

  double operator()(double s, double t) const;
  /// d w / d s at fixed t.
  double derivative(double s, double t) const;

  Kind kind() const { return kind_; }
  double w0() const { return w0_; }
  double tip_exponent() const { return tip_exponent_; }
  bool time_dependent() const { return growth_rate_ != 0.0; }

 private:
  Kind kind_ = Kind::kTipPower;
  double w0_ = 0.0;
  double tip_exponent_ = 0.05;
  double length_ = 1.0;
  double growth_rate_ = 0.0;
};

/// Right-hand sides and initial data. Empty evaluators mean zero.
struct SourceData {
  std::function<Vec2(const Point2&, double, Subdomain)> body_force;
  std::function<double(const Point2&, double)> bulk_source;
  std::function<double(double s, double t)> fracture_injection;
  std::function<double(const Point2&)> initial_pressure;
  std::function<Vec2(const Point2&)> initial_velocity;
};

// --- pointwise laws -------------------------------------------------------

/// 2G sym(grad_u) + lambda tr(grad_u) I + gamma sym(grad_ut) + gamma tr(grad_ut) I.
Mat2 effective_stress(const Mat2& grad_u, const Mat2& grad_ut, const MaterialParams& params);

/// sigma_eff - alpha p I.
Mat2 poroelastic_stress(const Mat2& sigma_eff, double p, const MaterialParams& params);

/// -(1/mu_f) K (grad_p - rho_fr g grad_eta).
Vec2 darcy_flux(const Vec2& grad_p, const MaterialParams& params);

/// Tangential cubic-law flow rate -(w^3 / 12 mu_f)(dp_c/ds - rho_fr g deta/ds).
double fracture_flux(double grad_pc, double s, double t, const WidthProfile& width,
                     const MaterialParams& params, double deta_ds = 0.0);

/// w = -(u+ - u-) . n+.
double width_from_jump(const Vec2& u_plus, const Vec2& u_minus, const Vec2& n_plus);

struct CoulombEquivalent {
  double alpha_c = 0.0;
  double C = 0.0;
};

/// Friction law mu = C |sigma_n|^alpha_c equivalent to the power laws when
/// the fracture carries no fluid pressure.
CoulombEquivalent coulomb_equivalent(const MaterialParams& params);

/// max(jump_normal - g0, 0).
double penetration_depth(double jump_normal, double g0);

/// x^m for x > 0, and 0 otherwise.
double positive_power(double x, double m);

}  // namespace fracporo
