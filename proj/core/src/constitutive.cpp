#include "fracporo/constitutive.hpp"

#include <cmath>

#include <Eigen/LU>
#include <sstream>

namespace fracporo {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void MaterialParams::validate(bool friction_enabled) const {
  const auto finite = [](double v) { return std::isfinite(v); };
  require(finite(G) && G > 0.0, "G must be > 0");
  require(finite(lambda) && lambda >= 0.0, "lambda must be >= 0");
  require(finite(alpha) && alpha > 0.0, "alpha must be > 0");
  require(finite(inv_M) && inv_M >= 0.0, "inv_M must be >= 0");
  require(finite(c_f) && c_f >= 0.0, "c_f must be >= 0");
  require(finite(phi0) && phi0 > 0.0 && phi0 < 1.0, "phi0 must lie in (0, 1)");
  require(finite(mu_f) && mu_f > 0.0, "mu_f must be > 0");
  require(K.allFinite() && K(0, 1) == K(1, 0), "K must be symmetric");
  require(K(0, 0) > 0.0 && K.determinant() > 0.0, "K must be positive definite");
  require(finite(rho_fr) && finite(g) && grad_eta.allFinite(), "gravity data must be finite");
  require(finite(c_fc) && c_fc > 0.0, "c_fc must be > 0 (fracture storage positivity)");
  require(finite(gamma) && gamma >= 0.0, "gamma must be >= 0");
  require(!friction_enabled || gamma > 0.0,
          "viscous regularization required with friction (gamma > 0 in mode Q)");
  require(finite(c_n) && c_n >= 0.0, "c_n must be >= 0");
  require(finite(c_T) && c_T >= 0.0, "c_T must be >= 0");
  require(finite(m_n) && m_n >= 1.0, "m_n must be >= 1");
  require(finite(m_T) && m_T >= 1.0, "m_T must be >= 1");
  require(finite(g0) && g0 >= 0.0, "g0 must be >= 0");
  require(normal_jump_sign == 1.0 || normal_jump_sign == -1.0,
          "normal_jump_sign must be +1 or -1");
}

WidthProfile WidthProfile::tip_power(double w0, double tip_exponent, double length,
                                     double growth_rate) {
  if (!(w0 >= 0.0)) throw ValidationError("width w0 must be >= 0");
  if (!(tip_exponent > 0.0)) throw ValidationError("width tip exponent must be > 0");
  if (!(length > 0.0)) throw ValidationError("fracture length must be > 0");
  WidthProfile w;
  w.kind_ = Kind::kTipPower;
  w.w0_ = w0;
  w.tip_exponent_ = tip_exponent;
  w.length_ = length;
  w.growth_rate_ = growth_rate;
  return w;
}

WidthProfile WidthProfile::uniform(double w0, double growth_rate) {
  if (!(w0 >= 0.0)) throw ValidationError("width w0 must be >= 0");
  WidthProfile w;
  w.kind_ = Kind::kUniform;
  w.w0_ = w0;
  w.growth_rate_ = growth_rate;
  return w;
}

double WidthProfile::operator()(double s, double t) const {
  const double amplitude = w0_ * std::max(0.0, 1.0 + growth_rate_ * t);
  if (kind_ == Kind::kUniform) return amplitude;
  const double d1 = std::max(0.0, s);
  const double d2 = std::max(0.0, length_ - s);
  return amplitude * positive_power(d1 * d2 / (length_ * length_), 0.5 + tip_exponent_);
}

double WidthProfile::derivative(double s, double t) const {
  if (kind_ == Kind::kUniform) return 0.0;
  const double amplitude = w0_ * std::max(0.0, 1.0 + growth_rate_ * t);
  const double d1 = s;
  const double d2 = length_ - s;
  const double x = d1 * d2 / (length_ * length_);
  if (!(x > 0.0)) return 0.0;
  const double beta = 0.5 + tip_exponent_;
  return amplitude * beta * std::pow(x, beta - 1.0) * (d2 - d1) / (length_ * length_);
}

Mat2 effective_stress(const Mat2& grad_u, const Mat2& grad_ut, const MaterialParams& params) {
  const Mat2 eps = 0.5 * (grad_u + grad_u.transpose());
  const Mat2 eps_t = 0.5 * (grad_ut + grad_ut.transpose());
  return 2.0 * params.G * eps + params.lambda * grad_u.trace() * Mat2::Identity() +
         params.gamma * eps_t + params.gamma * grad_ut.trace() * Mat2::Identity();
}

Mat2 poroelastic_stress(const Mat2& sigma_eff, double p, const MaterialParams& params) {
  return sigma_eff - params.alpha * p * Mat2::Identity();
}

Vec2 darcy_flux(const Vec2& grad_p, const MaterialParams& params) {
  return -(1.0 / params.mu_f) * params.K * (grad_p - params.rho_fr * params.g * params.grad_eta);
}

double fracture_flux(double grad_pc, double s, double t, const WidthProfile& width,
                     const MaterialParams& params, double deta_ds) {
  const double w = width(s, t);
  return -(w * w * w / (12.0 * params.mu_f)) * (grad_pc - params.rho_fr * params.g * deta_ds);
}

double width_from_jump(const Vec2& u_plus, const Vec2& u_minus, const Vec2& n_plus) {
  return -(u_plus - u_minus).dot(n_plus);
}

CoulombEquivalent coulomb_equivalent(const MaterialParams& params) {
  if (!(params.c_n > 0.0)) throw ValidationError("coulomb_equivalent requires c_n > 0");
  if (!(params.m_n >= 1.0)) throw ValidationError("coulomb_equivalent requires m_n >= 1");
  const double ratio = params.m_T / params.m_n;
  return {ratio - 1.0, params.c_T / std::pow(params.c_n, ratio)};
}

double penetration_depth(double jump_normal, double g0) { return std::max(jump_normal - g0, 0.0); }

double positive_power(double x, double m) { return x > 0.0 ? std::exp(m * std::log(x)) : 0.0; }

}  // namespace fracporo
