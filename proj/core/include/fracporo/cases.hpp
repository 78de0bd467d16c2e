#pragma once

#include <vector>

#include "fracporo/constitutive.hpp"
#include "fracporo/diagnostics.hpp"
#include "fracporo/mesh.hpp"

namespace fracporo {

/// Constant and traveling loads used by the shipped configurations.
struct LoadSpec {
  Vec2 body_force_plus = Vec2::Zero();
  Vec2 body_force_minus = Vec2::Zero();
  // Constant loads are scaled by min(t / ramp_time, 1); 0 disables the ramp.
  double ramp_time = 0.0;
  // Vertical Gaussian pulse -A exp(-((x - x0 - c t) / width)^2) on both sides.
  double traveling_amplitude = 0.0;
  double traveling_speed = 0.0;
  double traveling_width = 0.1;
  double traveling_x0 = 0.0;
  double bulk_source = 0.0;
  double fracture_injection = 0.0;
  double initial_pressure = 0.0;
  Vec2 initial_velocity = Vec2::Zero();
};

SourceData make_sources(const LoadSpec& spec);

/// Smooth solution of the Q0 system on the unit square with the fracture on
/// y = 1/2:
///   p = T(t) sin(pi x) sin(pi y),  u = T(t) sin(pi x) sin^2(2 pi y) (1, 1),
/// T(t) = 1 + t. Both fields and grad u vanish appropriately on y = 1/2 so
/// the face tractions balance the fracture pressure when alpha = 1, the jump
/// is zero and no fluid leaks across the fracture.
class ManufacturedSolution {
 public:
  /// Throws ValidationError unless alpha = 1.
  ManufacturedSolution(const MaterialParams& params, const WidthProfile& width,
                       double fracture_x0);

  /// Unit square, fracture (0.25, 0.5)-(0.75, 0.5), nondimensional unit
  /// coefficients, gravity off.
  static MaterialParams default_params();
  static RectDomain domain() { return {0.0, 0.0, 1.0, 1.0}; }
  static std::vector<Point2> fracture() { return {{0.25, 0.5}, {0.75, 0.5}}; }
  /// Requires the domain, a horizontal fracture on y = 1/2 and homogeneous
  /// Dirichlet data on all sides for both fields.
  static void check_geometry(const RectDomain& domain, const std::vector<Point2>& fracture,
                             const BoundaryConditions& bc);

  double p(const Point2& x, double t) const;
  Vec2 grad_p(const Point2& x, double t) const;
  Vec2 u(const Point2& x, double t) const;
  Mat2 grad_u(const Point2& x, double t) const;

  Vec2 body_force(const Point2& x, double t) const;
  double bulk_source(const Point2& x, double t) const;
  double fracture_injection(double s, double t) const;

  SourceData sources() const;
  ExactFields exact() const;

 private:
  MaterialParams params_;
  WidthProfile width_;
  double fracture_x0_;
};

struct ManufacturedStudy {
  RectDomain domain = ManufacturedSolution::domain();
  std::vector<Point2> fracture = ManufacturedSolution::fracture();
  double h0 = 0.125;     // coarsest mesh size
  int levels = 3;        // h0, h0/2, ...
  double dt = 0.01;
  int steps = 10;
  MaterialParams params = ManufacturedSolution::default_params();
  double width_w0 = 0.05;
  double width_tip_exponent = 0.05;
};

/// Runs the Q0 solver on each level and tabulates final-time errors.
ConvergenceTable run_manufactured_study(const ManufacturedStudy& study);

}  // namespace fracporo
