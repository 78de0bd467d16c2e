#include "fracporo/cases.hpp"

#include <cmath>
#include <numbers>

#include "fracporo/solver.hpp"

namespace fracporo {

namespace {

constexpr double kPi = std::numbers::pi;

// a(x, y) = sin(pi x) sin^2(2 pi y) and its derivatives.
struct Profile {
  double a, ax, ay, axx, axy, ayy;
};

Profile profile(const Point2& x) {
  const double sx = std::sin(kPi * x.x());
  const double cx = std::cos(kPi * x.x());
  const double s2 = std::sin(2.0 * kPi * x.y());
  const double S = s2 * s2;
  const double dS = 2.0 * kPi * std::sin(4.0 * kPi * x.y());
  const double ddS = 8.0 * kPi * kPi * std::cos(4.0 * kPi * x.y());
  return {sx * S, kPi * cx * S, sx * dS, -kPi * kPi * sx * S, kPi * cx * dS, sx * ddS};
}

double time_factor(double t) { return 1.0 + t; }

}  // namespace

SourceData make_sources(const LoadSpec& spec) {
  const auto ramp = [r = spec.ramp_time](double t) {
    return r > 0.0 ? std::min(std::max(t, 0.0) / r, 1.0) : 1.0;
  };
  SourceData data;
  data.body_force = [spec, ramp](const Point2& x, double t, Subdomain side) {
    Vec2 f = ramp(t) * (side == Subdomain::kPlus ? spec.body_force_plus : spec.body_force_minus);
    if (spec.traveling_amplitude != 0.0) {
      const double xi = (x.x() - spec.traveling_x0 - spec.traveling_speed * t) / spec.traveling_width;
      f.y() -= spec.traveling_amplitude * std::exp(-xi * xi);
    }
    return f;
  };
  if (spec.bulk_source != 0.0) {
    data.bulk_source = [q = spec.bulk_source, ramp](const Point2&, double t) { return ramp(t) * q; };
  }
  if (spec.fracture_injection != 0.0) {
    data.fracture_injection = [q = spec.fracture_injection, ramp](double, double t) {
      return ramp(t) * q;
    };
  }
  if (spec.initial_pressure != 0.0) {
    data.initial_pressure = [p = spec.initial_pressure](const Point2&) { return p; };
  }
  if (spec.initial_velocity.squaredNorm() > 0.0) {
    data.initial_velocity = [v = spec.initial_velocity](const Point2&) { return v; };
  }
  return data;
}

ManufacturedSolution::ManufacturedSolution(const MaterialParams& params, const WidthProfile& width,
                                           double fracture_x0)
    : params_(params), width_(width), fracture_x0_(fracture_x0) {
  if (params_.alpha != 1.0) {
    throw ValidationError("manufactured case requires alpha = 1 (face tractions balance p_c)");
  }
}

MaterialParams ManufacturedSolution::default_params() {
  MaterialParams m;
  m.G = 1.0;
  m.lambda = 1.0;
  m.alpha = 1.0;
  m.inv_M = 1.0;
  m.c_f = 0.0;
  m.mu_f = 1.0;
  m.K = Mat2::Identity();
  m.g = 0.0;
  m.c_fc = 1.0;
  m.gamma = 0.0;
  return m;
}

void ManufacturedSolution::check_geometry(const RectDomain& domain,
                                          const std::vector<Point2>& fracture,
                                          const BoundaryConditions& bc) {
  if (domain.x0 != 0.0 || domain.y0 != 0.0 || domain.x1 != 1.0 || domain.y1 != 1.0) {
    throw ValidationError("manufactured case requires the unit square domain");
  }
  for (const auto& p : fracture) {
    if (p.y() != 0.5) throw ValidationError("manufactured case requires a fracture on y = 0.5");
  }
  for (int s = 0; s < 4; ++s) {
    if (!bc.clamp_displacement[s] || !bc.fix_pressure[s]) {
      throw ValidationError("manufactured case requires Dirichlet data on all sides");
    }
  }
}

double ManufacturedSolution::p(const Point2& x, double t) const {
  return time_factor(t) * std::sin(kPi * x.x()) * std::sin(kPi * x.y());
}

Vec2 ManufacturedSolution::grad_p(const Point2& x, double t) const {
  const double T = time_factor(t);
  return T * kPi *
         Vec2(std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
              std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
}

Vec2 ManufacturedSolution::u(const Point2& x, double t) const {
  const double v = time_factor(t) * profile(x).a;
  return {v, v};
}

Mat2 ManufacturedSolution::grad_u(const Point2& x, double t) const {
  const Profile a = profile(x);
  const double T = time_factor(t);
  Mat2 g;
  g << T * a.ax, T * a.ay, T * a.ax, T * a.ay;
  return g;
}

Vec2 ManufacturedSolution::body_force(const Point2& x, double t) const {
  const Profile a = profile(x);
  const double T = time_factor(t);
  const double lap = a.axx + a.ayy;
  const Vec2 grad_div(a.axx + a.axy, a.axy + a.ayy);
  const MaterialParams& m = params_;
  Vec2 f;
  for (int i = 0; i < 2; ++i) {
    // -div of the effective stress for u = T a (1, 1); the damping part acts on u_t = a (1, 1).
    f[i] = -T * (m.G * lap + (m.G + m.lambda) * grad_div[i]) -
           (0.5 * m.gamma * lap + 1.5 * m.gamma * grad_div[i]);
  }
  return f + m.alpha * grad_p(x, t);
}

double ManufacturedSolution::bulk_source(const Point2& x, double t) const {
  const Profile a = profile(x);
  const double T = time_factor(t);
  const double ph = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
  const double pxy = kPi * kPi * std::cos(kPi * x.x()) * std::cos(kPi * x.y());
  const double pxx = -kPi * kPi * ph;
  const double pyy = pxx;
  const Mat2& K = params_.K;
  const double div_flux = T * (K(0, 0) * pxx + 2.0 * K(0, 1) * pxy + K(1, 1) * pyy) / params_.mu_f;
  return params_.storage() * ph + params_.alpha * (a.ax + a.ay) - div_flux;
}

double ManufacturedSolution::fracture_injection(double s, double t) const {
  const double x = fracture_x0_ + s;
  const double T = time_factor(t);
  const double w = width_(s, t);
  const double dw = width_.derivative(s, t);
  const double coef = 1.0 / (12.0 * params_.mu_f);
  const double drive = T * kPi * std::cos(kPi * x) - params_.rho_fr * params_.g * params_.grad_eta.x();
  return params_.c_fc * std::sin(kPi * x) - coef * 3.0 * w * w * dw * drive +
         coef * w * w * w * T * kPi * kPi * std::sin(kPi * x);
}

SourceData ManufacturedSolution::sources() const {
  SourceData data;
  data.body_force = [this](const Point2& x, double t, Subdomain) { return body_force(x, t); };
  data.bulk_source = [this](const Point2& x, double t) { return bulk_source(x, t); };
  data.fracture_injection = [this](double s, double t) { return fracture_injection(s, t); };
  data.initial_pressure = [this](const Point2& x) { return p(x, 0.0); };
  // u_t = a (1, 1) for all t.
  data.initial_velocity = [this](const Point2& x) { return u(x, 0.0); };
  return data;
}

ExactFields ManufacturedSolution::exact() const {
  ExactFields e;
  e.p = [this](const Point2& x, double t) { return p(x, t); };
  e.grad_p = [this](const Point2& x, double t) { return grad_p(x, t); };
  e.u = [this](const Point2& x, double t) { return u(x, t); };
  e.grad_u = [this](const Point2& x, double t) { return grad_u(x, t); };
  return e;
}

ConvergenceTable run_manufactured_study(const ManufacturedStudy& study) {
  if (study.levels < 2) throw ValidationError("a convergence study needs at least two levels");
  const BoundaryConditions bc;
  ManufacturedSolution::check_geometry(study.domain, study.fracture, bc);
  StepConfig cfg;
  cfg.dt = study.dt;
  cfg.mode = Mode::kQ0;

  std::vector<double> hs;
  std::vector<FieldErrors> errors;
  MeshBundle geometry = build_rect_mesh_with_fracture(study.domain, study.fracture, study.h0);
  double h = study.h0;
  for (int level = 0; level < study.levels; ++level) {
    if (level > 0) {
      geometry = uniform_refine(geometry);
      h *= 0.5;
    }
    const WidthProfile width = WidthProfile::tip_power(
        study.width_w0, study.width_tip_exponent, geometry.fracture.length);
    // The solution object must outlive the integrator, whose sources capture it.
    const ManufacturedSolution solution(study.params, width, geometry.fracture.tips[0].x());
    DofMap dofs = DofMap::build(geometry.mesh, bc);
    TimeIntegrator integrator(geometry, dofs, study.params, width, solution.sources(), cfg);
    const RunResult run = integrator.run(integrator.initial_state(), study.steps);
    hs.push_back(h);
    errors.push_back(field_errors(integrator.geometry(), integrator.dofs(), run.final_state,
                                  solution.exact()));
  }
  return make_convergence_table(hs, errors);
}

}  // namespace fracporo
