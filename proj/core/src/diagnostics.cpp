#include "fracporo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracporo/quadrature.hpp"

namespace fracporo {

namespace {

double quad(const SparseMatrix& a, const Vector& x) { return x.dot(a * x); }

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::kQ ? "Q" : "Q0"; }

Mode parse_mode(const std::string& text) {
  if (text == "Q0") return Mode::kQ0;
  if (text == "Q") return Mode::kQ;
  throw ValidationError("mode must be Q0 or Q, got '" + text + "'");
}

StoredEnergy stored_energy(const State& s, const SystemMatrices& m,
                           const ContactOperator* contact) {
  StoredEnergy e;
  e.kinetic = 0.5 * quad(m.C_u, s.X);
  e.strain_G = 0.5 * quad(m.E1, s.U);
  e.strain_lambda = 0.5 * quad(m.E2, s.U);
  e.storage_bulk = 0.5 * quad(m.C_p, s.P);
  e.storage_frac = 0.5 * quad(m.C_pc, s.P);
  if (contact != nullptr) e.contact_R = contact->contact_energy(s.U);
  return e;
}

StepBudget step_budget(const State& after, const SystemMatrices& m, const LoadVectors& loads,
                       const ContactOperator* contact, double eps) {
  StepBudget b;
  b.diss_darcy = quad(m.L, after.P);
  b.diss_frac = quad(m.W, after.P);
  b.diss_visc = quad(m.D, after.X);
  if (contact != nullptr) {
    b.diss_friction = contact->regularized_friction_residual(after.U, after.X, eps).dot(after.X);
  }
  b.work = after.X.dot(loads.F_u) + after.P.dot(loads.F_p + loads.F_pc);
  return b;
}

EnergyCheck check_energy_step(const StoredEnergy& before, const StoredEnergy& after,
                              const StepBudget& budget, double dt, double rel_tol) {
  EnergyCheck c;
  c.lhs = after.total() + dt * budget.dissipation();
  c.rhs = before.total() + dt * budget.work;
  c.scale = std::max({before.total(), after.total(), dt * std::abs(budget.work),
                      dt * std::abs(budget.dissipation()), std::numeric_limits<double>::min()});
  c.ok = c.lhs <= c.rhs + rel_tol * c.scale;
  return c;
}

bool EnergyReport::nonnegative() const {
  const StoredEnergy& s = stored;
  for (double v : {s.kinetic, s.strain_G, s.strain_lambda, s.storage_bulk, s.storage_frac,
                   s.contact_R, diss_darcy, diss_frac, diss_visc, diss_friction}) {
    if (!(v >= 0.0)) return false;
  }
  return true;
}

EnergyCheck EnergyTracker::advance(const StoredEnergy& after, const StepBudget& budget, double dt,
                                   int step, double t, double rel_tol) {
  EnergyCheck c = check_energy_step(report_.stored, after, budget, dt, rel_tol);
  c.step = step;
  c.t = t;
  report_.stored = after;
  report_.diss_darcy += dt * budget.diss_darcy;
  report_.diss_frac += dt * budget.diss_frac;
  report_.diss_visc += dt * budget.diss_visc;
  report_.diss_friction += dt * budget.diss_friction;
  report_.work += dt * budget.work;
  return c;
}

MassBalance mass_balance_residual(const State& before, const State& after,
                                  const SystemMatrices& m, const LoadVectors& loads,
                                  const Vector& leakage_dual, const MaterialParams& params) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw ValidationError("mass balance needs after.t > before.t");
  const Vector dp = (after.P - before.P) / dt;
  const Vector storage_b = m.C_p * dp;
  const Vector storage_f = m.C_pc * dp;
  const Vector dil = params.alpha * (m.A_up.transpose() * after.X);
  const Vector opening = m.M_upc * after.X;
  const Vector flow_b = m.L * after.P;
  const Vector flow_f = m.W * after.P;
  const Vector r_b = storage_b + dil + flow_b - loads.F_p - leakage_dual;
  const Vector r_f = storage_f + opening + flow_f - loads.F_pc + leakage_dual;
  MassBalance mb;
  mb.bulk = r_b.sum();
  mb.fracture = r_f.sum();
  mb.summed = (r_b + r_f).sum();
  mb.scale = std::max({storage_b.cwiseAbs().sum(), storage_f.cwiseAbs().sum(),
                       dil.cwiseAbs().sum(), opening.cwiseAbs().sum(), flow_b.cwiseAbs().sum(),
                       flow_f.cwiseAbs().sum(), loads.F_p.cwiseAbs().sum(),
                       loads.F_pc.cwiseAbs().sum(), std::numeric_limits<double>::min()});
  return mb;
}

double fluid_content(const State& s, const SystemMatrices& m, const MaterialParams& params) {
  const Vector stored = (m.C_p + m.C_pc) * s.P;
  const Vector deformation = pressure_coupling(m, params).transpose() * s.U;
  return stored.sum() + deformation.sum();
}

ContactObservables contact_observables(const State& s, Mode mode, const ContactOperator& contact,
                                       double eps) {
  if (mode != Mode::kQ) throw ValidationError("contact observables are defined in mode Q only");
  ContactObservables obs;
  const auto points = contact.evaluate(s.U, s.X, eps);
  obs.points = static_cast<int>(points.size());
  if (points.empty()) return obs;
  int stick = 0;
  for (const auto& cp : points) {
    obs.max_penetration = std::max(obs.max_penetration, cp.delta);
    obs.total_slip_rate += cp.weight * cp.slip_rate.norm();
    if (cp.friction.state == FrictionState::kStick) ++stick;
  }
  obs.stick_fraction = static_cast<double>(stick) / static_cast<double>(points.size());
  return obs;
}

FieldErrors field_errors(const MeshBundle& geometry, const DofMap& dofs, const State& s,
                         const ExactFields& exact) {
  const Mesh2D& mesh = geometry.mesh;
  const Vector u = dofs.expand_u(s.U);
  const Vector p = dofs.expand_p(s.P);
  const TriangleRule& rule = triangle_rule_degree5();
  double p_l2 = 0.0, p_h1 = 0.0, u_l2 = 0.0, u_h1 = 0.0;
  for (int t_id = 0; t_id < mesh.num_triangles(); ++t_id) {
    const auto& n = mesh.triangles[t_id].nodes;
    const double area = mesh.signed_area(t_id);
    std::array<Vec2, 3> grad;
    for (int a = 0; a < 3; ++a) {
      const Point2& p1 = mesh.nodes[n[(a + 1) % 3]];
      const Point2& p2 = mesh.nodes[n[(a + 2) % 3]];
      grad[a] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / (2.0 * area);
    }
    Vec2 gp = Vec2::Zero();
    Mat2 gu = Mat2::Zero();
    for (int a = 0; a < 3; ++a) {
      const double pa = p[mesh.pressure_node[n[a]]];
      const Vec2 ua(u[2 * n[a]], u[2 * n[a] + 1]);
      gp += pa * grad[a];
      gu += ua * grad[a].transpose();
    }
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      Point2 x = Point2::Zero();
      double ph = 0.0;
      Vec2 uh = Vec2::Zero();
      for (int a = 0; a < 3; ++a) {
        x += lam[a] * mesh.nodes[n[a]];
        ph += lam[a] * p[mesh.pressure_node[n[a]]];
        uh += lam[a] * Vec2(u[2 * n[a]], u[2 * n[a] + 1]);
      }
      const double jw = area * rule.weights[q];
      p_l2 += jw * std::pow(ph - exact.p(x, s.t), 2);
      p_h1 += jw * (gp - exact.grad_p(x, s.t)).squaredNorm();
      u_l2 += jw * (uh - exact.u(x, s.t)).squaredNorm();
      u_h1 += jw * (gu - exact.grad_u(x, s.t)).squaredNorm();
    }
  }
  return {std::sqrt(p_l2), std::sqrt(p_h1), std::sqrt(u_l2), std::sqrt(u_h1)};
}

ConvergenceTable make_convergence_table(const std::vector<double>& h,
                                        const std::vector<FieldErrors>& errors) {
  if (h.size() < 2 || h.size() != errors.size()) {
    throw ValidationError("convergence table needs at least two levels with one error set each");
  }
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (!(h[i] < h[i - 1])) throw ValidationError("mesh sizes must strictly decrease");
  }
  ConvergenceTable table{h, errors, {}};
  const auto order = [](double e0, double e1, double ratio) {
    if (e0 <= 0.0 || e1 <= 0.0) return 0.0;
    return std::log(e0 / e1) / std::log(ratio);
  };
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    const double r = h[i] / h[i + 1];
    const FieldErrors& a = errors[i];
    const FieldErrors& b = errors[i + 1];
    table.orders.push_back({order(a.p_l2, b.p_l2, r), order(a.p_h1, b.p_h1, r),
                            order(a.u_l2, b.u_l2, r), order(a.u_h1, b.u_h1, r)});
  }
  return table;
}

}  // namespace fracporo
