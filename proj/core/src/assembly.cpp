#include "fracporo/assembly.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "fracporo/quadrature.hpp"

namespace fracporo {

namespace {

struct P1Triangle {
  std::array<Point2, 3> x;
  std::array<Vec2, 3> grad;
  double area = 0.0;

  Point2 map(const std::array<double, 3>& lam) const {
    return lam[0] * x[0] + lam[1] * x[1] + lam[2] * x[2];
  }
};

P1Triangle p1_triangle(const Mesh2D& mesh, int t) {
  P1Triangle tri;
  const auto& n = mesh.triangles[t].nodes;
  for (int a = 0; a < 3; ++a) tri.x[a] = mesh.nodes[n[a]];
  tri.area = mesh.signed_area(t);
  if (!(tri.area > 0.0)) {
    std::ostringstream msg;
    msg << "triangle " << t << " is degenerate (area " << tri.area << ")";
    throw MeshError(msg.str());
  }
  const double inv2a = 1.0 / (2.0 * tri.area);
  for (int a = 0; a < 3; ++a) {
    const Point2& p1 = tri.x[(a + 1) % 3];
    const Point2& p2 = tri.x[(a + 2) % 3];
    tri.grad[a] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) * inv2a;
  }
  return tri;
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  SparseMatrix a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

void check_permeability(const MaterialParams& params) {
  const Mat2& K = params.K;
  if (K(0, 1) != K(1, 0) || !(K(0, 0) > 0.0) || !(K.determinant() > 0.0)) {
    throw ValidationError("K must be symmetric positive definite");
  }
}

}  // namespace

SparseMatrix assemble_fracture_permeability(const MeshBundle& geometry,
                                            const MaterialParams& params,
                                            const WidthProfile& width, double t) {
  const Mesh2D& mesh = geometry.mesh;
  const FractureMesh& frac = geometry.fracture;
  const EdgeRule& rule = edge_rule_gauss5();
  std::vector<Triplet> w;
  for (const auto& e : frac.edges) {
    double cube_integral = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double wq = width(frac.arc[e.a] + rule.points[q] * e.length, t);
      cube_integral += rule.weights[q] * wq * wq * wq;
    }
    cube_integral *= e.length;
    const double k = cube_integral / (12.0 * params.mu_f * e.length * e.length);
    const int pa = mesh.pressure_node[mesh.fracture_pairs[e.a].plus];
    const int pb = mesh.pressure_node[mesh.fracture_pairs[e.b].plus];
    w.emplace_back(pa, pa, k);
    w.emplace_back(pa, pb, -k);
    w.emplace_back(pb, pa, -k);
    w.emplace_back(pb, pb, k);
  }
  return from_triplets(mesh.num_pressure_nodes, mesh.num_pressure_nodes, w);
}

SystemMatrices assemble_system(const MeshBundle& geometry, const MaterialParams& params,
                               const WidthProfile& width, double t) {
  check_permeability(params);
  const Mesh2D& mesh = geometry.mesh;
  const FractureMesh& frac = geometry.fracture;
  const int nu = 2 * mesh.num_nodes();
  const int np = mesh.num_pressure_nodes;
  const TriangleRule& rule = triangle_rule_degree2();
  const double storage = params.storage();
  const Mat2 mobility = params.K / params.mu_f;

  std::vector<Triplet> cu, cp, aup, b, l, e1, e2, d;
  for (int t_id = 0; t_id < mesh.num_triangles(); ++t_id) {
    const P1Triangle tri = p1_triangle(mesh, t_id);
    const auto& n = mesh.triangles[t_id].nodes;
    std::array<int, 3> pn{};
    for (int a = 0; a < 3; ++a) pn[a] = mesh.pressure_node[n[a]];

    std::array<std::array<double, 3>, 3> mass{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      for (int a = 0; a < 3; ++a) {
        for (int c = 0; c < 3; ++c) mass[a][c] += tri.area * rule.weights[q] * lam[a] * lam[c];
      }
    }
    for (int a = 0; a < 3; ++a) {
      const Vec2& ga = tri.grad[a];
      for (int c = 0; c < 3; ++c) {
        const Vec2& gc = tri.grad[c];
        cp.emplace_back(pn[a], pn[c], storage * mass[a][c]);
        l.emplace_back(pn[a], pn[c], tri.area * (mobility * gc).dot(ga));
        for (int k = 0; k < 2; ++k) {
          const int row = 2 * n[a] + k;
          cu.emplace_back(row, 2 * n[c] + k, mass[a][c]);
          aup.emplace_back(row, pn[c], ga[k] * tri.area / 3.0);
          for (int m = 0; m < 2; ++m) {
            const int col = 2 * n[c] + m;
            // eps(phi_a e_k) : eps(phi_c e_m) = (delta_km ga.gc + ga_m gc_k) / 2
            const double epseps = 0.5 * ((k == m ? ga.dot(gc) : 0.0) + ga[m] * gc[k]);
            const double divdiv = ga[k] * gc[m];
            e1.emplace_back(row, col, 2.0 * params.G * tri.area * epseps);
            e2.emplace_back(row, col, params.lambda * tri.area * divdiv);
            b.emplace_back(row, col, params.alpha * tri.area * divdiv);
            d.emplace_back(row, col, params.gamma * tri.area * (epseps + divdiv));
          }
        }
      }
    }
  }

  std::vector<Triplet> cpc, mupc;
  const EdgeRule& erule = edge_rule_gauss5();
  for (const auto& e : frac.edges) {
    const std::array<const FracturePair*, 2> ends{&mesh.fracture_pairs[e.a],
                                                  &mesh.fracture_pairs[e.b]};
    std::array<std::array<double, 2>, 2> emass{};
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double xi = erule.points[q];
      const std::array<double, 2> phi{1.0 - xi, xi};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) emass[i][j] += e.length * erule.weights[q] * phi[i] * phi[j];
      }
    }
    for (int i = 0; i < 2; ++i) {
      const int pi = mesh.pressure_node[ends[i]->plus];
      for (int j = 0; j < 2; ++j) {
        const int pj = mesh.pressure_node[ends[j]->plus];
        cpc.emplace_back(pi, pj, params.c_fc * emass[i][j]);
        if (ends[j]->is_tip()) continue;  // zero jump at the tips
        for (int k = 0; k < 2; ++k) {
          mupc.emplace_back(pi, 2 * ends[j]->plus + k, -e.normal[k] * emass[i][j]);
          mupc.emplace_back(pi, 2 * ends[j]->minus + k, e.normal[k] * emass[i][j]);
        }
      }
    }
  }

  SystemMatrices m;
  m.C_u = from_triplets(nu, nu, cu);
  m.C_p = from_triplets(np, np, cp);
  m.C_pc = from_triplets(np, np, cpc);
  m.A_up = from_triplets(nu, np, aup);
  m.B = from_triplets(nu, nu, b);
  m.L = from_triplets(np, np, l);
  m.W = assemble_fracture_permeability(geometry, params, width, t);
  m.M_upc = from_triplets(np, nu, mupc);
  m.E1 = from_triplets(nu, nu, e1);
  m.E2 = from_triplets(nu, nu, e2);
  m.D = from_triplets(nu, nu, d);
  return m;
}

LoadVectors assemble_loads(const MeshBundle& geometry, const SourceData& data,
                           const MaterialParams& params, const WidthProfile& width, double t) {
  const Mesh2D& mesh = geometry.mesh;
  const FractureMesh& frac = geometry.fracture;
  LoadVectors loads;
  loads.F_u = Vector::Zero(2 * mesh.num_nodes());
  loads.F_p = Vector::Zero(mesh.num_pressure_nodes);
  loads.F_pc = Vector::Zero(mesh.num_pressure_nodes);

  const TriangleRule& rule = triangle_rule_degree5();
  const Vec2 gravity_flux = params.K * (params.rho_fr * params.g / params.mu_f) * params.grad_eta;
  for (int t_id = 0; t_id < mesh.num_triangles(); ++t_id) {
    const P1Triangle tri = p1_triangle(mesh, t_id);
    const auto& tr = mesh.triangles[t_id];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      const Point2 x = tri.map(lam);
      const double jw = tri.area * rule.weights[q];
      const Vec2 f = data.body_force ? data.body_force(x, t, tr.tag) : Vec2::Zero();
      const double src = data.bulk_source ? data.bulk_source(x, t) : 0.0;
      for (int a = 0; a < 3; ++a) {
        loads.F_u[2 * tr.nodes[a]] += jw * f.x() * lam[a];
        loads.F_u[2 * tr.nodes[a] + 1] += jw * f.y() * lam[a];
        loads.F_p[mesh.pressure_node[tr.nodes[a]]] += jw * src * lam[a];
      }
    }
    if (gravity_flux.squaredNorm() > 0.0) {
      for (int a = 0; a < 3; ++a) {
        loads.F_p[mesh.pressure_node[tr.nodes[a]]] += tri.area * gravity_flux.dot(tri.grad[a]);
      }
    }
  }

  const EdgeRule& erule = edge_rule_gauss5();
  const double rho_g = params.rho_fr * params.g;
  for (const auto& e : frac.edges) {
    const int pa = mesh.pressure_node[mesh.fracture_pairs[e.a].plus];
    const int pb = mesh.pressure_node[mesh.fracture_pairs[e.b].plus];
    const double deta_ds = params.grad_eta.dot(e.tangent);
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double xi = erule.points[q];
      const double s = frac.arc[e.a] + xi * e.length;
      const double jw = e.length * erule.weights[q];
      const double qw = data.fracture_injection ? data.fracture_injection(s, t) : 0.0;
      loads.F_pc[pa] += jw * qw * (1.0 - xi);
      loads.F_pc[pb] += jw * qw * xi;
      if (rho_g * deta_ds != 0.0) {
        const double w = width(s, t);
        const double flux = jw * w * w * w / (12.0 * params.mu_f) * rho_g * deta_ds / e.length;
        loads.F_pc[pa] -= flux;
        loads.F_pc[pb] += flux;
      }
    }
  }
  return loads;
}

SparseMatrix restrict_matrix(const SparseMatrix& a, const std::vector<int>& row_map, int rows,
                             const std::vector<int>& col_map, int cols) {
  std::vector<Triplet> kept;
  kept.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int r = 0; r < a.outerSize(); ++r) {
    const int fr = row_map[r];
    if (fr < 0) continue;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const int fc = col_map[it.col()];
      if (fc >= 0) kept.emplace_back(fr, fc, it.value());
    }
  }
  return from_triplets(rows, cols, kept);
}

SystemMatrices restrict_matrices(const SystemMatrices& full, const DofMap& dofs) {
  const auto& um = dofs.u_full_to_free();
  const auto& pm = dofs.p_full_to_free();
  const int nu = dofs.num_u();
  const int np = dofs.num_p();
  SystemMatrices r;
  r.C_u = restrict_matrix(full.C_u, um, nu, um, nu);
  r.C_p = restrict_matrix(full.C_p, pm, np, pm, np);
  r.C_pc = restrict_matrix(full.C_pc, pm, np, pm, np);
  r.A_up = restrict_matrix(full.A_up, um, nu, pm, np);
  r.B = restrict_matrix(full.B, um, nu, um, nu);
  r.L = restrict_matrix(full.L, pm, np, pm, np);
  r.W = restrict_matrix(full.W, pm, np, pm, np);
  r.M_upc = restrict_matrix(full.M_upc, pm, np, um, nu);
  r.E1 = restrict_matrix(full.E1, um, nu, um, nu);
  r.E2 = restrict_matrix(full.E2, um, nu, um, nu);
  r.D = restrict_matrix(full.D, um, nu, um, nu);
  return r;
}

LoadVectors restrict_loads(const LoadVectors& full, const DofMap& dofs) {
  return {dofs.restrict_u(full.F_u), dofs.restrict_p(full.F_p), dofs.restrict_p(full.F_pc)};
}

ReducedSystem apply_dirichlet(const SystemMatrices& full, const LoadVectors& loads,
                              const DofMap& dofs) {
  if (dofs.num_u() == dofs.num_u_full()) {
    throw ValidationError("no constrained displacement dofs: rigid-body modes would remain");
  }
  return {restrict_matrices(full, dofs), restrict_loads(loads, dofs)};
}

SparseMatrix pressure_coupling(const SystemMatrices& m, const MaterialParams& params) {
  SparseMatrix c = params.alpha * m.A_up;
  c += SparseMatrix(m.M_upc.transpose());
  c.makeCompressed();
  return c;
}

bool is_symmetric(const SparseMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const SparseMatrix diff = a - SparseMatrix(a.transpose());
  double amax = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  }
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > rel_tol * amax) return false;
    }
  }
  return true;
}

void write_coordinate_text(const SparseMatrix& a, std::ostream& out) {
  const auto old = out.precision(17);
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out.precision(old);
}

}  // namespace fracporo
