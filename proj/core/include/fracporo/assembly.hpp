#pragma once

#include <iosfwd>

#include "fracporo/constitutive.hpp"
#include "fracporo/mesh.hpp"
#include "fracporo/types.hpp"

namespace fracporo {

/// Galerkin matrices for vector P1 displacement (duplicated across the
/// fracture) and scalar P1 pressure. Rows/columns follow DofMap's full or
/// free numbering depending on where the object came from.
struct SystemMatrices {
  SparseMatrix C_u;    // (w_i, w_j)
  SparseMatrix C_p;    // (1/M + c_f phi0)(theta_i, theta_j)
  SparseMatrix C_pc;   // c_fc (theta_i, theta_j) on the fracture
  SparseMatrix A_up;   // (theta_j, div w_i); rows u, cols p; no alpha
  SparseMatrix B;      // alpha (div w_j, div w_i); assembled, not used by the solver
  SparseMatrix L;      // (1/mu_f)(K grad theta_j, grad theta_i)
  SparseMatrix W;      // (w^3 / 12 mu_f)(d theta_j/ds, d theta_i/ds) on the fracture
  SparseMatrix M_upc;  // -([w_j].n+, theta_i) on the fracture; rows p, cols u
  SparseMatrix E1;     // 2G (eps(w_j), eps(w_i))
  SparseMatrix E2;     // lambda (div w_j, div w_i)
  SparseMatrix D;      // gamma (eps(w_j), eps(w_i)) + gamma (div w_j, div w_i)
};

struct LoadVectors {
  Vector F_u;   // (f, w_i)
  Vector F_p;   // (q, theta_i) + gravity part of the Darcy flux
  Vector F_pc;  // (q_W, theta_i) on the fracture + gravity part of the fracture flux
};

struct ReducedSystem {
  SystemMatrices matrices;
  LoadVectors loads;
};

/// All matrices over the full dof numbering (Dirichlet dofs included).
SystemMatrices assemble_system(const MeshBundle& geometry, const MaterialParams& params,
                               const WidthProfile& width, double t);

/// W alone; used when the width profile changes in time.
SparseMatrix assemble_fracture_permeability(const MeshBundle& geometry,
                                            const MaterialParams& params,
                                            const WidthProfile& width, double t);

LoadVectors assemble_loads(const MeshBundle& geometry, const SourceData& data,
                           const MaterialParams& params, const WidthProfile& width, double t);

/// Homogeneous elimination of Dirichlet dofs. Throws ValidationError when
/// no displacement dof is constrained.
ReducedSystem apply_dirichlet(const SystemMatrices& full, const LoadVectors& loads,
                              const DofMap& dofs);
SystemMatrices restrict_matrices(const SystemMatrices& full, const DofMap& dofs);
LoadVectors restrict_loads(const LoadVectors& full, const DofMap& dofs);

/// Keeps entries whose row and column both map to a free index.
SparseMatrix restrict_matrix(const SparseMatrix& a, const std::vector<int>& row_map, int rows,
                             const std::vector<int>& col_map, int cols);

/// alpha A_up + M_upc^T: the pressure coupling entering the mechanics row.
SparseMatrix pressure_coupling(const SystemMatrices& m, const MaterialParams& params);

bool is_symmetric(const SparseMatrix& a, double rel_tol = 1e-12);

/// "row col value" per line, 17 significant digits.
void write_coordinate_text(const SparseMatrix& a, std::ostream& out);

}  // namespace fracporo
