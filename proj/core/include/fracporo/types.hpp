#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace fracporo {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Point2 = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Invalid geometry or mesh construction request.
class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A physical parameter or configuration value violates its invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear or nonlinear solve failure.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { kSingular, kNonConvergence };
  SolverError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace fracporo
