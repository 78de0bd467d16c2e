#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fracporo/cases.hpp"
#include "fracporo/constitutive.hpp"
#include "fracporo/mesh.hpp"
#include "fracporo/solver.hpp"

namespace fracporo {

/// Parse or validation failure while reading a configuration.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct GeometryConfig {
  RectDomain domain;
  std::vector<Point2> fracture{{0.25, 0.5}, {0.75, 0.5}};
  double h = 0.125;
  int refine = 0;
  BoundaryConditions bc;
};

struct WidthConfig {
  WidthProfile::Kind profile = WidthProfile::Kind::kTipPower;
  double w0 = 1e-3;
  double tip_exponent = 0.05;
  double growth_rate = 0.0;
};

enum class SourceCase { kCustom, kZero, kManufactured };

struct OutputConfig {
  std::string directory = "output";
  int fields_every = 0;  // 0 writes fields only for the final state
  bool timeseries = true;
  bool energy = true;
};

struct RunConfig {
  GeometryConfig geometry;
  MaterialParams material;
  WidthConfig width;
  SourceCase source_case = SourceCase::kCustom;
  LoadSpec loads;
  StepConfig time;
  int steps = 10;
  OutputConfig output;

  /// Re-checks every invariant; throws ConfigError.
  void validate() const;
};

/// Reads the sectioned key = value format. Unknown sections or keys, bad
/// numbers and invariant violations raise ConfigError naming the line or
/// the violated invariant.
RunConfig parse_config(std::istream& in, const std::string& source_name = "<config>");
RunConfig load_config(const std::string& path);

/// Mesh, dofs, width and sources built from a configuration.
struct Problem {
  MeshBundle geometry;
  DofMap dofs;
  WidthProfile width;
  SourceData sources;
  // Set for the manufactured case; the sources refer to it.
  std::shared_ptr<const ManufacturedSolution> manufactured;
};

Problem build_problem(const RunConfig& cfg);

}  // namespace fracporo
