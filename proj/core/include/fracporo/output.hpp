#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracporo/contact.hpp"
#include "fracporo/diagnostics.hpp"
#include "fracporo/mesh.hpp"
#include "fracporo/solver.hpp"

namespace fracporo {

/// Writes content to path through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Legacy ASCII VTK: displacement (z = 0), pressure, subdomain.
void write_fields_vtk(std::ostream& out, const MeshBundle& geometry, const DofMap& dofs,
                      const State& s);

/// Fracture polyline with p_c, width_jump = -[u].n+, penetration and slip_rate
/// evaluated at the fracture nodes.
void write_fracture_vtk(std::ostream& out, const MeshBundle& geometry, const DofMap& dofs,
                        const State& s, const MaterialParams& params);

void write_fields(const std::filesystem::path& bulk_path, const std::filesystem::path& fracture_path,
                  const MeshBundle& geometry, const DofMap& dofs, const State& s,
                  const MaterialParams& params);

/// One row of the time-series CSV.
struct TimeSeriesRow {
  int step = 0;
  double t = 0.0;
  EnergyReport energy;
  // NaN when contact is off (mode Q0).
  double max_penetration = 0.0;
  double stick_fraction = 0.0;
  int fp_iters = 0;
};

std::string timeseries_csv(const std::vector<TimeSeriesRow>& rows);
std::string energy_csv(const std::vector<EnergyCheck>& checks);
std::string convergence_csv(const ConvergenceTable& table);

/// Text rendering of a double that round-trips exactly.
std::string format_double(double v);

}  // namespace fracporo
