#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fracporo/output.hpp"
#include "fracporo/solver.hpp"
#include "oracles.hpp"

namespace fracporo {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int count_fields(const std::string& line) {
  return 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
}

TEST(Output, DoublesRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 300));
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Output, AtomicWriteReplacesContent) {
  const fs::path dir = fs::temp_directory_path() / "fracporo_output_test";
  fs::remove_all(dir);
  const fs::path file = dir / "nested" / "a.txt";
  write_file_atomic(file, "first");
  write_file_atomic(file, "second\n");
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second\n");
  EXPECT_FALSE(fs::exists(fs::path(file.string() + ".tmp")));
  fs::remove_all(dir);
}

TEST(Output, VtkArraysMatchMeshSizes) {
  const MeshBundle mesh = build_rect_mesh_with_fracture({0.0, 0.0, 1.0, 1.0},
                                                        {{0.25, 0.5}, {0.75, 0.5}}, 0.25);
  const DofMap dofs = DofMap::build(mesh.mesh, BoundaryConditions{});
  State s;
  s.t = 0.5;
  s.U = Vector::Constant(dofs.num_u(), 1e-3);
  s.X = Vector::Zero(dofs.num_u());
  s.P = Vector::Constant(dofs.num_p(), 2.0);
  std::ostringstream bulk, frac;
  write_fields_vtk(bulk, mesh, dofs, s);
  write_fracture_vtk(frac, mesh, dofs, s, MaterialParams{});
  const auto b = lines_of(bulk.str());
  const int nn = mesh.mesh.num_nodes(), nt = mesh.mesh.num_triangles();
  EXPECT_EQ(b[0], "# vtk DataFile Version 3.0");
  EXPECT_EQ(b[2], "ASCII");
  EXPECT_EQ(b[3], "DATASET UNSTRUCTURED_GRID");
  EXPECT_EQ(b[4], "POINTS " + std::to_string(nn) + " double");
  // header, points, cells, types, point data (2 arrays), cell data (1 array)
  EXPECT_EQ(static_cast<int>(b.size()), 5 + nn + 1 + nt + 1 + nt + 2 + nn + 2 + nn + 3 + nt);
  const auto f = lines_of(frac.str());
  const int np = static_cast<int>(mesh.mesh.fracture_pairs.size());
  EXPECT_EQ(f[3], "DATASET POLYDATA");
  EXPECT_EQ(static_cast<int>(f.size()), 5 + np + 2 + 2 + 4 * (2 + np) - 1);
}

TEST(Output, CsvColumnsAreConsistent) {
  std::vector<TimeSeriesRow> rows(3);
  rows[1].step = 1;
  rows[1].max_penetration = std::nan("");
  const auto ts = lines_of(timeseries_csv(rows));
  ASSERT_EQ(ts.size(), 4u);
  EXPECT_EQ(count_fields(ts[0]), 14);
  for (const auto& l : ts) EXPECT_EQ(count_fields(l), 14);
  EXPECT_NE(ts[2].find("nan"), std::string::npos);

  std::vector<EnergyCheck> checks(2);
  checks[0].lhs = 1.0;
  checks[0].rhs = 3.0;
  const auto en = lines_of(energy_csv(checks));
  EXPECT_EQ(en[0], "step,t,lhs,rhs,slack,scale,ok");
  EXPECT_EQ(en[1], "0,0,1,3,2,0,1");

  ConvergenceTable t = make_convergence_table({0.2, 0.1}, {{4, 2, 4, 2}, {1, 1, 1, 1}});
  const auto cv = lines_of(convergence_csv(t));
  ASSERT_EQ(cv.size(), 3u);
  EXPECT_EQ(cv[1], "0,0.20000000000000001,4,2,4,2,,,,");
  EXPECT_EQ(cv[2], "1,0.10000000000000001,1,1,1,1,2,1,2,1");
}

}  // namespace
}  // namespace fracporo
