#include "fracporo/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace fracporo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename '" + tmp.string() + "': " + ec.message());
}

void write_fields_vtk(std::ostream& out, const MeshBundle& geometry, const DofMap& dofs,
                      const State& s) {
  const Mesh2D& mesh = geometry.mesh;
  const Vector u = dofs.expand_u(s.U);
  const Vector p = dofs.expand_p(s.P);
  const int nn = mesh.num_nodes();
  const int nt = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\n"
      << "fracporo fields t=" << format_double(s.t) << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nn << " double\n";
  for (const auto& x : mesh.nodes) out << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles) {
    out << "3 " << t.nodes[0] << ' ' << t.nodes[1] << ' ' << t.nodes[2] << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (int i = 0; i < nt; ++i) out << "5\n";
  out << "POINT_DATA " << nn << "\nVECTORS displacement double\n";
  for (int n = 0; n < nn; ++n) {
    out << format_double(u[2 * n]) << ' ' << format_double(u[2 * n + 1]) << " 0\n";
  }
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int n = 0; n < nn; ++n) out << format_double(p[mesh.pressure_node[n]]) << '\n';
  out << "CELL_DATA " << nt << "\nSCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (const auto& t : mesh.triangles) out << static_cast<int>(t.tag) << '\n';
}

void write_fracture_vtk(std::ostream& out, const MeshBundle& geometry, const DofMap& dofs,
                        const State& s, const MaterialParams& params) {
  const Mesh2D& mesh = geometry.mesh;
  const FractureMesh& frac = geometry.fracture;
  const Vector u = dofs.expand_u(s.U);
  const Vector x = dofs.expand_u(s.X);
  const Vector p = dofs.expand_p(s.P);
  const int np = static_cast<int>(mesh.fracture_pairs.size());

  // Nodal normals and tangents: average of the adjacent edges.
  std::vector<Vec2> normal(np, Vec2::Zero());
  std::vector<Vec2> tangent(np, Vec2::Zero());
  for (const auto& e : frac.edges) {
    for (int k : {e.a, e.b}) {
      normal[k] += e.normal;
      tangent[k] += e.tangent;
    }
  }
  const auto jump = [&](const Vector& v, const FracturePair& fp) {
    return Vec2(v[2 * fp.plus] - v[2 * fp.minus], v[2 * fp.plus + 1] - v[2 * fp.minus + 1]);
  };

  out << "# vtk DataFile Version 3.0\n"
      << "fracporo fracture t=" << format_double(s.t) << "\n"
      << "ASCII\nDATASET POLYDATA\n";
  out << "POINTS " << np << " double\n";
  for (const auto& fp : mesh.fracture_pairs) {
    out << format_double(fp.position.x()) << ' ' << format_double(fp.position.y()) << " 0\n";
  }
  out << "LINES 1 " << np + 1 << '\n' << np;
  for (int k = 0; k < np; ++k) out << ' ' << k;
  out << '\n';
  out << "POINT_DATA " << np << "\nSCALARS p_c double 1\nLOOKUP_TABLE default\n";
  for (const auto& fp : mesh.fracture_pairs) out << format_double(p[mesh.pressure_node[fp.plus]]) << '\n';
  std::ostringstream width, pen, slip;
  for (int k = 0; k < np; ++k) {
    const FracturePair& fp = mesh.fracture_pairs[k];
    const Vec2 n = normal[k].normalized();
    const Vec2 t = tangent[k].normalized();
    const double w = -jump(u, fp).dot(n);
    width << format_double(w) << '\n';
    pen << format_double(penetration_depth(params.normal_jump_sign * w, params.g0)) << '\n';
    slip << format_double(std::abs(jump(x, fp).dot(t))) << '\n';
  }
  out << "SCALARS width_jump double 1\nLOOKUP_TABLE default\n" << width.str();
  out << "SCALARS penetration double 1\nLOOKUP_TABLE default\n" << pen.str();
  out << "SCALARS slip_rate double 1\nLOOKUP_TABLE default\n" << slip.str();
}

void write_fields(const std::filesystem::path& bulk_path,
                  const std::filesystem::path& fracture_path, const MeshBundle& geometry,
                  const DofMap& dofs, const State& s, const MaterialParams& params) {
  std::ostringstream bulk;
  write_fields_vtk(bulk, geometry, dofs, s);
  write_file_atomic(bulk_path, bulk.str());
  std::ostringstream frac;
  write_fracture_vtk(frac, geometry, dofs, s, params);
  write_file_atomic(fracture_path, frac.str());
}

std::string timeseries_csv(const std::vector<TimeSeriesRow>& rows) {
  std::ostringstream out;
  out << "step,t,kinetic,strain_G,strain_lambda,storage_bulk,storage_frac,diss_darcy,diss_frac,"
         "diss_visc,contact_R,max_penetration,stick_fraction,fp_iters\n";
  for (const auto& r : rows) {
    const EnergyReport& e = r.energy;
    out << r.step << ',' << format_double(r.t);
    for (double v : {e.stored.kinetic, e.stored.strain_G, e.stored.strain_lambda,
                     e.stored.storage_bulk, e.stored.storage_frac, e.diss_darcy, e.diss_frac,
                     e.diss_visc, e.stored.contact_R, r.max_penetration, r.stick_fraction}) {
      out << ',' << format_double(v);
    }
    out << ',' << r.fp_iters << '\n';
  }
  return out.str();
}

std::string energy_csv(const std::vector<EnergyCheck>& checks) {
  std::ostringstream out;
  out << "step,t,lhs,rhs,slack,scale,ok\n";
  for (const auto& c : checks) {
    out << c.step << ',' << format_double(c.t) << ',' << format_double(c.lhs) << ','
        << format_double(c.rhs) << ',' << format_double(c.slack()) << ','
        << format_double(c.scale) << ',' << (c.ok ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "level,h,p_l2,p_h1,u_l2,u_h1,order_p_l2,order_p_h1,order_u_l2,order_u_h1\n";
  for (std::size_t i = 0; i < table.h.size(); ++i) {
    const FieldErrors& e = table.errors[i];
    out << i << ',' << format_double(table.h[i]) << ',' << format_double(e.p_l2) << ','
        << format_double(e.p_h1) << ',' << format_double(e.u_l2) << ',' << format_double(e.u_h1);
    if (i == 0) {
      out << ",,,,\n";
    } else {
      const FieldErrors& o = table.orders[i - 1];
      out << ',' << format_double(o.p_l2) << ',' << format_double(o.p_h1) << ','
          << format_double(o.u_l2) << ',' << format_double(o.u_h1) << '\n';
    }
  }
  return out.str();
}

}  // namespace fracporo
