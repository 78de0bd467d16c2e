#include "fracporo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace fracporo {

namespace {

constexpr double kGridTol = 1e-8;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                        const Point2& q2) {
  const auto orient = [](const Point2& a, const Point2& b, const Point2& c) {
    const double v = cross(b - a, c - a);
    const double scale = (b - a).norm() * (c - a).norm();
    if (std::abs(v) <= 1e-14 * scale) return 0;
    return v > 0 ? 1 : -1;
  };
  const auto on_segment = [](const Point2& a, const Point2& b, const Point2& c) {
    return std::min(a.x(), b.x()) - 1e-14 <= c.x() && c.x() <= std::max(a.x(), b.x()) + 1e-14 &&
           std::min(a.y(), b.y()) - 1e-14 <= c.y() && c.y() <= std::max(a.y(), b.y()) + 1e-14;
  };
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

void check_polyline(const RectDomain& domain, const std::vector<Point2>& polyline) {
  if (polyline.size() < 2) throw MeshError("fracture polyline needs at least two points");
  const double tol = 1e-12 * domain.diameter();
  for (const auto& p : polyline) {
    if (!p.allFinite()) throw MeshError("fracture polyline has a non-finite coordinate");
    if (p.x() <= domain.x0 + tol || p.x() >= domain.x1 - tol || p.y() <= domain.y0 + tol ||
        p.y() >= domain.y1 - tol) {
      std::ostringstream msg;
      msg << "fracture touches the domain boundary at (" << p.x() << ", " << p.y() << ")";
      throw MeshError(msg.str());
    }
  }
  const std::size_t nseg = polyline.size() - 1;
  for (std::size_t i = 0; i < nseg; ++i) {
    if ((polyline[i + 1] - polyline[i]).norm() <= tol) {
      throw MeshError("fracture polyline has a zero-length segment");
    }
  }
  for (std::size_t i = 0; i < nseg; ++i) {
    for (std::size_t j = i + 1; j < nseg; ++j) {
      if (j == i + 1) {
        // Adjacent segments share a vertex; they intersect elsewhere only if
        // the second one folds back onto the first.
        const Vec2 d1 = polyline[i + 1] - polyline[i];
        const Vec2 d2 = polyline[j + 1] - polyline[j];
        if (std::abs(cross(d1, d2)) <= 1e-14 * d1.norm() * d2.norm() && d1.dot(d2) < 0) {
          throw MeshError("fracture polyline is self-intersecting");
        }
        continue;
      }
      if (segments_intersect(polyline[i], polyline[i + 1], polyline[j], polyline[j + 1])) {
        throw MeshError("fracture polyline is self-intersecting");
      }
    }
  }
}

/// Height of the extension interface: the polyline between its tips and
/// horizontal rays beyond them.
double interface_height(const std::vector<Point2>& polyline, double x) {
  if (x <= polyline.front().x()) return polyline.front().y();
  if (x >= polyline.back().x()) return polyline.back().y();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Point2& a = polyline[i];
    const Point2& b = polyline[i + 1];
    if (x <= b.x()) {
      const double t = (x - a.x()) / (b.x() - a.x());
      return a.y() + t * (b.y() - a.y());
    }
  }
  return polyline.back().y();
}

Subdomain classify(const std::vector<Point2>& polyline, const Point2& c) {
  return c.y() > interface_height(polyline, c.x()) ? Subdomain::kPlus : Subdomain::kMinus;
}

Point2 centroid(const Mesh2D& mesh, const Triangle& t) {
  return (mesh.nodes[t.nodes[0]] + mesh.nodes[t.nodes[1]] + mesh.nodes[t.nodes[2]]) / 3.0;
}

void number_pressure_nodes(Mesh2D& mesh) {
  std::vector<int> primary(mesh.nodes.size());
  for (std::size_t n = 0; n < primary.size(); ++n) primary[n] = static_cast<int>(n);
  for (const auto& pair : mesh.fracture_pairs) {
    if (!pair.is_tip()) primary[pair.minus] = pair.plus;
  }
  std::vector<int> compact(mesh.nodes.size(), -1);
  int next = 0;
  for (std::size_t n = 0; n < primary.size(); ++n) {
    if (primary[n] == static_cast<int>(n)) compact[n] = next++;
  }
  mesh.pressure_node.resize(mesh.nodes.size());
  for (std::size_t n = 0; n < primary.size(); ++n) mesh.pressure_node[n] = compact[primary[n]];
  mesh.num_pressure_nodes = next;
}

FractureMesh make_fracture_mesh(const Mesh2D& mesh, const std::vector<Point2>& polyline) {
  FractureMesh frac;
  frac.polyline = polyline;
  frac.tips = {polyline.front(), polyline.back()};
  frac.snap_tolerance = 1e-10 * mesh.domain.diameter();
  const auto& pairs = mesh.fracture_pairs;
  frac.arc.assign(pairs.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    FractureEdge e;
    e.a = static_cast<int>(i);
    e.b = static_cast<int>(i + 1);
    const Vec2 d = pairs[i + 1].position - pairs[i].position;
    e.length = d.norm();
    e.tangent = d / e.length;
    e.normal = Vec2(e.tangent.y(), -e.tangent.x());
    frac.arc[i + 1] = frac.arc[i] + e.length;
    frac.edges.push_back(e);
  }
  frac.length = frac.arc.back();
  return frac;
}

}  // namespace

double RectDomain::diameter() const { return std::hypot(width(), height()); }

double Mesh2D::signed_area(int tri) const {
  const auto& t = triangles[tri].nodes;
  return 0.5 * cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
}

double FractureMesh::arc_coordinate(const Point2& p) const {
  double best_dist = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double offset = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Vec2 d = polyline[i + 1] - polyline[i];
    const double len = d.norm();
    const double t = std::clamp((p - polyline[i]).dot(d) / (len * len), 0.0, 1.0);
    const double dist = (polyline[i] + t * d - p).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best_s = offset + t * len;
    }
    offset += len;
  }
  if (best_dist > snap_tolerance) {
    std::ostringstream msg;
    msg << "point (" << p.x() << ", " << p.y() << ") is not on the fracture";
    throw MeshError(msg.str());
  }
  return std::clamp(best_s, 0.0, length);
}

double FractureMesh::tip_distance(const Point2& p) const {
  if ((p - tips[0]).norm() <= snap_tolerance || (p - tips[1]).norm() <= snap_tolerance) {
    return 0.0;
  }
  return tip_distance_at(arc_coordinate(p));
}

double FractureMesh::tip_distance_at(double s) const {
  return std::max(0.0, std::min(s, length - s));
}

MeshBundle build_rect_mesh_with_fracture(const RectDomain& domain,
                                         const std::vector<Point2>& polyline, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw MeshError("mesh size h must be positive");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
    throw MeshError("domain rectangle is degenerate");
  }
  check_polyline(domain, polyline);

  const int nx = std::max(1, static_cast<int>(std::ceil(domain.width() / h - kGridTol)));
  const int ny = std::max(1, static_cast<int>(std::ceil(domain.height() / h - kGridTol)));
  const double hx = domain.width() / nx;
  const double hy = domain.height() / ny;
  const auto node_id = [nx](int i, int j) { return i + j * (nx + 1); };

  // Snap polyline vertices to grid indices.
  std::vector<std::array<int, 2>> ij;
  for (const auto& p : polyline) {
    const double fi = (p.x() - domain.x0) / hx;
    const double fj = (p.y() - domain.y0) / hy;
    const double ri = std::round(fi);
    const double rj = std::round(fj);
    if (std::abs(fi - ri) > kGridTol || std::abs(fj - rj) > kGridTol) {
      std::ostringstream msg;
      msg << "fracture vertex (" << p.x() << ", " << p.y()
          << ") does not lie on a grid node for h = " << h;
      throw MeshError(msg.str());
    }
    ij.push_back({static_cast<int>(ri), static_cast<int>(rj)});
  }

  // 0: '/' diagonal, 1: '\' diagonal.
  std::vector<int> diagonal(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<int> chain;
  chain.push_back(node_id(ij[0][0], ij[0][1]));
  for (std::size_t k = 0; k + 1 < ij.size(); ++k) {
    const int di = ij[k + 1][0] - ij[k][0];
    const int dj = ij[k + 1][1] - ij[k][1];
    if (di <= 0) throw MeshError("fracture polyline must be strictly increasing in x");
    if (dj != 0 && std::abs(dj) != di) {
      throw MeshError("fracture segment is not aligned with grid lines or cell diagonals");
    }
    const int sj = (dj > 0) - (dj < 0);
    for (int step = 0; step < di; ++step) {
      const int i = ij[k][0] + step;
      const int j = ij[k][1] + sj * step;
      if (sj < 0) diagonal[static_cast<std::size_t>(i) + static_cast<std::size_t>(j - 1) * nx] = 1;
      chain.push_back(node_id(i + 1, j + sj));
    }
  }
  if (chain.size() < 3) {
    throw MeshError("fracture spans fewer than 2 mesh edges; reduce h");
  }

  MeshBundle bundle;
  Mesh2D& mesh = bundle.mesh;
  mesh.domain = domain;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) + chain.size());
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Pin the outer rows/columns to the exact extents.
      const double x = i == nx ? domain.x1 : domain.x0 + i * hx;
      const double y = j == ny ? domain.y1 : domain.y0 + j * hy;
      mesh.nodes.emplace_back(x, y);
    }
  }
  // Put fracture vertices exactly where the caller placed them.
  for (std::size_t k = 0; k < ij.size(); ++k) {
    mesh.nodes[node_id(ij[k][0], ij[k][1])] = polyline[k];
  }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = node_id(i, j), n10 = node_id(i + 1, j);
      const int n01 = node_id(i, j + 1), n11 = node_id(i + 1, j + 1);
      if (diagonal[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * nx] == 0) {
        mesh.triangles.push_back({{n00, n10, n11}, Subdomain::kPlus});
        mesh.triangles.push_back({{n00, n11, n01}, Subdomain::kPlus});
      } else {
        mesh.triangles.push_back({{n00, n10, n01}, Subdomain::kPlus});
        mesh.triangles.push_back({{n10, n11, n01}, Subdomain::kPlus});
      }
    }
  }
  for (auto& t : mesh.triangles) t.tag = classify(polyline, centroid(mesh, t));

  // Duplicate interior fracture nodes for the minus side.
  std::map<int, int> duplicate;
  for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
    duplicate[chain[k]] = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(mesh.nodes[chain[k]]);
  }
  for (auto& t : mesh.triangles) {
    if (t.tag != Subdomain::kMinus) continue;
    for (int& n : t.nodes) {
      if (auto it = duplicate.find(n); it != duplicate.end()) n = it->second;
    }
  }
  for (std::size_t k = 0; k < chain.size(); ++k) {
    FracturePair pair;
    pair.plus = chain[k];
    const bool tip = k == 0 || k + 1 == chain.size();
    pair.minus = tip ? chain[k] : duplicate.at(chain[k]);
    pair.position = mesh.nodes[chain[k]];
    mesh.fracture_pairs.push_back(pair);
  }

  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({{node_id(i, 0), node_id(i + 1, 0)}, Side::kBottom});
    mesh.boundary_edges.push_back({{node_id(i + 1, ny), node_id(i, ny)}, Side::kTop});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({{node_id(nx, j), node_id(nx, j + 1)}, Side::kRight});
    mesh.boundary_edges.push_back({{node_id(0, j + 1), node_id(0, j)}, Side::kLeft});
  }

  number_pressure_nodes(mesh);
  bundle.fracture = make_fracture_mesh(mesh, polyline);
  return bundle;
}

MeshBundle uniform_refine(const MeshBundle& bundle) {
  const Mesh2D& coarse = bundle.mesh;
  MeshBundle out;
  Mesh2D& fine = out.mesh;
  fine.domain = coarse.domain;
  fine.nodes = coarse.nodes;

  std::map<std::pair<int, int>, int> midpoint;
  const auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(fine.nodes.size());
    fine.nodes.push_back(0.5 * (coarse.nodes[a] + coarse.nodes[b]));
    midpoint.emplace(key, id);
    return id;
  };

  fine.triangles.reserve(coarse.triangles.size() * 4);
  for (const auto& t : coarse.triangles) {
    const int a = t.nodes[0], b = t.nodes[1], c = t.nodes[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    fine.triangles.push_back({{a, ab, ca}, t.tag});
    fine.triangles.push_back({{ab, b, bc}, t.tag});
    fine.triangles.push_back({{ca, bc, c}, t.tag});
    fine.triangles.push_back({{ab, bc, ca}, t.tag});
  }
  for (const auto& e : coarse.boundary_edges) {
    const int m = mid(e.nodes[0], e.nodes[1]);
    fine.boundary_edges.push_back({{e.nodes[0], m}, e.side});
    fine.boundary_edges.push_back({{m, e.nodes[1]}, e.side});
  }
  const auto& pairs = coarse.fracture_pairs;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    fine.fracture_pairs.push_back(pairs[k]);
    if (k + 1 == pairs.size()) break;
    FracturePair m;
    m.plus = mid(pairs[k].plus, pairs[k + 1].plus);
    m.minus = mid(pairs[k].minus, pairs[k + 1].minus);
    m.position = fine.nodes[m.plus];
    fine.fracture_pairs.push_back(m);
  }
  number_pressure_nodes(fine);
  out.fracture = make_fracture_mesh(fine, bundle.fracture.polyline);
  return out;
}

std::vector<std::string> check_mesh_invariants(const MeshBundle& bundle) {
  const Mesh2D& mesh = bundle.mesh;
  const FractureMesh& frac = bundle.fracture;
  std::vector<std::string> issues;
  const auto report = [&issues](std::string msg) { issues.push_back(std::move(msg)); };

  double total_area = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.signed_area(t);
    if (!(a > 0.0)) report("triangle " + std::to_string(t) + " has non-positive area");
    total_area += a;
  }
  if (std::abs(total_area - mesh.domain.area()) > 1e-12 * mesh.domain.area()) {
    report("triangle areas do not sum to the domain area");
  }

  for (std::size_t k = 0; k < mesh.fracture_pairs.size(); ++k) {
    const auto& pair = mesh.fracture_pairs[k];
    const bool tip = k == 0 || k + 1 == mesh.fracture_pairs.size();
    if (tip != pair.is_tip()) report("fracture pair " + std::to_string(k) + " has wrong tip status");
    if (mesh.nodes[pair.plus] != mesh.nodes[pair.minus] || mesh.nodes[pair.plus] != pair.position) {
      report("fracture pair " + std::to_string(k) + " coordinates differ");
    }
    if (mesh.pressure_node[pair.plus] != mesh.pressure_node[pair.minus]) {
      report("fracture pair " + std::to_string(k) + " has two pressure nodes");
    }
  }

  // Edge -> adjacent triangles.
  std::map<std::pair<int, int>, std::vector<int>> adjacency;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& n = mesh.triangles[t].nodes;
    for (int e = 0; e < 3; ++e) adjacency[std::minmax(n[e], n[(e + 1) % 3])].push_back(t);
  }
  std::map<std::pair<int, int>, Subdomain> fracture_face;
  for (const auto& e : frac.edges) {
    const auto& pa = mesh.fracture_pairs[e.a];
    const auto& pb = mesh.fracture_pairs[e.b];
    fracture_face[std::minmax(pa.plus, pb.plus)] = Subdomain::kPlus;
    fracture_face[std::minmax(pa.minus, pb.minus)] = Subdomain::kMinus;
  }
  std::map<std::pair<int, int>, bool> boundary;
  for (const auto& e : mesh.boundary_edges) boundary[std::minmax(e.nodes[0], e.nodes[1])] = true;
  for (const auto& [edge, tris] : adjacency) {
    if (auto it = fracture_face.find(edge); it != fracture_face.end()) {
      if (tris.size() != 1 || mesh.triangles[tris[0]].tag != it->second) {
        report("fracture face edge is not bounded by exactly one triangle of its side");
      }
    } else if (boundary.count(edge) != 0) {
      if (tris.size() != 1) report("boundary edge shared by more than one triangle");
    } else if (tris.size() != 2) {
      report("interior edge (" + std::to_string(edge.first) + ", " + std::to_string(edge.second) +
             ") shared by " + std::to_string(tris.size()) + " triangles");
    }
  }
  if (boundary.size() != mesh.boundary_edges.size()) report("duplicate boundary edges");

  for (const auto& t : mesh.triangles) {
    if (classify(frac.polyline, centroid(mesh, t)) != t.tag) {
      report("triangle tag inconsistent with the extension interface");
      break;
    }
  }

  for (const auto& e : frac.edges) {
    if (std::abs(e.normal.norm() - 1.0) > 1e-14 || std::abs(e.normal.dot(e.tangent)) > 1e-14) {
      report("fracture normal is not a unit vector orthogonal to the tangent");
    }
    const auto& pa = mesh.fracture_pairs[e.a];
    const auto& pb = mesh.fracture_pairs[e.b];
    const Point2 midpoint = 0.5 * (pa.position + pb.position);
    const auto& tri = adjacency[std::minmax(pa.minus, pb.minus)];
    if (tri.size() == 1 && (centroid(mesh, mesh.triangles[tri[0]]) - midpoint).dot(e.normal) <= 0) {
      report("n+ does not point into the minus subdomain");
    }
  }
  for (std::size_t k = 0; k < mesh.fracture_pairs.size(); ++k) {
    const double d = frac.tip_distance_at(frac.arc[k]);
    const bool tip = k == 0 || k + 1 == mesh.fracture_pairs.size();
    if (d < 0.0 || (tip && d != 0.0) || (!tip && !(d > 0.0))) {
      report("tip distance wrong at fracture pair " + std::to_string(k));
    }
  }
  return issues;
}

DofMap DofMap::build(const Mesh2D& mesh, const BoundaryConditions& bc) {
  DofMap dofs;
  std::vector<char> clamped(mesh.nodes.size(), 0);
  std::vector<char> fixed_p(static_cast<std::size_t>(mesh.num_pressure_nodes), 0);
  for (const auto& e : mesh.boundary_edges) {
    const auto side = static_cast<std::size_t>(e.side);
    for (int n : e.nodes) {
      if (bc.clamp_displacement[side]) clamped[n] = 1;
      if (bc.fix_pressure[side]) fixed_p[mesh.pressure_node[n]] = 1;
    }
  }
  dofs.u_free_.assign(mesh.nodes.size() * 2, -1);
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    if (clamped[n]) continue;
    dofs.u_free_[2 * n] = dofs.num_u_free_++;
    dofs.u_free_[2 * n + 1] = dofs.num_u_free_++;
  }
  dofs.p_free_.assign(fixed_p.size(), -1);
  for (std::size_t p = 0; p < fixed_p.size(); ++p) {
    if (!fixed_p[p]) dofs.p_free_[p] = dofs.num_p_free_++;
  }
  dofs.pressure_node_ = mesh.pressure_node;
  for (const auto& pair : mesh.fracture_pairs) {
    const int d = dofs.p_free_of_node(pair.plus);
    if (d >= 0) dofs.fracture_p_.push_back(d);
  }
  return dofs;
}

Vector DofMap::expand_u(const Vector& free) const {
  Vector full = Vector::Zero(num_u_full());
  for (int i = 0; i < num_u_full(); ++i) {
    if (u_free_[i] >= 0) full[i] = free[u_free_[i]];
  }
  return full;
}

Vector DofMap::expand_p(const Vector& free) const {
  Vector full = Vector::Zero(num_p_full());
  for (int i = 0; i < num_p_full(); ++i) {
    if (p_free_[i] >= 0) full[i] = free[p_free_[i]];
  }
  return full;
}

Vector DofMap::restrict_u(const Vector& full) const {
  Vector free(num_u_free_);
  for (int i = 0; i < num_u_full(); ++i) {
    if (u_free_[i] >= 0) free[u_free_[i]] = full[i];
  }
  return free;
}

Vector DofMap::restrict_p(const Vector& full) const {
  Vector free(num_p_free_);
  for (int i = 0; i < num_p_full(); ++i) {
    if (p_free_[i] >= 0) free[p_free_[i]] = full[i];
  }
  return free;
}

void write_mesh_vtk(const Mesh2D& mesh, std::ostream& out) {
  out << "# vtk DataFile Version 3.0\nfracporo mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << mesh.nodes.size() << " double\n";
  for (const auto& p : mesh.nodes) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << mesh.triangles.size() << ' ' << 4 * mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) {
    out << "3 " << t.nodes[0] << ' ' << t.nodes[1] << ' ' << t.nodes[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.triangles.size() << '\n';
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";
  out << "CELL_DATA " << mesh.triangles.size() << "\nSCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (const auto& t : mesh.triangles) out << static_cast<int>(t.tag) << '\n';
}

}  // namespace fracporo
