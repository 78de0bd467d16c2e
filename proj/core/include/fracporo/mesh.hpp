#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracporo/types.hpp"

namespace fracporo {

enum class Side : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

/// Subdomain tag relative to the extension interface through the fracture.
/// Omega+ lies above the interface, so n+ points downward into Omega-.
enum class Subdomain : int { kMinus = -1, kPlus = 1 };

struct RectDomain {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double diameter() const;
};

struct Triangle {
  std::array<int, 3> nodes{};
  Subdomain tag = Subdomain::kPlus;
};

struct BoundaryEdge {
  std::array<int, 2> nodes{};
  Side side = Side::kLeft;
};

/// Coincident node pair on the fracture. Tips carry plus == minus so the
/// displacement jump vanishes there.
struct FracturePair {
  int plus = -1;
  int minus = -1;
  Point2 position = Point2::Zero();

  bool is_tip() const { return plus == minus; }
};

struct Mesh2D {
  RectDomain domain;
  std::vector<Point2> nodes;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  // Ordered along the fracture from the first tip to the second.
  std::vector<FracturePair> fracture_pairs;
  // Mesh node -> pressure node. Duplicated minus-side nodes share the
  // pressure node of their plus-side partner.
  std::vector<int> pressure_node;
  int num_pressure_nodes = 0;

  double signed_area(int tri) const;
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
};

struct FractureEdge {
  int a = -1;  // index into Mesh2D::fracture_pairs
  int b = -1;
  Vec2 tangent = Vec2::UnitX();
  Vec2 normal = -Vec2::UnitY();  // n+, from Omega+ into Omega-
  double length = 0.0;
};

struct FractureMesh {
  std::vector<FractureEdge> edges;
  std::vector<double> arc;  // arc coordinate per fracture pair
  std::vector<Point2> polyline;
  std::array<Point2, 2> tips{};
  double length = 0.0;
  double snap_tolerance = 0.0;

  /// Arc coordinate of a point on the fracture. Throws MeshError when the
  /// point is farther than the snapping tolerance from the polyline.
  double arc_coordinate(const Point2& p) const;
  /// Arc distance to the nearer tip; exactly zero at the tips.
  double tip_distance(const Point2& p) const;
  /// Same quantity from an arc coordinate.
  double tip_distance_at(double s) const;
};

struct MeshBundle {
  Mesh2D mesh;
  FractureMesh fracture;
};

/// Structured triangulation of a rectangle that conforms to an x-monotone
/// fracture polyline whose vertices lie on grid nodes and whose segments
/// run along grid lines or cell diagonals.
MeshBundle build_rect_mesh_with_fracture(const RectDomain& domain,
                                         const std::vector<Point2>& polyline,
                                         double h);

/// Red refinement: every triangle split into four at edge midpoints.
MeshBundle uniform_refine(const MeshBundle& bundle);

/// Returns one message per violated Mesh2D/FractureMesh invariant.
std::vector<std::string> check_mesh_invariants(const MeshBundle& bundle);

// --- degrees of freedom ---------------------------------------------------

struct BoundaryConditions {
  // Indexed by Side. Homogeneous conditions only.
  std::array<bool, 4> clamp_displacement{true, true, true, true};
  std::array<bool, 4> fix_pressure{true, true, true, true};
};

/// Full numbering: displacement 2*node + component, pressure = pressure
/// node. Free numbering drops Dirichlet dofs and is a bijection onto
/// 0..n_free-1.
class DofMap {
 public:
  static DofMap build(const Mesh2D& mesh, const BoundaryConditions& bc);

  int num_u_full() const { return static_cast<int>(u_free_.size()); }
  int num_p_full() const { return static_cast<int>(p_free_.size()); }
  int num_u() const { return num_u_free_; }
  int num_p() const { return num_p_free_; }

  int u_full(int node, int comp) const { return 2 * node + comp; }
  int u_free(int node, int comp) const { return u_free_[2 * node + comp]; }
  int p_free_of_node(int node) const { return p_free_[pressure_node_[node]]; }
  int p_free(int pnode) const { return p_free_[pnode]; }

  const std::vector<int>& u_full_to_free() const { return u_free_; }
  const std::vector<int>& p_full_to_free() const { return p_free_; }
  // Free pressure dofs lying on the fracture (tips included).
  const std::vector<int>& fracture_p_dofs() const { return fracture_p_; }

  Vector expand_u(const Vector& free) const;
  Vector expand_p(const Vector& free) const;
  Vector restrict_u(const Vector& full) const;
  Vector restrict_p(const Vector& full) const;

 private:
  std::vector<int> u_free_;
  std::vector<int> p_free_;
  std::vector<int> pressure_node_;
  std::vector<int> fracture_p_;
  int num_u_free_ = 0;
  int num_p_free_ = 0;
};

/// Legacy ASCII VTK dump of the triangulation with the subdomain tag.
void write_mesh_vtk(const Mesh2D& mesh, std::ostream& out);

}  // namespace fracporo
