#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "semilin/expr.hpp"

namespace semilin {

using Point = std::array<double, 3>;

/// Axis-aligned box in 1, 2 or 3 dimensions; unused coordinates are zero.
struct Box {
  int dim = 1;
  Point lo{};
  Point hi{};

  Point center() const;
  bool contains_open(std::span<const double> x) const;
};

/// Description of an open set: a named primitive or an indicator expression
/// with the set {x : ind(x) > 0}.
struct DomainSpec {
  enum class Kind { Box, Disk, Annulus, LShape, UnionOfBoxes, Indicator };

  Kind kind = Kind::Box;
  Point center{};
  double radius = 0.0;        // Disk; outer radius of Annulus
  double inner_radius = 0.0;  // Annulus
  std::vector<Box> boxes;     // UnionOfBoxes
  Expr indicator;             // Indicator; may only reference x1..xd

  static DomainSpec box() { return {}; }
  static DomainSpec disk(Point center, double radius);
  static DomainSpec annulus(Point center, double inner, double outer);
  static DomainSpec l_shape();
  static DomainSpec union_of_boxes(std::vector<Box> boxes);
  static DomainSpec from_indicator(Expr indicator);

  /// Membership test; `box` is the bounding box (used by Box and LShape).
  bool contains(std::span<const double> x, const Box& box) const;
};

struct BoundaryFace {
  int row;   // interior node
  int axis;  // 0..d-1
  int dir;   // +1 or -1; the neighbour row + dir*e_axis is not a node
};

/// Open set sampled on a uniform lattice. Immutable after construction.
///
/// Lattice positions along axis a are lo_a + i*h for i = 0..extent_a-1; the
/// first and last positions lie on or beyond the box boundary and are never
/// produced by build_domain, but closures (Robin mode) may contain them.
class GridDomain {
 public:
  int dim() const noexcept { return box_.dim; }
  double h() const noexcept { return h_; }
  const Box& bbox() const noexcept { return box_; }
  std::size_t size() const noexcept { return lattice_of_row_.size(); }
  /// Quadrature weight h^d of every node.
  double cell_volume() const noexcept { return cell_volume_; }
  double face_area() const noexcept { return face_area_; }
  double measure() const noexcept { return cell_volume_ * static_cast<double>(size()); }

  Point coords(int row) const;
  std::array<int, 3> lattice_index(int row) const;
  /// Row at a lattice index, or -1 when the position is not a node.
  int row_at(std::array<int, 3> index) const;
  /// Row of the neighbour in direction dir (+1/-1) along axis, or -1.
  int neighbor(int row, int axis, int dir) const;

  const std::vector<BoundaryFace>& boundary_faces() const noexcept { return faces_; }
  const std::array<int, 3>& extent() const noexcept { return extent_; }

  bool same_lattice(const GridDomain& other) const;
  /// True when both domains have exactly the same node set.
  bool same_nodes(const GridDomain& other) const;

  /// Nodes with keep[row] != 0; returns nullptr when none survive.
  std::shared_ptr<const GridDomain> subdomain(std::span<const char> keep) const;

  /// Lattice-index constructor used by the factories below.
  GridDomain(Box box, double h, std::array<int, 3> extent, std::vector<int> lattice_nodes);

 private:
  std::size_t linear(std::array<int, 3> index) const;

  Box box_;
  double h_;
  double cell_volume_;
  double face_area_;
  std::array<int, 3> extent_;
  std::vector<int> row_of_;             // lattice linear index -> row or -1
  std::vector<int> lattice_of_row_;     // row -> lattice linear index
  std::vector<BoundaryFace> faces_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Samples the spec on the lattice of spacing h strictly inside the box.
DomainPtr build_domain(const DomainSpec& spec, double h, const Box& box);

/// Level k of the exhaustion: nodes inside the open cube of half-side
/// k*base_scale centred at the box centre whose lattice neighbours all lie in
/// the cube of level k+1. Returns nullptr for an empty level.
DomainPtr exhaustion(const GridDomain& dom, int k, double base_scale);

/// Interior nodes plus every lattice neighbour of an interior node; the node
/// set on which the Robin form is assembled.
DomainPtr robin_closure(const GridDomain& dom);

/// Indicator over the rows of `super` of the nodes that belong to `sub`.
std::vector<char> node_mask(const GridDomain& super, const GridDomain& sub);

}  // namespace semilin
