#include "semilin/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semilin/error.hpp"

namespace semilin {

Point Box::center() const {
  Point c{};
  for (int a = 0; a < dim; ++a) c[a] = 0.5 * (lo[a] + hi[a]);
  return c;
}

bool Box::contains_open(std::span<const double> x) const {
  for (int a = 0; a < dim; ++a) {
    if (!(x[a] > lo[a] && x[a] < hi[a])) return false;
  }
  return true;
}

DomainSpec DomainSpec::disk(Point center, double radius) {
  DomainSpec s;
  s.kind = Kind::Disk;
  s.center = center;
  s.radius = radius;
  return s;
}

DomainSpec DomainSpec::annulus(Point center, double inner, double outer) {
  DomainSpec s;
  s.kind = Kind::Annulus;
  s.center = center;
  s.inner_radius = inner;
  s.radius = outer;
  return s;
}

DomainSpec DomainSpec::l_shape() {
  DomainSpec s;
  s.kind = Kind::LShape;
  return s;
}

DomainSpec DomainSpec::union_of_boxes(std::vector<Box> boxes) {
  DomainSpec s;
  s.kind = Kind::UnionOfBoxes;
  s.boxes = std::move(boxes);
  return s;
}

DomainSpec DomainSpec::from_indicator(Expr indicator) {
  for (const auto& name : indicator.free_variables()) {
    if (name.size() < 2 || name[0] != 'x' || name[1] == 'i') {
      throw DomainError("indicator may only reference x-variables, found '" + name + "'");
    }
  }
  DomainSpec s;
  s.kind = Kind::Indicator;
  s.indicator = std::move(indicator);
  return s;
}

bool DomainSpec::contains(std::span<const double> x, const Box& box) const {
  auto dist2 = [&](const Point& c) {
    double r2 = 0.0;
    for (int a = 0; a < box.dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
    return r2;
  };
  switch (kind) {
    case Kind::Box: return true;
    case Kind::Disk: return dist2(center) < radius * radius;
    case Kind::Annulus: {
      const double r2 = dist2(center);
      return r2 > inner_radius * inner_radius && r2 < radius * radius;
    }
    case Kind::LShape: {
      // The box minus its upper corner quadrant (closed), for d >= 2.
      if (box.dim < 2) return true;
      const Point c = box.center();
      return !(x[0] >= c[0] && x[1] >= c[1]);
    }
    case Kind::UnionOfBoxes:
      return std::any_of(boxes.begin(), boxes.end(),
                         [&](const Box& b) { return b.contains_open(x); });
    case Kind::Indicator: {
      std::vector<double> slots(indicator.layout().size(), 0.0);
      for (int a = 0; a < box.dim; ++a) slots[static_cast<std::size_t>(a)] = x[a];
      return indicator.eval(slots) > 0.0;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

GridDomain::GridDomain(Box box, double h, std::array<int, 3> extent,
                       std::vector<int> lattice_nodes)
    : box_(box), h_(h), extent_(extent) {
  cell_volume_ = std::pow(h, box.dim);
  face_area_ = std::pow(h, box.dim - 1);
  std::size_t total = 1;
  for (int a = 0; a < box.dim; ++a) total *= static_cast<std::size_t>(extent_[a]);
  for (int a = box.dim; a < 3; ++a) extent_[a] = 1;
  row_of_.assign(total, -1);
  std::sort(lattice_nodes.begin(), lattice_nodes.end());
  lattice_nodes.erase(std::unique(lattice_nodes.begin(), lattice_nodes.end()), lattice_nodes.end());
  lattice_of_row_ = std::move(lattice_nodes);
  for (std::size_t r = 0; r < lattice_of_row_.size(); ++r) {
    row_of_[static_cast<std::size_t>(lattice_of_row_[r])] = static_cast<int>(r);
  }
  for (std::size_t r = 0; r < lattice_of_row_.size(); ++r) {
    for (int a = 0; a < box.dim; ++a) {
      for (int dir : {-1, +1}) {
        if (neighbor(static_cast<int>(r), a, dir) < 0) {
          faces_.push_back({static_cast<int>(r), a, dir});
        }
      }
    }
  }
}

std::size_t GridDomain::linear(std::array<int, 3> index) const {
  return static_cast<std::size_t>(index[0]) +
         static_cast<std::size_t>(extent_[0]) *
             (static_cast<std::size_t>(index[1]) +
              static_cast<std::size_t>(extent_[1]) * static_cast<std::size_t>(index[2]));
}

std::array<int, 3> GridDomain::lattice_index(int row) const {
  int lin = lattice_of_row_[static_cast<std::size_t>(row)];
  std::array<int, 3> idx{};
  idx[0] = lin % extent_[0];
  lin /= extent_[0];
  idx[1] = lin % extent_[1];
  idx[2] = lin / extent_[1];
  return idx;
}

Point GridDomain::coords(int row) const {
  const auto idx = lattice_index(row);
  Point p{};
  for (int a = 0; a < dim(); ++a) p[a] = box_.lo[a] + h_ * idx[a];
  return p;
}

int GridDomain::row_at(std::array<int, 3> index) const {
  for (int a = 0; a < 3; ++a) {
    if (index[a] < 0 || index[a] >= extent_[a]) return -1;
  }
  return row_of_[linear(index)];
}

int GridDomain::neighbor(int row, int axis, int dir) const {
  auto idx = lattice_index(row);
  idx[axis] += dir;
  return row_at(idx);
}

bool GridDomain::same_lattice(const GridDomain& other) const {
  return box_.dim == other.box_.dim && h_ == other.h_ && box_.lo == other.box_.lo &&
         extent_ == other.extent_;
}

bool GridDomain::same_nodes(const GridDomain& other) const {
  return same_lattice(other) && lattice_of_row_ == other.lattice_of_row_;
}

std::shared_ptr<const GridDomain> GridDomain::subdomain(std::span<const char> keep) const {
  std::vector<int> nodes;
  for (std::size_t r = 0; r < lattice_of_row_.size(); ++r) {
    if (keep[r] != 0) nodes.push_back(lattice_of_row_[r]);
  }
  if (nodes.empty()) return nullptr;
  return std::make_shared<const GridDomain>(box_, h_, extent_, std::move(nodes));
}

// ---------------------------------------------------------------------------

DomainPtr build_domain(const DomainSpec& spec, double h, const Box& box) {
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  if (box.dim < 1 || box.dim > 3) throw DomainError("dimension must be 1, 2 or 3");
  std::array<int, 3> extent{1, 1, 1};
  for (int a = 0; a < box.dim; ++a) {
    if (!(box.hi[a] > box.lo[a])) throw DomainError("degenerate bounding box");
    // Positions lo + i*h with 0 < i*h < hi - lo are strictly inside.
    const int inside = static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / h - 1e-9)) - 1;
    if (inside < 1) throw DomainError("empty domain: box narrower than one grid cell");
    extent[a] = inside + 2;
  }
  std::vector<int> nodes;
  std::array<int, 3> idx{};
  Point x{};
  for (idx[2] = 0; idx[2] < extent[2]; ++idx[2]) {
    for (idx[1] = 0; idx[1] < extent[1]; ++idx[1]) {
      for (idx[0] = 0; idx[0] < extent[0]; ++idx[0]) {
        bool interior = true;
        for (int a = 0; a < box.dim; ++a) {
          interior = interior && idx[a] >= 1 && idx[a] <= extent[a] - 2;
          x[a] = box.lo[a] + h * idx[a];
        }
        if (!interior || !box.contains_open(x) || !spec.contains(x, box)) continue;
        nodes.push_back(idx[0] + extent[0] * (idx[1] + extent[1] * idx[2]));
      }
    }
  }
  if (nodes.empty()) throw DomainError("empty domain: no grid node satisfies the domain spec");
  return std::make_shared<const GridDomain>(box, h, extent, std::move(nodes));
}

DomainPtr exhaustion(const GridDomain& dom, int k, double base_scale) {
  if (k < 1) throw DomainError("exhaustion level must be >= 1");
  if (!(base_scale > 0.0)) throw DomainError("exhaustion base scale must be positive");
  const Point c = dom.bbox().center();
  const int d = dom.dim();
  auto in_cube = [&](const Point& x, double half) {
    for (int a = 0; a < d; ++a) {
      if (!(std::fabs(x[a] - c[a]) < half)) return false;
    }
    return true;
  };
  const double half_k = k * base_scale;
  const double half_next = (k + 1) * base_scale;
  std::vector<char> keep(dom.size(), 0);
  for (std::size_t r = 0; r < dom.size(); ++r) {
    Point x = dom.coords(static_cast<int>(r));
    if (!in_cube(x, half_k)) continue;
    bool margin = true;
    for (int a = 0; a < d && margin; ++a) {
      for (int dir : {-1, +1}) {
        Point y = x;
        y[a] += dir * dom.h();
        margin = margin && in_cube(y, half_next);
      }
    }
    keep[r] = margin ? 1 : 0;
  }
  return dom.subdomain(keep);
}

DomainPtr robin_closure(const GridDomain& dom) {
  std::vector<int> nodes;
  const auto& ext = dom.extent();
  auto lin = [&](std::array<int, 3> i) { return i[0] + ext[0] * (i[1] + ext[1] * i[2]); };
  for (std::size_t r = 0; r < dom.size(); ++r) {
    const auto idx = dom.lattice_index(static_cast<int>(r));
    nodes.push_back(lin(idx));
    for (int a = 0; a < dom.dim(); ++a) {
      for (int dir : {-1, +1}) {
        auto j = idx;
        j[a] += dir;
        if (j[a] >= 0 && j[a] < ext[a]) nodes.push_back(lin(j));
      }
    }
  }
  return std::make_shared<const GridDomain>(dom.bbox(), dom.h(), ext, std::move(nodes));
}

std::vector<char> node_mask(const GridDomain& super, const GridDomain& sub) {
  if (!super.same_lattice(sub)) throw DomainError("node_mask: domains on different lattices");
  std::vector<char> mask(super.size(), 0);
  for (std::size_t r = 0; r < sub.size(); ++r) {
    const int row = super.row_at(sub.lattice_index(static_cast<int>(r)));
    if (row < 0) throw DomainError("node_mask: subdomain node outside the superset");
    mask[static_cast<std::size_t>(row)] = 1;
  }
  return mask;
}

}  // namespace semilin
