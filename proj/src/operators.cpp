#include "semilin/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "semilin/error.hpp"

namespace semilin {

SparseOperator SparseOperator::from_triplets(std::size_t n, std::vector<Triplet> entries,
                                             bool symmetric) {
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator op;
  op.n_ = n;
  op.symmetric_ = symmetric;
  op.offsets_.assign(n + 1, 0);
  int last_row = -1;
  for (const auto& t : entries) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
        static_cast<std::size_t>(t.col) >= n) {
      throw DomainError("sparse entry out of range");
    }
    if (last_row == t.row && op.cols_.back() == t.col) {
      op.values_.back() += t.value;
    } else {
      op.cols_.push_back(t.col);
      op.values_.push_back(t.value);
      ++op.offsets_[static_cast<std::size_t>(t.row) + 1];
      last_row = t.row;
    }
  }
  for (std::size_t i = 0; i < n; ++i) op.offsets_[i + 1] += op.offsets_[i];
  return op;
}

SparseOperator SparseOperator::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
  return from_triplets(n, std::move(t), true);
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      acc += values_[k] * x[static_cast<std::size_t>(cols_[k])];
    }
    y[i] = acc;
  }
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const {
  std::vector<double> y(n_);
  apply(x, y);
  return y;
}

double SparseOperator::entry(std::size_t i, std::size_t j) const {
  const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

double SparseOperator::diagonal(std::size_t i) const { return entry(i, i); }

std::vector<double> SparseOperator::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = diagonal(i);
  return d;
}

SparseOperator SparseOperator::shifted(double sigma) const {
  std::vector<Triplet> t;
  t.reserve(values_.size() + n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      t.push_back({static_cast<int>(i), cols_[k], values_[k]});
    }
    t.push_back({static_cast<int>(i), static_cast<int>(i), sigma});
  }
  return from_triplets(n_, std::move(t), symmetric_);
}

bool SparseOperator::check_symmetry() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols_[k]);
      if (std::bit_cast<std::uint64_t>(entry(j, i)) != std::bit_cast<std::uint64_t>(values_[k])) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

SparseOperator assemble_dirichlet_laplacian(const GridDomain& dom) {
  const double inv_h2 = 1.0 / (dom.h() * dom.h());
  std::vector<Triplet> t;
  t.reserve(dom.size() * static_cast<std::size_t>(2 * dom.dim() + 1));
  for (std::size_t r = 0; r < dom.size(); ++r) {
    const int row = static_cast<int>(r);
    t.push_back({row, row, 2.0 * dom.dim() * inv_h2});
    for (int a = 0; a < dom.dim(); ++a) {
      for (int dir : {-1, +1}) {
        const int nb = dom.neighbor(row, a, dir);
        if (nb >= 0) t.push_back({row, nb, -inv_h2});
      }
    }
  }
  return SparseOperator::from_triplets(dom.size(), std::move(t), true);
}

namespace {

std::vector<double> robin_face_weights(const GridDomain& closure, const Expr& beta) {
  for (const auto& name : beta.free_variables()) {
    if (name.size() < 2 || name[0] != 'x' || name[1] == 'i') {
      throw DomainError("Robin coefficient may only reference x-variables, found '" + name + "'");
    }
  }
  std::vector<double> slots(beta.layout().size(), 0.0);
  std::vector<double> w;
  w.reserve(closure.boundary_faces().size());
  for (const auto& f : closure.boundary_faces()) {
    Point x = closure.coords(f.row);
    x[f.axis] += 0.5 * f.dir * closure.h();
    for (int a = 0; a < closure.dim(); ++a) slots[static_cast<std::size_t>(a)] = x[a];
    const double b = beta.eval(slots);
    if (!(b >= 0.0)) {
      std::string where;
      for (int a = 0; a < closure.dim(); ++a) where += (a ? ", " : "") + std::to_string(x[a]);
      throw DomainError("negative Robin coefficient " + std::to_string(b) + " at face (" +
                        where + ")");
    }
    w.push_back(b);
  }
  return w;
}

SparseOperator robin_operator(const GridDomain& closure, const std::vector<double>& weights) {
  const double inv_h2 = 1.0 / (closure.h() * closure.h());
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < closure.size(); ++r) {
    const int row = static_cast<int>(r);
    for (int a = 0; a < closure.dim(); ++a) {
      for (int dir : {-1, +1}) {
        const int nb = closure.neighbor(row, a, dir);
        if (nb >= 0) {
          t.push_back({row, row, inv_h2});
          t.push_back({row, nb, -inv_h2});
        }
      }
    }
  }
  const auto& faces = closure.boundary_faces();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    t.push_back({faces[i].row, faces[i].row, weights[i] / closure.h()});
  }
  return SparseOperator::from_triplets(closure.size(), std::move(t), true);
}

}  // namespace

SparseOperator assemble_robin_form(const GridDomain& dom, const Expr& beta) {
  const DomainPtr closure = robin_closure(dom);
  return robin_operator(*closure, robin_face_weights(*closure, beta));
}

Discretization make_dirichlet(DomainPtr dom) {
  Discretization d;
  d.stiffness = assemble_dirichlet_laplacian(*dom);
  d.nodes = std::move(dom);
  d.kind = BoundaryKind::Dirichlet;
  return d;
}

Discretization make_robin(DomainPtr dom, const Expr& beta) {
  Discretization d;
  d.nodes = robin_closure(*dom);
  d.face_weight = robin_face_weights(*d.nodes, beta);
  d.stiffness = robin_operator(*d.nodes, d.face_weight);
  d.kind = BoundaryKind::Robin;
  d.beta = beta;
  return d;
}

// ---------------------------------------------------------------------------

namespace {

template <class Visit>
void forward_differences(const Discretization& disc, std::span<const double> u, Visit visit) {
  const GridDomain& dom = *disc.nodes;
  const double inv_h = 1.0 / dom.h();
  const bool dirichlet = disc.kind == BoundaryKind::Dirichlet;
  for (std::size_t r = 0; r < dom.size(); ++r) {
    for (int a = 0; a < dom.dim(); ++a) {
      const int nb = dom.neighbor(static_cast<int>(r), a, +1);
      double g = 0.0;
      if (nb >= 0) {
        g = (u[static_cast<std::size_t>(nb)] - u[r]) * inv_h;
      } else if (dirichlet) {
        g = -u[r] * inv_h;
      }
      visit(r, a, g);
    }
  }
}

}  // namespace

Field apply_gradient(const Discretization& disc, const Field& u) {
  if (u.components() != 1 || u.nodes() != disc.nodes->size()) {
    throw DomainError("apply_gradient expects a scalar field on the discretization nodes");
  }
  const int d = disc.nodes->dim();
  Field g(disc.nodes, d);
  forward_differences(disc, u.values(), [&](std::size_t r, int a, double v) {
    g.at(static_cast<int>(r), a) = v;
  });
  return g;
}

Field apply_gradient(const GridDomain& dom, const Field& u) {
  Discretization disc;
  disc.nodes = u.domain();
  if (!disc.nodes || !disc.nodes->same_nodes(dom)) {
    throw DomainError("apply_gradient: field lives on a different domain");
  }
  return apply_gradient(disc, u);
}

std::vector<double> gradient_magnitude(const Discretization& disc, std::span<const double> u) {
  std::vector<double> sq(disc.nodes->size(), 0.0);
  forward_differences(disc, u, [&](std::size_t r, int, double v) { sq[r] += v * v; });
  for (double& s : sq) s = std::sqrt(s);
  return sq;
}

double edge_energy(const Discretization& disc, std::span<const double> u) {
  const GridDomain& dom = *disc.nodes;
  double edges = 0.0;
  double faces = 0.0;
  for (std::size_t r = 0; r < dom.size(); ++r) {
    for (int a = 0; a < dom.dim(); ++a) {
      const int nb = dom.neighbor(static_cast<int>(r), a, +1);
      if (nb >= 0) {
        const double diff = u[static_cast<std::size_t>(nb)] - u[r];
        edges += diff * diff;
      }
    }
  }
  const auto& fl = dom.boundary_faces();
  for (std::size_t i = 0; i < fl.size(); ++i) {
    const double v = u[static_cast<std::size_t>(fl[i].row)];
    if (disc.kind == BoundaryKind::Dirichlet) {
      edges += v * v;
    } else {
      faces += disc.face_weight[i] * v * v;
    }
  }
  return edges * std::pow(dom.h(), dom.dim() - 2) + faces * dom.face_area();
}

double energy_product(const Discretization& disc, std::span<const double> u,
                      std::span<const double> v) {
  const auto ku = disc.stiffness.apply(u);
  double acc = 0.0;
  for (std::size_t i = 0; i < ku.size(); ++i) acc += ku[i] * v[i];
  return acc * disc.nodes->cell_volume();
}

}  // namespace semilin
