#pragma once

#include <span>
#include <vector>

#include "semilin/domain.hpp"
#include "semilin/expr.hpp"
#include "semilin/field.hpp"

namespace semilin {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Square matrix in compressed sparse row form. Column indices are sorted
/// within each row and duplicates summed, so products are deterministic.
class SparseOperator {
 public:
  SparseOperator() = default;
  static SparseOperator from_triplets(std::size_t n, std::vector<Triplet> entries,
                                      bool symmetric);
  static SparseOperator identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool symmetric() const noexcept { return symmetric_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  double diagonal(std::size_t i) const;
  std::vector<double> diagonal() const;
  /// Entry (i, j); zero when not stored.
  double entry(std::size_t i, std::size_t j) const;
  /// A + sigma*I.
  SparseOperator shifted(double sigma) const;
  /// True when every stored (i,j) has a bit-identical (j,i) partner.
  bool check_symmetry() const;

  const std::vector<std::size_t>& row_offsets() const noexcept { return offsets_; }
  const std::vector<int>& columns() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t n_ = 0;
  bool symmetric_ = false;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

enum class BoundaryKind { Dirichlet, Robin };

/// Unknown node set plus the stiffness operator K whose form is
/// <K u, u> h^d = energy(u). In Robin mode the nodes are robin_closure(dom).
struct Discretization {
  DomainPtr nodes;
  SparseOperator stiffness;
  BoundaryKind kind = BoundaryKind::Dirichlet;
  Expr beta;                         // Robin only
  std::vector<double> face_weight;   // Robin: beta(face) per boundary face of `nodes`
};

/// (2d+1)-point operator with zero exterior values: diagonal 2d/h^2.
SparseOperator assemble_dirichlet_laplacian(const GridDomain& dom);

/// Operator on robin_closure(dom): edge Laplacian without zero extension
/// plus beta(face midpoint)/h on the diagonal for every boundary face.
/// `beta` may reference x1..xd only; negative values raise DomainError.
SparseOperator assemble_robin_form(const GridDomain& dom, const Expr& beta);

Discretization make_dirichlet(DomainPtr dom);
Discretization make_robin(DomainPtr dom, const Expr& beta);

/// Forward differences (u(node + h e_i) - u(node)) / h. Missing neighbours
/// count as zero values (Dirichlet) or contribute a zero component (Robin).
Field apply_gradient(const Discretization& disc, const Field& u);
/// Dirichlet convenience overload.
Field apply_gradient(const GridDomain& dom, const Field& u);

/// Euclidean norm of the forward-difference gradient at every node.
std::vector<double> gradient_magnitude(const Discretization& disc, std::span<const double> u);

/// Energy as an explicit sum over lattice edges (including edges to Dirichlet
/// exterior nodes on both sides) and Robin faces, h^d-weighted. Equals
/// <K u, u> h^d by summation by parts.
double edge_energy(const Discretization& disc, std::span<const double> u);
/// <K u, v> h^d.
double energy_product(const Discretization& disc, std::span<const double> u,
                      std::span<const double> v);

}  // namespace semilin
