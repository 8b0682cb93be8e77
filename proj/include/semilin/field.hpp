#pragma once

#include <string>
#include <vector>

#include "semilin/domain.hpp"

namespace semilin {

/// Grid function on the nodes of a domain. Vector fields store their c
/// components node-major: value(row, comp) = values()[row*c + comp]. Complex
/// fields keep the imaginary parts in a parallel array.
class Field {
 public:
  Field() = default;
  explicit Field(DomainPtr dom, int components = 1, bool complex = false);
  Field(DomainPtr dom, std::vector<double> values, int components = 1);

  const DomainPtr& domain() const noexcept { return dom_; }
  int components() const noexcept { return components_; }
  bool is_complex() const noexcept { return !imag_.empty() || complex_; }
  std::size_t nodes() const noexcept { return dom_ ? dom_->size() : 0; }

  std::vector<double>& values() noexcept { return real_; }
  const std::vector<double>& values() const noexcept { return real_; }
  std::vector<double>& imag() noexcept { return imag_; }
  const std::vector<double>& imag() const noexcept { return imag_; }

  double& operator[](std::size_t i) { return real_[i]; }
  double operator[](std::size_t i) const { return real_[i]; }
  double& at(int row, int comp = 0) {
    return real_[static_cast<std::size_t>(row) * static_cast<std::size_t>(components_) +
                 static_cast<std::size_t>(comp)];
  }
  double at(int row, int comp = 0) const {
    return real_[static_cast<std::size_t>(row) * static_cast<std::size_t>(components_) +
                 static_cast<std::size_t>(comp)];
  }

  /// Throws DomainError unless every entry is finite.
  void check_finite() const;

 private:
  DomainPtr dom_;
  int components_ = 1;
  bool complex_ = false;
  std::vector<double> real_;
  std::vector<double> imag_;
};

/// Bitwise equality of values and metadata; domains compared by node set.
bool bit_identical(const Field& a, const Field& b);

/// Little-endian binary layout: "EFLD", u32 version (1 real, 2 complex),
/// u32 d, u32 c, u64 N, f64 h, f64 lo[d], f64 hi[d], then c*N values (or
/// c*N (re, im) pairs for version 2).
void write_efld(const Field& u, const std::string& path);
/// Reads a field written by write_efld; the header must match `dom`.
Field read_efld(const std::string& path, DomainPtr dom);
/// Header `x1,...,xd,value[,value_im]`; vector fields use value1..valuec.
void write_csv(const Field& u, const std::string& path);

}  // namespace semilin
