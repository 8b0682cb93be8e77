#include "semilin/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "semilin/error.hpp"

namespace semilin {

Field::Field(DomainPtr dom, int components, bool complex)
    : dom_(std::move(dom)), components_(components), complex_(complex) {
  if (!dom_) throw DomainError("field on a null domain");
  if (components < 1) throw DomainError("field needs at least one component");
  const std::size_t n = dom_->size() * static_cast<std::size_t>(components);
  real_.assign(n, 0.0);
  if (complex) imag_.assign(n, 0.0);
}

Field::Field(DomainPtr dom, std::vector<double> values, int components)
    : dom_(std::move(dom)), components_(components), real_(std::move(values)) {
  if (!dom_) throw DomainError("field on a null domain");
  if (real_.size() != dom_->size() * static_cast<std::size_t>(components)) {
    throw DomainError("field length does not match components * nodes");
  }
}

void Field::check_finite() const {
  for (std::size_t i = 0; i < real_.size(); ++i) {
    if (!std::isfinite(real_[i]) || (!imag_.empty() && !std::isfinite(imag_[i]))) {
      throw DomainError("non-finite field entry at index " + std::to_string(i));
    }
  }
}

bool bit_identical(const Field& a, const Field& b) {
  if (a.components() != b.components() || a.is_complex() != b.is_complex()) return false;
  if (!a.domain() || !b.domain() || !a.domain()->same_nodes(*b.domain())) return false;
  auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() &&
           (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  };
  return same(a.values(), b.values()) && same(a.imag(), b.imag());
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "EFLD writer assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("truncated EFLD file: " + path);
  return v;
}

}  // namespace

void write_efld(const Field& u, const std::string& path) {
  if (path.empty()) throw IoError("empty output path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  const GridDomain& dom = *u.domain();
  out.write("EFLD", 4);
  put<std::uint32_t>(out, u.is_complex() ? 2u : 1u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dom.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(u.components()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(dom.size()));
  put<double>(out, dom.h());
  for (int a = 0; a < dom.dim(); ++a) put<double>(out, dom.bbox().lo[a]);
  for (int a = 0; a < dom.dim(); ++a) put<double>(out, dom.bbox().hi[a]);
  const auto& re = u.values();
  const auto& im = u.imag();
  for (std::size_t i = 0; i < re.size(); ++i) {
    put<double>(out, re[i]);
    if (u.is_complex()) put<double>(out, im.empty() ? 0.0 : im[i]);
  }
  if (!out) throw IoError("write failed: " + path);
}

Field read_efld(const std::string& path, DomainPtr dom) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "EFLD", 4) != 0) {
    throw IoError("not an EFLD file: " + path);
  }
  const auto version = get<std::uint32_t>(in, path);
  const auto d = get<std::uint32_t>(in, path);
  const auto c = get<std::uint32_t>(in, path);
  const auto n = get<std::uint64_t>(in, path);
  const auto h = get<double>(in, path);
  if (version != 1 && version != 2) throw IoError("unsupported EFLD version in " + path);
  if (static_cast<int>(d) != dom->dim() || n != dom->size() || h != dom->h() || c < 1) {
    throw IoError("EFLD header does not match the domain: " + path);
  }
  for (int side = 0; side < 2; ++side) {
    for (std::uint32_t a = 0; a < d; ++a) {
      const double v = get<double>(in, path);
      const double expect = side == 0 ? dom->bbox().lo[a] : dom->bbox().hi[a];
      if (v != expect) throw IoError("EFLD bounding box does not match the domain: " + path);
    }
  }
  Field u(dom, static_cast<int>(c), version == 2);
  for (std::size_t i = 0; i < u.values().size(); ++i) {
    u.values()[i] = get<double>(in, path);
    if (version == 2) u.imag()[i] = get<double>(in, path);
  }
  return u;
}

void write_csv(const Field& u, const std::string& path) {
  if (path.empty()) throw IoError("empty output path");
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open for writing: " + path);
  const GridDomain& dom = *u.domain();
  const int d = dom.dim();
  const int c = u.components();
  for (int a = 0; a < d; ++a) std::fprintf(fp, "x%d,", a + 1);
  if (c == 1) {
    std::fputs(u.is_complex() ? "value,value_im\n" : "value\n", fp);
  } else {
    for (int k = 0; k < c; ++k) {
      std::fprintf(fp, "value%d%s", k + 1, u.is_complex() ? "," : (k + 1 < c ? "," : "\n"));
      if (u.is_complex()) std::fprintf(fp, "value%d_im%s", k + 1, k + 1 < c ? "," : "\n");
    }
  }
  for (std::size_t r = 0; r < dom.size(); ++r) {
    const Point x = dom.coords(static_cast<int>(r));
    for (int a = 0; a < d; ++a) std::fprintf(fp, "%.17g,", x[a]);
    for (int k = 0; k < c; ++k) {
      const std::size_t i = r * static_cast<std::size_t>(c) + static_cast<std::size_t>(k);
      std::fprintf(fp, "%.17g", u.values()[i]);
      if (u.is_complex()) std::fprintf(fp, ",%.17g", u.imag().empty() ? 0.0 : u.imag()[i]);
      std::fputc(k + 1 < c ? ',' : '\n', fp);
    }
  }
  const bool ok = std::ferror(fp) == 0;
  std::fclose(fp);
  if (!ok) throw IoError("write failed: " + path);
}

}  // namespace semilin
