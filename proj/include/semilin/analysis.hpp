#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semilin/field.hpp"
#include "semilin/operators.hpp"

namespace semilin {

/// (sum |u|^p h^d)^(1/p); p = +inf gives max |u|. Evaluated as
/// max|u| * (sum (|u|/max|u|)^p h^d)^(1/p) to avoid overflow.
double lp_norm(const GridDomain& dom, std::span<const double> u, double p);
double lp_norm(const Field& u, double p);

/// M(r) = max(||u||_2, ||u||_r).
double moser_M(const Field& u, double r);
/// rho(p) = M(p) + ||h||_p.
double moser_rho(const Field& u, const Field& h, double p);

struct Check {
  std::string name;
  std::string claim;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::pair<std::string, double>> measured;
  double margin = 0.0;
  std::string note;

  bool pass() const { return margin >= 0.0; }
};

/// margin = min_i min(u - vlow, vup - u) + tol, so PASS iff the raw margin
/// is at least -tol. The raw margin and the worst node are recorded.
Check verify_domination(const Field& u, const Field& vlow, const Field& vup, double tol);

/// margin = C ||h||_2 - ||u||_H1 with the energy of `disc`.
Check verify_h1_bound(const Discretization& disc, const Field& u, const Field& hdata, double C);

struct MoserStep {
  double p;         // integrability exponent of the data side
  double beta;
  double target;    // 2* beta, the exponent bounded by the step
  double M_target;  // M(2* beta)
  double ratio;     // the constant this step requires
};

struct MoserChainReport {
  std::string regime;  // "p-chain" (q < d_hat/2) or "beta" (q > d_hat/2)
  double qss = 0.0;
  double two_star = 0.0;
  double chi = 0.0;
  double theta = 0.0;
  std::vector<double> exponents;  // chain of r values, starting at 2
  std::vector<double> norms;      // M(r) along the chain
  std::vector<MoserStep> steps;
  double c1_raw = 0.0;     // smallest constant along the chain
  double c1_fitted = 0.0;  // max(1, c1_raw): admissible constants are >= 1
  bool degenerate = false; // u = 0: no constant is determined
  double ratio = 0.0;      // ||u||_{q**} / (||u||_2 + ||h||_q)
  bool finite = true;
  bool monotone = true;
};

/// Evaluates the recursion inequality M(2*b)^(2b) <= C1 b^2 rho(p) M(p'(2b-1))^(2b-1)
/// along the exponent chain and fits C1. Rejects q = d_hat/2 and d_hat <= 2.
MoserChainReport moser_chain(const Field& u, const Field& hdata, double q, double d_hat);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(std::string_view text);

class Certificate {
 public:
  void add(Check check) { checks_.push_back(std::move(check)); }
  const std::vector<Check>& checks() const noexcept { return checks_; }
  bool all_pass() const;

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_config_hash(std::uint64_t hash) { hash_ = hash; }
  void add_note(std::string note) { notes_.push_back(std::move(note)); }

  /// key: value lines for every check.
  std::string render_human() const;
  /// One `check = {name = "...", margin = ..., verdict = "..."}` line per
  /// check, plus seed and config hash. Contains nothing run-dependent.
  std::string render_machine() const;

 private:
  std::vector<Check> checks_;
  std::vector<std::string> notes_;
  std::uint64_t seed_ = 0;
  std::uint64_t hash_ = 0;
};

}  // namespace semilin
