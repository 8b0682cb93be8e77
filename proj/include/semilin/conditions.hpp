#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "semilin/domain.hpp"
#include "semilin/expr.hpp"

namespace semilin {

/// Problem data of the semilinearity. `f` is an expression in (x, s, xi,
/// gnorm); `h`, `h0` in x; `gamma` in s. Expressions must have every extra
/// name (lambda1, eps, Lmax) bound before evaluation.
struct SemilinearitySpec {
  Expr f;
  Expr h;
  Expr h0;
  Expr gamma;
  double epsilon = 1.0;
  double L = 0.0;
  double L0 = 0.0;
  double q = 2.0;
  double d_hat = 0.0;  // 0 means "use the grid dimension"

  /// Throws PreconditionError on violated scalar invariants.
  void validate(int dim) const;
  double effective_d_hat(int dim) const { return d_hat > 0.0 ? d_hat : dim; }

  /// Substitutes lambda1, eps and Lmax into all four expressions.
  SemilinearitySpec bound(double lambda1) const;
};

/// Threshold on L: eps/sqrt(lambda1) if eps <= 2 lambda1, else 2 sqrt(eps - lambda1).
double lmax(double epsilon, double lambda1);

/// q*d/(d-2q) for q < d/2, +inf for q > d/2; q = d/2 is rejected.
double q_double_star(double q, double d_hat);

struct EpsilonSplit {
  double eps1;
  double eps2;
  double delta1;
};

EpsilonSplit epsilon_split(double epsilon, double lambda1);

struct H1Constant {
  double rho0;  // ||u||_2 <= rho0 ||h||_2
  double C;     // ||u||_H1 <= C ||h||_2
  double grad;  // ||grad u||_2 <= grad ||h||_2
};

/// Throws ThresholdError when L >= lmax(epsilon, lambda1).
H1Constant h1_constant(double lambda1, double epsilon, double L);

struct MoserParams {
  double two_star;
  double q_prime;
  double chi;
  double theta;
  std::vector<double> beta;  // beta_0 .. beta_39
  double qss;                // +inf
};

/// Requires q > d_hat/2 and d_hat > 2.
MoserParams moser_params(double q, double d_hat, int terms = 40);

enum class ConditionKind { Coercive, Growth, Monotone, Gamma0, GammaInf };
const char* to_string(ConditionKind kind);

struct Witness {
  std::vector<double> x;
  double s = 0.0;
  std::vector<double> xi;
  double s2 = 0.0;          // Monotone only
  std::vector<double> xi2;  // Monotone only
  double lhs = 0.0;
  double rhs = 0.0;
  std::string describe() const;
};

struct FalsifyOptions {
  int budget = 2000;
  std::uint64_t seed = 12345;
  double gamma_cap = 1e6;
  /// gamma0 is skipped on finite-measure domains unless this is set.
  bool force_gamma0 = false;
};

struct FalsifyResult {
  ConditionKind kind;
  bool pass = true;
  bool skipped = false;
  long samples = 0;
  std::optional<Witness> witness;
  std::string note;
};

/// Sampling falsifier. A PASS means no violation was found within the
/// structured grid plus `budget` random samples.
FalsifyResult falsify_condition(ConditionKind kind, const SemilinearitySpec& spec,
                                const GridDomain& dom, double lambda1,
                                const FalsifyOptions& options = {});

/// Re-evaluates a witness independently; true when it violates the
/// inequality by more than the slack.
bool witness_violates(ConditionKind kind, const SemilinearitySpec& spec, double lambda1,
                      const Witness& w);

/// Slack used by all comparisons: 1e-9 * (|lhs| + |rhs|). The monotone check
/// adds 1e-9 * (|f1| + |f2|) * |s2 - s1| for the differenced values.
double comparison_slack(double lhs, double rhs);

/// mt19937_64 with hand-rolled uniform/normal transforms, so sample
/// streams do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Evaluates f at node coordinates x with state s and gradient xi.
double eval_f(const Expr& f, std::span<const double> x, double s, std::span<const double> xi);
double eval_x(const Expr& e, std::span<const double> x);
double eval_s(const Expr& e, double s);

}  // namespace semilin
