#include "semilin/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include "semilin/error.hpp"

namespace semilin {

namespace {

Expr bind_if(const Expr& e, std::string_view name, double value) {
  return e.empty() ? e : e.bind(name, value);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_vec(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

}  // namespace

void SemilinearitySpec::validate(int dim) const {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon", "epsilon must be positive");
  if (!(L >= 0.0)) throw PreconditionError("L", "L must be nonnegative");
  if (!(L0 >= L)) throw PreconditionError("L0", "L0 must be at least L");
  if (!(q >= 2.0)) throw PreconditionError("q", "q must be at least 2");
  const double dh = effective_d_hat(dim);
  if (q == dh / 2.0) throw PreconditionError("q", "q = d_hat/2 is excluded");
  if (f.empty()) throw PreconditionError("f", "the semilinearity f is missing");
}

SemilinearitySpec SemilinearitySpec::bound(double lambda1) const {
  SemilinearitySpec out = *this;
  const double lm = lmax(epsilon, lambda1);
  for (Expr* e : {&out.f, &out.h, &out.h0, &out.gamma}) {
    *e = bind_if(*e, "lambda1", lambda1);
    *e = bind_if(*e, "eps", epsilon);
    *e = bind_if(*e, "Lmax", lm);
  }
  return out;
}

double lmax(double epsilon, double lambda1) {
  if (epsilon <= 2.0 * lambda1) return epsilon / std::sqrt(lambda1);
  return 2.0 * std::sqrt(epsilon - lambda1);
}

double q_double_star(double q, double d_hat) {
  if (q == d_hat / 2.0) throw PreconditionError("q", "q = d_hat/2 is excluded");
  if (q < d_hat / 2.0) return q * d_hat / (d_hat - 2.0 * q);
  return std::numeric_limits<double>::infinity();
}

EpsilonSplit epsilon_split(double epsilon, double lambda1) {
  EpsilonSplit s{};
  s.eps1 = std::min(epsilon / 2.0, lambda1);
  s.eps2 = epsilon - s.eps1;
  s.delta1 = lambda1 > 0.0 ? s.eps1 / lambda1 : 1.0;
  return s;
}

H1Constant h1_constant(double lambda1, double epsilon, double L) {
  const double lm = lmax(epsilon, lambda1);
  if (!(L >= 0.0) || !(L < lm)) {
    throw ThresholdError("L = " + fmt(L) + " is not below Lmax = " + fmt(lm));
  }
  const auto sp = epsilon_split(epsilon, lambda1);
  H1Constant c{};
  c.rho0 = 4.0 * sp.delta1 / (4.0 * sp.delta1 * sp.eps2 - L * L);
  // ||grad u||^2 <= (lambda1 - eps)_+ ||u||^2 + L ||grad u|| ||u|| + ||h|| ||u||
  // with ||u|| <= rho0 ||h||, solved for ||grad u|| / ||h||.
  const double pos = std::max(lambda1 - epsilon, 0.0);
  const double r = c.rho0;
  c.grad = 0.5 * (L * r + std::sqrt((L * L + 4.0 * pos) * r * r + 4.0 * r));
  c.C = std::sqrt(c.grad * c.grad + r * r);
  return c;
}

MoserParams moser_params(double q, double d_hat, int terms) {
  if (!(d_hat > 2.0)) throw PreconditionError("d_hat", "Moser exponents need d_hat > 2");
  if (!(q > d_hat / 2.0)) {
    throw PreconditionError("q", "Moser sequence requires q > d_hat/2; use the p-chain otherwise");
  }
  MoserParams m{};
  m.two_star = 2.0 * d_hat / (d_hat - 2.0);
  m.q_prime = q / (q - 1.0);
  m.chi = m.two_star / (2.0 * m.q_prime);
  m.theta = (2.0 * m.chi - 2.0) / (2.0 * m.chi - 1.0);
  m.beta.reserve(static_cast<std::size_t>(terms));
  double b = 1.0;
  for (int n = 0; n < terms; ++n) {
    m.beta.push_back(b);
    b = 0.5 + m.chi * b;
  }
  m.qss = std::numeric_limits<double>::infinity();
  return m;
}

const char* to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::Coercive: return "coercive";
    case ConditionKind::Growth: return "growth";
    case ConditionKind::Monotone: return "monotone";
    case ConditionKind::Gamma0: return "gamma0";
    case ConditionKind::GammaInf: return "gammaInf";
  }
  return "?";
}

std::string Witness::describe() const {
  std::string out = "x = " + fmt_vec(x) + ", s = " + fmt(s) + ", xi = " + fmt_vec(xi);
  if (!xi2.empty()) out += ", s2 = " + fmt(s2) + ", xi2 = " + fmt_vec(xi2);
  return out + ": lhs = " + fmt(lhs) + ", rhs = " + fmt(rhs);
}

double comparison_slack(double lhs, double rhs) {
  return 1e-9 * (std::fabs(lhs) + std::fabs(rhs));
}

double Rng::normal() {
  // Box-Muller; u1 is shifted away from zero.
  const double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double eval_f(const Expr& f, std::span<const double> x, double s, std::span<const double> xi) {
  const VarLayout& lay = f.layout();
  double slots[64];
  std::vector<double> heap;
  double* p = slots;
  if (lay.size() > 64) {
    heap.resize(lay.size());
    p = heap.data();
  }
  std::fill(p, p + lay.size(), 0.0);
  double g2 = 0.0;
  const int d = lay.dim();
  for (int i = 0; i < d; ++i) {
    p[lay.x(i)] = i < static_cast<int>(x.size()) ? x[static_cast<std::size_t>(i)] : 0.0;
    const double xv = i < static_cast<int>(xi.size()) ? xi[static_cast<std::size_t>(i)] : 0.0;
    p[lay.xi(i)] = xv;
    g2 += xv * xv;
  }
  p[lay.s()] = s;
  p[lay.gnorm()] = std::sqrt(g2);
  return f.eval(std::span<const double>(p, lay.size()));
}

double eval_x(const Expr& e, std::span<const double> x) {
  if (e.empty()) return 0.0;
  return eval_f(e, x, 0.0, {});
}

double eval_s(const Expr& e, double s) {
  if (e.empty()) return 0.0;
  return eval_f(e, {}, s, {});
}

// ---------------------------------------------------------------------------

namespace {

struct Sides {
  double lhs;
  double rhs;
  double scale = 0.0;  // magnitude of terms that cancel inside lhs
};

// Every inequality is rearranged into the form lhs <= rhs.
Sides coercive_sides(const SemilinearitySpec& sp, double lambda1, std::span<const double> x,
                     double s, std::span<const double> xi) {
  const double g = std::sqrt(std::inner_product(xi.begin(), xi.end(), xi.begin(), 0.0));
  const double fs = eval_f(sp.f, x, s, xi) * s;
  const double rhs = (lambda1 - sp.epsilon) * s * s + sp.L * g * std::fabs(s) +
                     eval_x(sp.h, x) * std::fabs(s);
  return {fs, rhs};
}

Sides growth_sides(const SemilinearitySpec& sp, std::span<const double> x, double s,
                   std::span<const double> xi) {
  const double g = std::sqrt(std::inner_product(xi.begin(), xi.end(), xi.begin(), 0.0));
  const double fs = eval_f(sp.f, x, s, xi) * s;
  const double a = std::fabs(s);
  const double bound = eval_s(sp.gamma, a) * a + sp.L0 * g * a + eval_x(sp.h0, x) * a;
  // f s >= -bound  <=>  -f s <= bound
  return {-fs, bound};
}

Sides monotone_sides(const SemilinearitySpec& sp, double lambda1, std::span<const double> x,
                     double s1, std::span<const double> xi1, double s2,
                     std::span<const double> xi2) {
  const double ds = s2 - s1;
  double dg2 = 0.0;
  for (std::size_t i = 0; i < xi1.size(); ++i) dg2 += (xi2[i] - xi1[i]) * (xi2[i] - xi1[i]);
  const double f2 = eval_f(sp.f, x, s2, xi2);
  const double f1 = eval_f(sp.f, x, s1, xi1);
  const double lhs = (f2 - f1) * ds;
  const double rhs = (lambda1 - sp.epsilon) * ds * ds + sp.L * std::sqrt(dg2) * std::fabs(ds);
  return {lhs, rhs, (std::fabs(f1) + std::fabs(f2)) * std::fabs(ds)};
}

bool violates(const Sides& s) {
  return s.lhs > s.rhs + comparison_slack(s.lhs, s.rhs) + 1e-9 * s.scale;
}

std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
  std::vector<double> v;
  for (int j = 0; j < count; ++j) {
    v.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * j / (count - 1)));
  }
  return v;
}

std::vector<double> symmetric_grid(int count) {
  std::vector<double> v{0.0};
  for (double m : logspace(-6.0, 6.0, count)) {
    v.push_back(m);
    v.push_back(-m);
  }
  return v;
}

std::vector<int> strided_nodes(const GridDomain& dom, std::size_t limit) {
  std::vector<int> rows;
  const std::size_t stride = std::max<std::size_t>(1, (dom.size() + limit - 1) / limit);
  for (std::size_t r = 0; r < dom.size() && rows.size() < limit; r += stride) {
    rows.push_back(static_cast<int>(r));
  }
  return rows;
}

std::vector<double> coords_of(const GridDomain& dom, int row) {
  const Point p = dom.coords(row);
  return {p.begin(), p.begin() + dom.dim()};
}

std::vector<double> random_direction(Rng& rng, int d) {
  std::vector<double> v(static_cast<std::size_t>(d));
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& c : v) {
      c = rng.normal();
      n2 += c * c;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (double& c : v) c *= inv;
  return v;
}

std::vector<double> scaled(const std::vector<double>& dir, double m) {
  std::vector<double> v = dir;
  for (double& c : v) c *= m;
  return v;
}

double random_magnitude(Rng& rng) { return std::pow(10.0, -6.0 + 12.0 * rng.uniform()); }

// Evaluates a sample; expression errors are re-raised with the point attached.
template <class Fn>
Sides guarded(Fn fn, const Witness& at) {
  try {
    return fn();
  } catch (const ExprError& e) {
    throw ExprError(e.kind(), std::string(e.what()) + " at sample " + at.describe(), e.position(),
                    e.identifier());
  }
}

}  // namespace

bool witness_violates(ConditionKind kind, const SemilinearitySpec& spec, double lambda1,
                      const Witness& w) {
  switch (kind) {
    case ConditionKind::Coercive: return violates(coercive_sides(spec, lambda1, w.x, w.s, w.xi));
    case ConditionKind::Growth: return violates(growth_sides(spec, w.x, w.s, w.xi));
    case ConditionKind::Monotone:
      return violates(monotone_sides(spec, lambda1, w.x, w.s, w.xi, w.s2, w.xi2));
    case ConditionKind::Gamma0:
    case ConditionKind::GammaInf: return w.lhs > w.rhs;
  }
  return false;
}

FalsifyResult falsify_condition(ConditionKind kind, const SemilinearitySpec& spec,
                                const GridDomain& dom, double lambda1,
                                const FalsifyOptions& options) {
  if (options.budget < 1) throw PreconditionError("budget", "falsifier budget must be >= 1");
  FalsifyResult res;
  res.kind = kind;
  const int d = dom.dim();

  if (kind == ConditionKind::Gamma0 || kind == ConditionKind::GammaInf) {
    double power = 1.0;
    std::vector<double> range;
    if (kind == ConditionKind::Gamma0) {
      if (!options.force_gamma0) {
        res.skipped = true;
        res.note = "not required on a finite-measure domain";
        return res;
      }
      range = logspace(-8.0, -2.0, 41);
    } else {
      const double qss = q_double_star(spec.q, spec.effective_d_hat(d));
      if (std::isinf(qss)) {
        res.skipped = true;
        res.note = "not required for q > d_hat/2";
        return res;
      }
      power = qss / 2.0;
      range = logspace(2.0, 8.0, 41);
    }
    for (double s : range) {
      ++res.samples;
      const double ratio = eval_s(spec.gamma, s) / std::pow(s, power);
      if (!(ratio <= options.gamma_cap)) {
        res.pass = false;
        Witness w;
        w.s = s;
        w.lhs = ratio;
        w.rhs = options.gamma_cap;
        res.witness = w;
        return res;
      }
    }
    return res;
  }

  auto check = [&](Witness w, auto sides_fn) {
    ++res.samples;
    const Sides sd = guarded(sides_fn, w);
    if (violates(sd)) {
      w.lhs = sd.lhs;
      w.rhs = sd.rhs;
      res.pass = false;
      res.witness = std::move(w);
      return true;
    }
    return false;
  };

  Rng rng(options.seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(kind) + 1)));
  std::vector<double> diag_dir(static_cast<std::size_t>(d), -1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> e1(static_cast<std::size_t>(d), 0.0);
  e1[0] = 1.0;

  if (kind == ConditionKind::Coercive || kind == ConditionKind::Growth) {
    auto sides = [&](const Witness& w) {
      return kind == ConditionKind::Coercive ? coercive_sides(spec, lambda1, w.x, w.s, w.xi)
                                             : growth_sides(spec, w.x, w.s, w.xi);
    };
    std::vector<double> mags{0.0};
    for (double m : logspace(-6.0, 6.0, 41)) mags.push_back(m);
    const auto svals = symmetric_grid(41);
    for (int row : strided_nodes(dom, 16)) {
      const auto x = coords_of(dom, row);
      for (double s : svals) {
        for (double m : mags) {
          for (const auto* dir : {&e1, &diag_dir}) {
            Witness w;
            w.x = x;
            w.s = s;
            w.xi = scaled(*dir, m);
            if (check(w, [&] { return sides(w); })) return res;
            if (m == 0.0) break;
          }
        }
      }
    }
    for (int i = 0; i < options.budget; ++i) {
      Witness w;
      const auto row = static_cast<int>(rng.next() % dom.size());
      w.x = coords_of(dom, row);
      w.s = (rng.uniform() < 0.5 ? -1.0 : 1.0) * random_magnitude(rng);
      const auto dir = random_direction(rng, d);
      w.xi = rng.uniform() < 0.125 ? scaled(dir, 0.0) : scaled(dir, random_magnitude(rng));
      if (check(w, [&] { return sides(w); })) return res;
    }
    return res;
  }

  // Monotone: pairs (s1, xi1), (s2, xi2) at a common x.
  auto sides = [&](const Witness& w) {
    return monotone_sides(spec, lambda1, w.x, w.s, w.xi, w.s2, w.xi2);
  };
  const auto svals = symmetric_grid(11);
  const std::vector<double> mags{0.0, 1e-6, 1e-3, 1.0, 1e3, 1e6};
  std::vector<double> neg_e1 = scaled(e1, -1.0);
  for (int row : strided_nodes(dom, 8)) {
    const auto x = coords_of(dom, row);
    for (double s1 : svals) {
      for (double s2 : svals) {
        for (double m1 : mags) {
          for (double m2 : mags) {
            for (const auto* dir : {&e1, &neg_e1}) {
              Witness w;
              w.x = x;
              w.s = s1;
              w.xi = scaled(e1, m1);
              w.s2 = s2;
              w.xi2 = scaled(*dir, m2);
              if (check(w, [&] { return sides(w); })) return res;
            }
          }
        }
      }
    }
  }
  for (int i = 0; i < options.budget; ++i) {
    Witness w;
    const auto row = static_cast<int>(rng.next() % dom.size());
    w.x = coords_of(dom, row);
    w.s = (rng.uniform() < 0.5 ? -1.0 : 1.0) * random_magnitude(rng);
    w.xi = scaled(random_direction(rng, d), random_magnitude(rng));
    // Half of the pairs are close to each other to probe local slopes.
    if (rng.uniform() < 0.5) {
      const double rel = random_magnitude(rng) * 1e-6;
      w.s2 = w.s * (1.0 + (rng.uniform() - 0.5) * rel) + (rng.uniform() - 0.5) * rel;
      w.xi2 = w.xi;
      for (double& c : w.xi2) c += (rng.uniform() - 0.5) * rel * (1.0 + std::fabs(c));
    } else {
      w.s2 = (rng.uniform() < 0.5 ? -1.0 : 1.0) * random_magnitude(rng);
      w.xi2 = scaled(random_direction(rng, d), random_magnitude(rng));
    }
    if (check(w, [&] { return sides(w); })) return res;
  }
  return res;
}

}  // namespace semilin
