#include "semilin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "semilin/conditions.hpp"
#include "semilin/error.hpp"
#include "semilin/semilinear.hpp"

namespace semilin {

double lp_norm(const GridDomain& dom, std::span<const double> u, double p) {
  if (!(p >= 1.0)) throw PreconditionError("p", "lp_norm requires p >= 1");
  double m = 0.0;
  for (double v : u) m = std::max(m, std::fabs(v));
  if (std::isinf(p) || m == 0.0) return m;
  double acc = 0.0;
  for (double v : u) acc += std::pow(std::fabs(v) / m, p);
  return m * std::pow(acc * dom.cell_volume(), 1.0 / p);
}

double lp_norm(const Field& u, double p) { return lp_norm(*u.domain(), u.values(), p); }

double moser_M(const Field& u, double r) { return std::max(lp_norm(u, 2.0), lp_norm(u, r)); }

double moser_rho(const Field& u, const Field& h, double p) {
  return moser_M(u, p) + lp_norm(h, p);
}

Check verify_domination(const Field& u, const Field& vlow, const Field& vup, double tol) {
  if (!u.domain() || !vlow.domain() || !vup.domain() || !u.domain()->same_nodes(*vlow.domain()) ||
      !u.domain()->same_nodes(*vup.domain())) {
    throw DomainError("verify_domination: fields live on different domains");
  }
  double margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < u.nodes(); ++i) {
    const double m = std::min(u[i] - vlow[i], vup[i] - u[i]);
    if (m < margin) {
      margin = m;
      worst = i;
    }
  }
  Check c;
  c.name = "domination";
  c.claim = "vlow <= u <= vup (a priori domination)";
  c.constants = {{"tol", tol}};
  c.measured = {{"raw_margin", margin}, {"worst_node", static_cast<double>(worst)}};
  const Point x = u.domain()->coords(static_cast<int>(worst));
  c.measured.emplace_back("worst_x1", x[0]);
  if (u.domain()->dim() > 1) c.measured.emplace_back("worst_x2", x[1]);
  c.margin = margin + tol;
  return c;
}

Check verify_h1_bound(const Discretization& disc, const Field& u, const Field& hdata, double C) {
  const double hu = h1_norm(disc, u.values());
  const double hn = lp_norm(hdata, 2.0);
  Check c;
  c.name = "h1_bound";
  c.claim = "||u||_H1 <= C ||h||_2 (a priori energy bound)";
  c.constants = {{"C", C}};
  c.measured = {{"h1_norm_u", hu}, {"l2_norm_h", hn}};
  c.margin = C * hn - hu;
  return c;
}

MoserChainReport moser_chain(const Field& u, const Field& hdata, double q, double d_hat) {
  if (q == d_hat / 2.0) throw PreconditionError("q", "q = d_hat/2 is excluded");
  if (!(d_hat > 2.0)) throw PreconditionError("d_hat", "Moser chain needs d_hat > 2");
  MoserChainReport rep;
  rep.two_star = 2.0 * d_hat / (d_hat - 2.0);
  rep.qss = q_double_star(q, d_hat);
  rep.exponents.push_back(2.0);
  rep.norms.push_back(moser_M(u, 2.0));
  rep.degenerate = lp_norm(u, std::numeric_limits<double>::infinity()) == 0.0;

  auto add_step = [&](double p, double beta, double target, double M_prev) {
    MoserStep s;
    s.p = p;
    s.beta = beta;
    s.target = target;
    s.M_target = moser_M(u, target);
    const double rho = moser_rho(u, hdata, p);
    if (rep.degenerate || rho == 0.0) {
      s.ratio = 0.0;
    } else {
      // log of M(t)^(2b) / (b^2 rho M_prev^(2b-1))
      const double lg = 2.0 * beta * std::log(s.M_target) - 2.0 * std::log(beta) - std::log(rho) -
                        (2.0 * beta - 1.0) * std::log(M_prev);
      s.ratio = std::exp(lg);
    }
    rep.steps.push_back(s);
    rep.exponents.push_back(target);
    rep.norms.push_back(s.M_target);
  };

  if (q < d_hat / 2.0) {
    rep.regime = "p-chain";
    double p = 2.0;
    for (int guard = 0; guard < 64; ++guard) {
      const double pn = q_double_star(p, d_hat);
      const double beta = pn / rep.two_star;
      // p'(2 beta - 1) equals p** by construction, so M_prev = M(p**).
      add_step(p, beta, pn, moser_M(u, pn));
      if (p >= q) break;
      p = std::min(pn, q);
    }
  } else {
    rep.regime = "beta";
    const auto mp = moser_params(q, d_hat);
    rep.chi = mp.chi;
    rep.theta = mp.theta;
    // Beyond this exponent the discrete norms equal max|u| to many digits.
    constexpr double kSaturation = 1e6;
    for (std::size_t n = 1; n < mp.beta.size(); ++n) {
      const double target = rep.two_star * mp.beta[n];
      if (target > kSaturation) break;
      add_step(q, mp.beta[n], target, moser_M(u, rep.two_star * mp.beta[n - 1]));
    }
    rep.exponents.push_back(std::numeric_limits<double>::infinity());
    rep.norms.push_back(moser_M(u, std::numeric_limits<double>::infinity()));
  }

  rep.c1_raw = 0.0;
  for (const auto& s : rep.steps) rep.c1_raw = std::max(rep.c1_raw, s.ratio);
  rep.c1_fitted = std::max(1.0, rep.c1_raw);
  for (std::size_t j = 0; j < rep.norms.size(); ++j) {
    if (!std::isfinite(rep.norms[j])) rep.finite = false;
    if (j > 0 && rep.norms[j] < rep.norms[j - 1] * (1.0 - 1e-12)) rep.monotone = false;
  }
  const double denom = lp_norm(u, 2.0) + lp_norm(hdata, q);
  rep.ratio = denom > 0.0 ? lp_norm(u, rep.qss) / denom : 0.0;
  return rep;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

bool Certificate::all_pass() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass(); });
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Certificate::render_human() const {
  std::string out;
  for (const auto& c : checks_) {
    out += "[" + c.name + "]\n";
    out += "claim: " + c.claim + "\n";
    for (const auto& [k, v] : c.constants) out += "constant." + k + ": " + num(v) + "\n";
    for (const auto& [k, v] : c.measured) out += "measured." + k + ": " + num(v) + "\n";
    out += "margin: " + num(c.margin) + "\n";
    out += std::string("verdict: ") + (c.pass() ? "PASS" : "FAIL") + "\n";
    if (!c.note.empty()) out += "note: " + c.note + "\n";
    out += "\n";
  }
  for (const auto& n : notes_) out += "note: " + n + "\n";
  return out;
}

std::string Certificate::render_machine() const {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "seed = %llu\n", static_cast<unsigned long long>(seed_));
  out += buf;
  std::snprintf(buf, sizeof buf, "config_hash = \"%016llx\"\n",
                static_cast<unsigned long long>(hash_));
  out += buf;
  for (const auto& c : checks_) {
    out += "check = {name = \"" + c.name + "\", margin = " + num(c.margin) + ", verdict = \"" +
           (c.pass() ? "PASS" : "FAIL") + "\"}\n";
  }
  return out;
}

}  // namespace semilin
