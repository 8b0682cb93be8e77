#include "semilin/counterexample.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "semilin/conditions.hpp"
#include "semilin/error.hpp"
#include "semilin/linsolve.hpp"
#include "semilin/operators.hpp"

namespace semilin {

const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::I: return "i";
    case CaseTag::II: return "ii";
    case CaseTag::III: return "iii";
  }
  return "?";
}

CaseTag parse_case(const std::string& text) {
  if (text == "i") return CaseTag::I;
  if (text == "ii") return CaseTag::II;
  if (text == "iii") return CaseTag::III;
  throw PreconditionError("case", "unknown counterexample case '" + text + "'");
}

CaseTag classify_case(double lambda1, double epsilon) {
  if (lambda1 == 0.0) return CaseTag::I;
  return epsilon <= 2.0 * lambda1 ? CaseTag::II : CaseTag::III;
}

bool case_consistent(CaseTag tag, double lambda1, double epsilon) {
  switch (tag) {
    case CaseTag::I: return lambda1 == 0.0;
    case CaseTag::II: return lambda1 > 0.0 && epsilon <= 2.0 * lambda1;
    case CaseTag::III: return lambda1 > 0.0 && 2.0 * lambda1 <= epsilon;
  }
  return false;
}

void SymbolProblem::validate() const {
  if (!(lambda1 >= 0.0)) throw PreconditionError("lambda1", "lambda1 must be nonnegative");
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon", "epsilon must be positive");
  if (d < 2) throw PreconditionError("d", "the counterexample needs d >= 2");
  if (!case_consistent(tag, lambda1, epsilon)) {
    throw PreconditionError("case", std::string("case ") + to_string(tag) +
                                        " is inconsistent with (lambda1, epsilon)");
  }
  if (static_cast<int>(b.size()) != d) throw PreconditionError("b", "b must have d entries");
  double n2 = 0.0;
  for (double v : b) n2 += v * v;
  if (std::fabs(std::sqrt(n2) - r) > 1e-12 * std::max(1.0, r)) {
    throw PreconditionError("b", "|b| differs from r");
  }
  if (r < lmax(epsilon, lambda1) * (1.0 - 1e-12)) {
    throw PreconditionError("r", "r is below lmax(epsilon, lambda1)");
  }
}

double symbol_p(double zeta, std::span<const double> xi, std::span<const double> b,
                double lambda1, double epsilon) {
  double v = zeta * zeta - (b.empty() ? 0.0 : b[0]) * zeta - (lambda1 - epsilon);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double bk = k + 1 < b.size() ? b[k + 1] : 0.0;
    v += xi[k] * xi[k] - bk * xi[k];
  }
  return v;
}

std::vector<double> choose_b(CaseTag tag, double r, double lambda1, double epsilon, int d) {
  if (d < 2) throw PreconditionError("d", "the counterexample needs d >= 2");
  if (!case_consistent(tag, lambda1, epsilon)) {
    throw PreconditionError("case", std::string("case ") + to_string(tag) +
                                        " is inconsistent with (lambda1, epsilon)");
  }
  const double lm = lmax(epsilon, lambda1);
  if (r < lm * (1.0 - 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "r = %.12g is below lmax = %.12g", r, lm);
    throw InfeasibleError(buf);
  }
  std::vector<double> b(static_cast<std::size_t>(d), 0.0);
  if (tag == CaseTag::I) {
    b[1] = r;
    return b;
  }
  const double b1 = tag == CaseTag::II ? epsilon / std::sqrt(lambda1) : 2.0 * std::sqrt(lambda1);
  double rest = r * r - b1 * b1;
  if (rest < 0.0) {
    if (rest < -1e-12 * r * r) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "r = %.12g is below b1 = %.12g", r, b1);
      throw InfeasibleError(buf);
    }
    rest = 0.0;
  }
  b[0] = b1;
  b[1] = std::sqrt(rest);
  // Rescale so that |b| = r holds to rounding.
  const double n = std::hypot(b[0], b[1]);
  if (n > 0.0) {
    b[0] *= r / n;
    b[1] *= r / n;
  }
  return b;
}

SymbolProblem make_symbol_problem(CaseTag tag, double r, double lambda1, double epsilon, int d) {
  SymbolProblem sp;
  sp.tag = tag;
  sp.r = r;
  sp.lambda1 = lambda1;
  sp.epsilon = epsilon;
  sp.d = d;
  sp.b = choose_b(tag, r, lambda1, epsilon, d);
  sp.validate();
  return sp;
}

SymbolZero symbol_zero(const SymbolProblem& sp) {
  SymbolZero z;
  z.xi.assign(static_cast<std::size_t>(sp.d - 1), 0.0);
  if (sp.tag == CaseTag::I) {
    const double s = std::sqrt(sp.epsilon) / sp.r;
    z.zeta = s * sp.b[0];
    for (int k = 1; k < sp.d; ++k) z.xi[static_cast<std::size_t>(k - 1)] = s * sp.b[static_cast<std::size_t>(k)];
  } else {
    z.zeta = std::sqrt(sp.lambda1);
    // Quadratic in xi_1: xi^2 - b2 xi + c = 0.
    const double b2 = sp.b[1];
    const double c = z.zeta * z.zeta - sp.b[0] * z.zeta - (sp.lambda1 - sp.epsilon);
    double disc = b2 * b2 - 4.0 * c;
    if (disc < 0.0) {
      if (disc < -1e-9 * std::max(1.0, b2 * b2)) {
        throw InfeasibleError("symbol has no real zero with zeta = sqrt(lambda1)");
      }
      disc = 0.0;
    }
    z.xi[0] = 0.5 * (b2 - std::sqrt(disc));
  }
  z.value = symbol_p(z.zeta, z.xi, sp.b, sp.lambda1, sp.epsilon);
  return z;
}

double strip_lambda1(double width, double h) {
  Box box;
  box.dim = 1;
  box.hi[0] = width;
  const auto dom = build_domain(DomainSpec::box(), h, box);
  const auto disc = make_dirichlet(dom);
  return smallest_eigenvalue(disc.stiffness, 1e-13).lambda1;
}

namespace {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

double window(double s, double fraction) {
  const double a = std::fabs(s);
  if (a >= 1.0) return 0.0;
  const double edge = 1.0 - fraction;
  if (a <= edge) return 1.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (a - edge) / fraction));
}

/// ||A^{-1} g|| / ||g|| for A = -Lap + i b.grad (centred) - (lambda1 - eps).
double solve_ratio(const GridDomain& dom, std::span<const double> b, double shift,
                   const CVector& g, CVector* solution) {
  const int n = static_cast<int>(dom.size());
  const int d = dom.dim();
  const double h = dom.h();
  const double ih2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(2 * d + 1));
  for (int row = 0; row < n; ++row) {
    trip.emplace_back(row, row, Complex(2.0 * d * ih2 - shift, 0.0));
    for (int a = 0; a < d; ++a) {
      for (int dir : {-1, 1}) {
        const int nb = dom.neighbor(row, a, dir);
        if (nb < 0) continue;
        const double im = dir * b[static_cast<std::size_t>(a)] / (2.0 * h);
        trip.emplace_back(row, nb, Complex(-ih2, im));
      }
    }
  }
  Eigen::SparseMatrix<Complex> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::Breakdown, "sparse LU factorization failed: " + lu.lastErrorMessage());
  }
  CVector u = lu.solve(g);
  if (lu.info() != Eigen::Success || !u.allFinite()) {
    throw SolverError(SolverError::Kind::Breakdown, "sparse LU solve failed");
  }
  const double ratio = u.norm() / g.norm();
  if (solution != nullptr) *solution = std::move(u);
  return ratio;
}

}  // namespace

std::string blowup_verdict(std::span<const BlowupRow> rows, double growth, double control_band) {
  if (rows.size() < 2) return "INCONCLUSIVE";
  const double c0 = rows.front().control_ratio;
  for (const auto& row : rows) {
    if (!(row.control_ratio <= control_band * c0) || !(row.control_ratio >= c0 / control_band)) {
      return "INCONCLUSIVE";
    }
  }
  for (std::size_t j = 1; j < rows.size(); ++j) {
    const double doublings = std::log2(rows[j].T / rows[j - 1].T);
    const double need = std::pow(growth, doublings);
    if (!(rows[j].resonant_ratio >= need * rows[j - 1].resonant_ratio)) return "NO_BLOWUP";
  }
  return "BLOWUP";
}

BlowupStudy blowup_study(const SymbolProblem& sp, std::span<const double> widths, double h,
                         const BlowupOptions& options) {
  sp.validate();
  if (sp.d != 2) throw PreconditionError("d", "the blow-up study is implemented for d = 2");
  if (!(h > 0.0)) throw PreconditionError("h", "grid spacing must be positive");
  for (std::size_t j = 1; j < widths.size(); ++j) {
    if (!(widths[j] > widths[j - 1])) throw PreconditionError("widths", "widths must increase");
  }
  BlowupStudy study;
  study.zero = symbol_zero(sp);
  const double lm = lmax(sp.epsilon, sp.lambda1);
  study.b_control.resize(sp.b.size());
  for (std::size_t k = 0; k < sp.b.size(); ++k) {
    study.b_control[k] = sp.b[k] / sp.r * options.control_factor * lm;
  }
  const double shift = sp.lambda1 - sp.epsilon;
  const bool strip = sp.tag != CaseTag::I;

  for (std::size_t j = 0; j < widths.size(); ++j) {
    const double T = widths[j];
    Box box;
    box.dim = 2;
    if (strip) {
      box.lo = {0.0, -T, 0.0};
      box.hi = {options.strip_width, T, 0.0};
    } else {
      box.lo = {-T, -T, 0.0};
      box.hi = {T, T, 0.0};
    }
    DomainPtr dom;
    try {
      dom = build_domain(DomainSpec::box(), h, box);
    } catch (const Error& e) {
      study.error = std::string("T = ") + std::to_string(T) + ": " + e.what();
      break;
    }
    const std::size_t n = dom->size();
    CVector g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const Point x = dom->coords(static_cast<int>(i));
      double w = window(x[1] / T, options.window_fraction);
      if (!strip) w *= window(x[0] / T, options.window_fraction);
      const double phase = study.zero.zeta * x[0] + study.zero.xi[0] * x[1];
      g[static_cast<Eigen::Index>(i)] = w * Complex(std::cos(phase), std::sin(phase));
    }
    BlowupRow row;
    row.T = T;
    row.nodes = n;
    try {
      CVector u;
      const bool keep = options.keep_fields && j + 1 == widths.size();
      row.resonant_ratio = solve_ratio(*dom, sp.b, shift, g, keep ? &u : nullptr);
      row.control_ratio = solve_ratio(*dom, study.b_control, shift, g, nullptr);
      if (keep) {
        study.resonant_field = Field(dom, 1, true);
        study.source_field = Field(dom, 1, true);
        for (std::size_t i = 0; i < n; ++i) {
          const auto e = static_cast<Eigen::Index>(i);
          study.resonant_field.values()[i] = u[e].real();
          study.resonant_field.imag()[i] = u[e].imag();
          study.source_field.values()[i] = g[e].real();
          study.source_field.imag()[i] = g[e].imag();
        }
      }
    } catch (const SolverError& e) {
      study.error = std::string("T = ") + std::to_string(T) + ": " + e.what();
      break;
    }
    study.rows.push_back(row);
  }
  study.verdict = blowup_verdict(study.rows, options.growth, options.control_band);
  return study;
}

}  // namespace semilin
