#pragma once

#include <span>
#include <string>
#include <vector>

#include "semilin/field.hpp"

namespace semilin {

/// i: lambda1 = 0; ii: epsilon <= 2 lambda1; iii: 0 < 2 lambda1 <= epsilon.
enum class CaseTag { I, II, III };

const char* to_string(CaseTag tag);
/// Parses "i", "ii" or "iii".
CaseTag parse_case(const std::string& text);
/// The tag consistent with (lambda1, epsilon); ii wins at epsilon = 2 lambda1.
CaseTag classify_case(double lambda1, double epsilon);
bool case_consistent(CaseTag tag, double lambda1, double epsilon);

/// Data of the complex problem -Lap u + i b.grad u - (lambda1 - epsilon) u = g.
struct SymbolProblem {
  double lambda1 = 0.0;
  double epsilon = 1.0;
  double r = 0.0;
  int d = 2;
  std::vector<double> b;
  CaseTag tag = CaseTag::III;

  /// Throws PreconditionError on a broken invariant.
  void validate() const;
};

/// zeta^2 + |xi|^2 - b1 zeta - b'.xi - (lambda1 - epsilon).
double symbol_p(double zeta, std::span<const double> xi, std::span<const double> b,
                double lambda1, double epsilon);

/// Drift vector of length r for the given case. Throws InfeasibleError when
/// r is below lmax or below the case's first component.
std::vector<double> choose_b(CaseTag tag, double r, double lambda1, double epsilon, int d);

SymbolProblem make_symbol_problem(CaseTag tag, double r, double lambda1, double epsilon, int d = 2);

/// A zero of the symbol: zeta along x1 and xi over the remaining axes. For
/// case i the zero sqrt(eps) b/|b| is reported with zeta as its first entry.
struct SymbolZero {
  double zeta = 0.0;
  std::vector<double> xi;
  double value = 0.0;
};
SymbolZero symbol_zero(const SymbolProblem& sp);

/// Smallest Dirichlet eigenvalue of the 1D grid on (0, width) with spacing h.
double strip_lambda1(double width, double h);

struct BlowupOptions {
  double strip_width = 3.14159265358979323846;  // x1 extent of the strip (cases ii, iii)
  double window_fraction = 0.2;
  double control_factor = 0.5;  // |b_ctrl| = control_factor * lmax
  double growth = 1.5;          // required resonant growth per doubling
  double control_band = 2.0;    // control must stay within this factor
  bool keep_fields = false;     // keep the resonant solution of the largest width
};

struct BlowupRow {
  double T = 0.0;
  std::size_t nodes = 0;
  double resonant_ratio = 0.0;
  double control_ratio = 0.0;
};

struct BlowupStudy {
  std::vector<BlowupRow> rows;
  std::string verdict;  // BLOWUP, NO_BLOWUP or INCONCLUSIVE
  std::string error;    // linear-solver failure; rows hold the achieved prefix
  std::vector<double> b_control;
  SymbolZero zero;
  Field resonant_field;
  Field source_field;
};

/// ||u_T||_2 / ||g||_2 on truncated strips (or boxes for case i) for the
/// resonant drift and a sub-threshold control drift. Requires d = 2.
BlowupStudy blowup_study(const SymbolProblem& sp, std::span<const double> widths, double h,
                         const BlowupOptions& options = {});

std::string blowup_verdict(std::span<const BlowupRow> rows, double growth, double control_band);

}  // namespace semilin
