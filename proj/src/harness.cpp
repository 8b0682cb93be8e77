#include "semilin/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "semilin/conditions.hpp"
#include "semilin/counterexample.hpp"
#include "semilin/error.hpp"
#include "semilin/linsolve.hpp"
#include "semilin/operators.hpp"
#include "semilin/semilinear.hpp"

namespace semilin {

void write_field(const Field& u, const std::string& path, FieldFormat format) {
  if (path.empty()) throw IoError("write_field: empty path");
  if (format == FieldFormat::Efld) {
    write_efld(u, path);
  } else {
    write_csv(u, path);
  }
}

namespace {

/// Error raised inside a stage, tagged with module and stage for the report.
struct StageContext {
  std::string module = "harness";
  std::string stage = "start";
  void set(std::string m, std::string s) {
    module = std::move(m);
    stage = std::move(s);
  }
  std::string tag() const { return "[" + module + "/" + stage + "] "; }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string> kExtraNames{"lambda1", "eps", "Lmax", "pi"};

Expr parse_problem_expr(const std::string& text, int dim, const char* key) {
  try {
    return parse_expr(text, dim, kExtraNames).bind("pi", std::numbers::pi);
  } catch (const ExprError& e) {
    throw ConfigError(std::string("problem.") + key + ": " + e.what());
  }
}

}  // namespace

ProblemData make_problem(const ProblemConfig& pc, int dim, double lambda1) {
  ProblemData p;
  auto& s = p.spec;
  s.f = parse_problem_expr(pc.f, dim, "f");
  s.h = parse_problem_expr(pc.h, dim, "h");
  s.h0 = parse_problem_expr(pc.h0, dim, "h0");
  s.gamma = parse_problem_expr(pc.gamma, dim, "gamma");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.epsilon = eval_scalar(pc.epsilon, lambda1, nan, nan);
  const double lm = s.epsilon > 0.0 ? lmax(s.epsilon, lambda1) : nan;
  s.L = eval_scalar(pc.L, lambda1, s.epsilon, lm);
  s.L0 = eval_scalar(pc.L0, lambda1, s.epsilon, lm);
  s.q = eval_scalar(pc.q, lambda1, s.epsilon, lm);
  s.d_hat = eval_scalar(pc.d_hat, lambda1, s.epsilon, lm);
  p.t = eval_scalar(pc.t, lambda1, s.epsilon, lm);
  if (!(p.t > 0.0 && p.t <= 1.0)) throw ConfigError("problem.t: must lie in (0, 1]");
  return p;
}

Discretization make_discretization(const RunConfig& rc) {
  const DomainPtr dom = build_domain(rc.domain.spec, rc.domain.h, rc.domain.box);
  if (rc.boundary.kind == BoundaryKind::Dirichlet) return make_dirichlet(dom);
  Expr beta;
  try {
    beta = parse_expr(rc.boundary.beta, dom->dim(), {"pi"}).bind("pi", std::numbers::pi);
  } catch (const ExprError& e) {
    throw ConfigError(std::string("boundary.beta: ") + e.what());
  }
  return make_robin(dom, beta);
}

namespace {

FalsifyOptions falsify_options(const SolverConfig& sc) {
  FalsifyOptions fo;
  fo.budget = sc.falsify_budget;
  fo.seed = sc.seed;
  fo.gamma_cap = sc.gamma_cap;
  fo.force_gamma0 = sc.force_gamma0;
  return fo;
}

Check falsifier_check(const FalsifyResult& r) {
  Check c;
  c.name = std::string("condition_") + to_string(r.kind);
  c.claim = std::string("no sampled violation of the ") + to_string(r.kind) + " condition";
  c.measured = {{"samples", static_cast<double>(r.samples)}};
  c.margin = r.pass ? 0.0 : -1.0;
  if (r.skipped) c.note = "skipped: " + r.note;
  if (r.witness) c.note = "WITNESS " + r.witness->describe();
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_fields(const std::string& dir, const std::string& name, const Field& u) {
  write_field(u, dir + "/" + name + ".efld", FieldFormat::Efld);
  write_field(u, dir + "/" + name + ".csv", FieldFormat::Csv);
}

std::string sandwich_trace(const SandwichResult& s) {
  std::string out = "iteration,update_norm,contraction_ratio\n";
  for (std::size_t i = 0; i < s.update_norms.size(); ++i) {
    out += std::to_string(i + 1) + "," + num(s.update_norms[i]) + ",";
    if (i >= 1 && i - 1 < s.contraction_ratios.size()) out += num(s.contraction_ratios[i - 1]);
    out += "\n";
  }
  return out;
}

std::string level_trace(const std::vector<LevelRecord>& levels) {
  std::string out =
      "k,nodes,iterations,path,update_h1,residual,clamp_distance,domination_margin,h1_norm\n";
  for (const auto& l : levels) {
    out += std::to_string(l.k) + "," + std::to_string(l.nodes) + "," +
           std::to_string(l.iterations) + "," + l.path + "," + num(l.update_h1) + "," +
           num(l.residual) + "," + num(l.clamp_distance) + "," + num(l.domination_margin) + "," +
           num(l.h1_norm) + "\n";
  }
  return out;
}

Check contraction_check(const char* name, const SandwichResult& s) {
  double worst = 0.0;
  for (double r : s.contraction_ratios) worst = std::max(worst, r);
  Check c;
  c.name = name;
  c.claim = "every sandwich contraction ratio <= sqrt(alpha)";
  c.constants = {{"alpha", s.alpha}, {"sqrt_alpha", std::sqrt(s.alpha)}};
  c.measured = {{"max_ratio", worst},
                {"iterations", static_cast<double>(s.iterations)}};
  c.margin = std::sqrt(s.alpha) + 1e-8 - worst;
  return c;
}

/// Tolerance on the pointwise domination check.
constexpr double kDominationTol = 1e-8;
/// Relative tolerance on the final residual.
constexpr double kResidualTol = 1e-6;

struct Context {
  const RunConfig& rc;
  RunResult& result;
  StageContext& where;
  std::string human;  // extra human-readable lines
  std::string dir;
};

void run_solve(Context& cx, bool audit_only) {
  const RunConfig& rc = cx.rc;
  Certificate& cert = cx.result.certificate;
  cx.where.set("discrete", "assemble");
  const Discretization disc = make_discretization(rc);
  const int dim = disc.nodes->dim();
  cx.where.set("discrete", "lambda1");
  const double lambda1 = smallest_eigenvalue(disc.stiffness, rc.solver.eig_tol).lambda1;
  cx.where.set("harness", "problem");
  const ProblemData prob = make_problem(rc.problem, dim, lambda1);
  prob.spec.validate(dim);
  const SemilinearitySpec bound = prob.spec.bound(lambda1);
  const double lm = lmax(bound.epsilon, lambda1);
  cx.human += "lambda1: " + num(lambda1) + "\n";
  cx.human += "epsilon: " + num(bound.epsilon) + "\n";
  cx.human += "L: " + num(bound.L) + "\n";
  cx.human += "Lmax: " + num(lm) + "\n";
  cx.human += "nodes: " + std::to_string(disc.nodes->size()) + "\n";

  {
    Check c;
    c.name = "threshold";
    c.claim = "L < Lmax";
    c.constants = {{"Lmax", lm}};
    c.measured = {{"L", bound.L}};
    c.margin = lm - bound.L;
    cert.add(c);
    if (!(bound.L < lm)) {
      cx.result.exit_code = kExitWitness;
      cx.result.error = cx.where.tag() + "L = " + num(bound.L) + " is not below Lmax = " + num(lm);
      return;
    }
  }
  const H1Constant hc = h1_constant(lambda1, bound.epsilon, bound.L);
  cx.human += "rho0: " + num(hc.rho0) + "\nC: " + num(hc.C) + "\n";

  cx.where.set("conditions", "falsify");
  const FalsifyOptions fo = falsify_options(rc.solver);
  bool witness = false;
  bool monotone = false;
  std::vector<ConditionKind> kinds{ConditionKind::Coercive, ConditionKind::Growth,
                                   ConditionKind::Monotone};
  if (audit_only) {
    kinds.push_back(ConditionKind::Gamma0);
    kinds.push_back(ConditionKind::GammaInf);
  }
  for (ConditionKind k : kinds) {
    const FalsifyResult r = falsify_condition(k, bound, *disc.nodes, lambda1, fo);
    if (k == ConditionKind::Monotone) {
      monotone = r.pass;
      if (!audit_only) {
        if (r.witness) cx.human += "monotone: WITNESS " + r.witness->describe() + "\n";
        continue;
      }
    }
    if (!r.pass) {
      witness = true;
      if (cx.result.error.empty()) {
        cx.result.error = cx.where.tag() + "WITNESS for " + to_string(k) + ": " +
                          r.witness->describe();
      }
    }
    cert.add(falsifier_check(r));
  }
  if (witness) {
    cx.result.exit_code = kExitWitness;
    return;
  }
  if (audit_only) {
    const double dh = bound.effective_d_hat(dim);
    cx.human += "q**: " + num(q_double_star(bound.q, dh)) + "\n";
    if (bound.q > dh / 2.0 && dh > 2.0) {
      const auto mp = moser_params(bound.q, dh);
      cx.human += "chi: " + num(mp.chi) + "\ntheta: " + num(mp.theta) + "\n";
    }
    return;
  }

  cx.where.set("semilinear", "solve");
  SemilinearOptions so;
  so.t = prob.t;
  so.max_levels = rc.solver.max_levels;
  so.base_scale = rc.solver.base_scale;
  so.lambda1 = lambda1;
  so.check_conditions = false;
  so.falsify = fo;
  so.eig_tol = rc.solver.eig_tol;
  const SolveReport rep = solve_semilinear(disc, prob.spec, rc.solver.tol, so);
  cx.human += "levels: " + std::to_string(rep.levels.size()) + "\n";
  cx.human += "stop_reason: " + rep.stop_reason + "\n";

  cx.where.set("analysis", "certificate");
  cert.add(contraction_check("sandwich_upper", rep.upper));
  cert.add(contraction_check("sandwich_lower", rep.lower));
  {
    Check c = verify_domination(rep.u, rep.vlow, rep.vup, kDominationTol);
    c.measured.emplace_back("level_margin", rep.domination_margin);
    c.margin = std::min(c.margin, rep.domination_margin + kDominationTol);
    cert.add(c);
  }
  cert.add(verify_h1_bound(disc, rep.u, rep.hdata, hc.C));
  {
    Check c;
    c.name = "residual";
    c.claim = "||K u - f(x, u, grad u)|| <= tol_rel * scale";
    c.constants = {{"tol_rel", kResidualTol}};
    c.measured = {{"residual", rep.residual}, {"scale", rep.residual_scale}};
    c.margin = kResidualTol * rep.residual_scale - rep.residual;
    cert.add(c);
  }
  {
    Check c;
    c.name = "exhaustion";
    c.claim = "level updates fall below tol";
    c.constants = {{"tol", rc.solver.tol}};
    const double last = rep.levels.empty() ? 0.0 : rep.levels.back().update_h1;
    c.measured = {{"levels", static_cast<double>(rep.levels.size())}, {"last_update", last}};
    c.margin = rep.stop_reason == "max_levels" ? rc.solver.tol - last : 0.0;
    c.note = "stop reason " + rep.stop_reason;
    cert.add(c);
  }
  {
    Check c;
    c.name = "f0_bound";
    c.claim = "|f(x, u, grad u)| <= f0 + L0 |grad u| on the band";
    c.measured = {{"min_slack", rep.f0_margin}};
    c.margin = rep.f0_margin;
    cert.add(c);
  }
  const double dh = bound.effective_d_hat(dim);
  if (dh > 2.0) {
    const auto mc = moser_chain(rep.u, rep.hdata, bound.q, dh);
    Check c;
    c.name = "moser_chain";
    c.claim = "finite monotone chain with fitted C1 >= 1";
    c.constants = {{"q", bound.q}, {"d_hat", dh}, {"q_double_star", mc.qss}};
    c.measured = {{"c1_raw", mc.c1_raw},
                  {"c1_fitted", mc.c1_fitted},
                  {"ratio", mc.ratio},
                  {"steps", static_cast<double>(mc.steps.size())}};
    c.margin = (mc.finite && mc.monotone) ? mc.c1_fitted - 1.0 : -1.0;
    if (mc.degenerate) c.note = "u = 0: the chain does not determine C1";
    cert.add(c);
  } else {
    cx.human += "moser_chain: not applicable for d_hat <= 2\n";
  }

  if (rc.solver.uniqueness_trials >= 2) {
    if (!monotone) {
      cx.human += "uniqueness: skipped, monotone condition falsified\n";
    } else {
      cx.where.set("semilinear", "uniqueness");
      const auto ur = uniqueness_probe(disc, prob.spec, rc.solver.uniqueness_trials,
                                       rc.solver.tol, rc.solver.seed, so);
      Check c;
      c.name = "uniqueness";
      c.claim = "independent solves agree in H1";
      c.constants = {{"threshold", ur.threshold}};
      c.measured = {{"max_distance", ur.max_distance}, {"trials", static_cast<double>(ur.trials)}};
      c.margin = ur.threshold - ur.max_distance;
      cert.add(c);
    }
  }

  cx.where.set("harness", "write");
  if (rc.output.fields) {
    write_fields(cx.dir, "u", rep.u);
    write_fields(cx.dir, "vlow", rep.vlow);
    write_fields(cx.dir, "vup", rep.vup);
  }
  write_text(cx.dir + "/levels.csv", level_trace(rep.levels));
  write_text(cx.dir + "/sandwich_upper.csv", sandwich_trace(rep.upper));
  write_text(cx.dir + "/sandwich_lower.csv", sandwich_trace(rep.lower));
  if (!cert.all_pass()) cx.result.exit_code = kExitCheckFailed;
}

void run_counterexample(Context& cx) {
  const RunConfig& rc = cx.rc;
  const auto& cc = rc.counterexample;
  Certificate& cert = cx.result.certificate;
  cx.where.set("counterexample", "setup");
  const CaseTag tag = parse_case(cc.case_tag);
  const double h = cc.h > 0.0 ? cc.h : cc.strip_width / 16.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double lambda1 = 0.0;
  if (cc.lambda1 == "strip") {
    if (tag != CaseTag::I) lambda1 = strip_lambda1(cc.strip_width, h);
  } else {
    lambda1 = eval_scalar(cc.lambda1, nan, nan, nan);
  }
  const double eps = eval_scalar(cc.epsilon, lambda1, nan, nan);
  if (!(eps > 0.0)) throw ConfigError("counterexample.epsilon: must be positive");
  const double lm = lmax(eps, lambda1);
  const double r = eval_scalar(cc.r, lambda1, eps, lm);
  const SymbolProblem sp = make_symbol_problem(tag, r, lambda1, eps, 2);
  const SymbolZero z = symbol_zero(sp);
  cx.human += "case: " + std::string(to_string(tag)) + "\n";
  cx.human += "lambda1: " + num(lambda1) + "\nepsilon: " + num(eps) + "\nLmax: " + num(lm) +
              "\nr: " + num(r) + "\n";
  cx.human += "b: (" + num(sp.b[0]) + ", " + num(sp.b[1]) + ")\n";
  cx.human += "symbol_zero: zeta = " + num(z.zeta) + ", xi = " + num(z.xi[0]) +
              ", p = " + num(z.value) + "\n";

  cx.where.set("counterexample", "blowup_study");
  BlowupOptions bo;
  bo.strip_width = cc.strip_width;
  bo.control_factor = cc.control_factor;
  bo.keep_fields = rc.output.fields;
  const BlowupStudy st = blowup_study(sp, cc.widths, h, bo);

  std::string table = "T,nodes,resonant_ratio,control_ratio\n";
  for (const auto& row : st.rows) {
    table += num(row.T) + "," + std::to_string(row.nodes) + "," + num(row.resonant_ratio) + "," +
             num(row.control_ratio) + "\n";
  }
  cx.human += "table:\n" + table;
  cx.human += "verdict: " + st.verdict + "\n";
  if (!st.error.empty()) cx.human += "solver_error: " + st.error + "\n";

  Check c;
  c.name = "blowup";
  c.claim = "resonant ratio grows per doubling while the control stays bounded";
  c.constants = {{"growth", bo.growth}, {"control_band", bo.control_band}};
  double growth_margin = st.rows.size() >= 2 ? std::numeric_limits<double>::infinity() : -1.0;
  for (std::size_t j = 1; j < st.rows.size(); ++j) {
    const double need = std::pow(bo.growth, std::log2(st.rows[j].T / st.rows[j - 1].T));
    growth_margin = std::min(
        growth_margin, st.rows[j].resonant_ratio / st.rows[j - 1].resonant_ratio / need - 1.0);
  }
  c.measured = {{"widths", static_cast<double>(st.rows.size())}, {"growth_margin", growth_margin}};
  // A failed control band has no growth deficit to report; it scores -1.
  if (st.verdict == "BLOWUP") {
    c.margin = growth_margin;
  } else {
    c.margin = growth_margin < 0.0 ? growth_margin : -1.0;
  }
  c.note = "verdict " + st.verdict;
  cert.add(c);

  cx.where.set("harness", "write");
  write_text(cx.dir + "/blowup.csv", table);
  if (rc.output.fields && st.resonant_field.domain()) {
    write_fields(cx.dir, "resonant_u", st.resonant_field);
    write_fields(cx.dir, "resonant_g", st.source_field);
  }
  if (!st.error.empty()) {
    cx.result.exit_code = kExitNonConvergence;
    cx.result.error = cx.where.tag() + st.error;
  } else if (!cert.all_pass()) {
    cx.result.exit_code = kExitCheckFailed;
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IoError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ContractionError*>(&e)) return kExitCheckFailed;
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const SolverError*>(&e)) {
    return kExitNonConvergence;
  }
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const ThresholdError*>(&e) ||
      dynamic_cast<const InfeasibleError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const ExprError*>(&e)) {
    return kExitWitness;
  }
  return kExitConfig;
}

std::string render_report(const RunConfig& rc, const RunResult& r, const std::string& human) {
  std::string out = std::string(kReportHeader) + "\n";
  out += "mode: " + std::string(to_string(rc.mode)) + "\n";
  out += "exit_code: " + std::to_string(r.exit_code) + "\n";
  if (!r.error.empty()) out += "error: " + r.error + "\n";
  out += "\n# summary\n" + human + "\n# checks\n" + r.certificate.render_human();
  out += "# machine\n" + r.certificate.render_machine();
  return out;
}

}  // namespace

RunResult run_config(const RunConfig& config, const RunOverrides& overrides) {
  RunConfig rc = config;
  std::string hash_input = rc.text;
  if (overrides.tol) {
    rc.solver.tol = *overrides.tol;
    hash_input += "\n--tol " + num(*overrides.tol);
  }
  if (overrides.seed) {
    rc.solver.seed = *overrides.seed;
    hash_input += "\n--seed " + std::to_string(*overrides.seed);
  }
  if (overrides.mode) {
    rc.mode = *overrides.mode;
    hash_input += std::string("\n--mode ") + to_string(*overrides.mode);
  }
  if (overrides.out) rc.output.dir = *overrides.out;

  RunResult result;
  result.certificate.set_seed(rc.solver.seed);
  result.certificate.set_config_hash(fnv1a(hash_input));
  StageContext where;
  Context cx{rc, result, where, {}, rc.output.dir};
  try {
    if (!(rc.solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
    if (rc.mode != Mode::Counterexample && !(rc.domain.h > 0.0)) {
      throw ConfigError("domain: section required for mode " + std::string(to_string(rc.mode)));
    }
    if (rc.mode != Mode::Counterexample && rc.problem.f.empty()) {
      throw ConfigError("problem: section required for mode " + std::string(to_string(rc.mode)));
    }
    where.set("harness", "output");
    ensure_dir(cx.dir);
    switch (rc.mode) {
      case Mode::Solve: run_solve(cx, false); break;
      case Mode::Audit: run_solve(cx, true); break;
      case Mode::Counterexample: run_counterexample(cx); break;
    }
  } catch (const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.error = where.tag() + e.what();
  }
  result.report = render_report(rc, result, cx.human);
  try {
    if (std::filesystem::is_directory(cx.dir)) write_text(cx.dir + "/report.txt", result.report);
  } catch (const IoError& e) {
    if (result.exit_code == kExitPass) {
      result.exit_code = kExitConfig;
      result.error = std::string("[harness/report] ") + e.what();
    }
  }
  return result;
}

RunResult run_config(const std::string& path, const RunOverrides& overrides) {
  try {
    return run_config(load_config(path), overrides);
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = kExitConfig;
    r.error = std::string("[harness/config] ") + e.what();
    r.report = std::string(kReportHeader) + "\nexit_code: 1\nerror: " + r.error + "\n";
    return r;
  }
}

}  // namespace semilin
