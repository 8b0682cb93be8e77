#include "semilin/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "semilin/error.hpp"
#include "semilin/expr.hpp"

namespace semilin {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Solve: return "solve";
    case Mode::Audit: return "audit";
    case Mode::Counterexample: return "counterexample";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "solve") return Mode::Solve;
  if (text == "audit") return Mode::Audit;
  if (text == "counterexample") return Mode::Counterexample;
  throw ConfigError("mode: unknown mode '" + text + "'");
}

double eval_scalar(const std::string& text, double lambda1, double eps, double Lmax) {
  Expr e;
  try {
    e = parse_expr(text, 1, {"lambda1", "eps", "Lmax", "pi"});
  } catch (const ExprError& err) {
    throw ConfigError("scalar '" + text + "': " + err.what());
  }
  for (const auto& name : e.free_variables()) {
    if (name != "lambda1" && name != "eps" && name != "Lmax" && name != "pi") {
      throw ConfigError("scalar '" + text + "' may not reference '" + name + "'");
    }
  }
  const std::map<std::string, double> known{
      {"lambda1", lambda1}, {"eps", eps}, {"Lmax", Lmax}, {"pi", std::numbers::pi}};
  std::map<std::string, double> env;
  for (const auto& [name, value] : known) {
    if (e.uses(name) && std::isnan(value)) {
      throw ConfigError("scalar '" + text + "' references '" + name + "' before it is known");
    }
    env[name] = std::isnan(value) ? 0.0 : value;
  }
  try {
    return e.eval(env);
  } catch (const ExprError& err) {
    throw ConfigError("scalar '" + text + "': " + err.what());
  }
}

namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& where, const std::string& key, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": invalid value");
  }
}

std::vector<double> get_vec(const YAML::Node& node, const std::string& where,
                            const std::string& key) {
  const YAML::Node v = node[key];
  if (!v) return {};
  if (!v.IsSequence()) throw ConfigError(where + "." + key + ": expected a list");
  try {
    return v.as<std::vector<double>>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": expected a list of numbers");
  }
}

Point to_point(const std::vector<double>& v, const std::string& what) {
  if (v.size() > 3) throw ConfigError(what + ": at most 3 coordinates");
  Point p{};
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

Box parse_box(const YAML::Node& node, const std::string& where) {
  const auto lo = get_vec(node, where, "lo");
  const auto hi = get_vec(node, where, "hi");
  if (lo.empty() || lo.size() != hi.size() || lo.size() > 3) {
    throw ConfigError(where + ": lo and hi must be lists of equal length 1..3");
  }
  Box b;
  b.dim = static_cast<int>(lo.size());
  b.lo = to_point(lo, where + ".lo");
  b.hi = to_point(hi, where + ".hi");
  for (int a = 0; a < b.dim; ++a) {
    if (!(b.hi[static_cast<std::size_t>(a)] > b.lo[static_cast<std::size_t>(a)])) {
      throw ConfigError(where + ": hi must exceed lo on every axis");
    }
  }
  return b;
}

DomainConfig parse_domain(const YAML::Node& node) {
  const std::string w = "domain";
  check_keys(node, w, {"kind", "lo", "hi", "h", "center", "radius", "inner_radius", "boxes",
                       "indicator"});
  DomainConfig dc;
  dc.box = parse_box(node, w);
  dc.h = get<double>(node, w, "h", 0.0);
  if (!(dc.h > 0.0)) throw ConfigError("domain.h: grid spacing must be positive");
  const auto kind = get<std::string>(node, w, "kind", "box");
  const Point center = node["center"] ? to_point(get_vec(node, w, "center"), "domain.center")
                                      : dc.box.center();
  if (kind == "box") {
    dc.spec = DomainSpec::box();
  } else if (kind == "disk") {
    dc.spec = DomainSpec::disk(center, get<double>(node, w, "radius", 0.0));
  } else if (kind == "annulus") {
    dc.spec = DomainSpec::annulus(center, get<double>(node, w, "inner_radius", 0.0),
                                  get<double>(node, w, "radius", 0.0));
  } else if (kind == "lshape") {
    dc.spec = DomainSpec::l_shape();
  } else if (kind == "union") {
    const YAML::Node boxes = node["boxes"];
    if (!boxes || !boxes.IsSequence()) throw ConfigError("domain.boxes: expected a list");
    std::vector<Box> list;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const std::string wi = "domain.boxes[" + std::to_string(i) + "]";
      check_keys(boxes[i], wi, {"lo", "hi"});
      list.push_back(parse_box(boxes[i], wi));
      if (list.back().dim != dc.box.dim) throw ConfigError(wi + ": dimension mismatch");
    }
    dc.spec = DomainSpec::union_of_boxes(std::move(list));
  } else if (kind == "indicator") {
    const auto text = get<std::string>(node, w, "indicator", "");
    try {
      dc.spec = DomainSpec::from_indicator(parse_expr(text, dc.box.dim));
    } catch (const Error& e) {
      throw ConfigError(std::string("domain.indicator: ") + e.what());
    }
  } else {
    throw ConfigError("domain.kind: unknown kind '" + kind + "'");
  }
  return dc;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("config: expected a mapping at top level");
  check_keys(root, "config",
             {"mode", "domain", "problem", "boundary", "solver", "counterexample", "output"});

  RunConfig rc;
  rc.text = std::string(text);
  rc.mode = parse_mode(get<std::string>(root, "config", "mode", "solve"));

  if (root["domain"]) {
    rc.domain = parse_domain(root["domain"]);
  } else if (rc.mode != Mode::Counterexample) {
    throw ConfigError("domain: section required for mode " + std::string(to_string(rc.mode)));
  }

  if (const YAML::Node p = root["problem"]) {
    const std::string w = "problem";
    check_keys(p, w, {"f", "h", "h0", "gamma", "epsilon", "L", "L0", "q", "d_hat", "t"});
    auto& pc = rc.problem;
    pc.f = get<std::string>(p, w, "f", "");
    pc.h = get<std::string>(p, w, "h", pc.h);
    pc.h0 = get<std::string>(p, w, "h0", pc.h);
    pc.gamma = get<std::string>(p, w, "gamma", "0");
    pc.epsilon = get<std::string>(p, w, "epsilon", pc.epsilon);
    pc.L = get<std::string>(p, w, "L", pc.L);
    pc.L0 = get<std::string>(p, w, "L0", pc.L);
    pc.q = get<std::string>(p, w, "q", pc.q);
    pc.d_hat = get<std::string>(p, w, "d_hat", pc.d_hat);
    pc.t = get<std::string>(p, w, "t", pc.t);
    if (pc.f.empty()) throw ConfigError("problem.f: the semilinearity is required");
  } else if (rc.mode != Mode::Counterexample) {
    throw ConfigError("problem: section required for mode " + std::string(to_string(rc.mode)));
  }
  if (rc.problem.h0.empty()) rc.problem.h0 = rc.problem.h;
  if (rc.problem.gamma.empty()) rc.problem.gamma = "0";
  if (rc.problem.L0.empty()) rc.problem.L0 = rc.problem.L;

  if (const YAML::Node b = root["boundary"]) {
    check_keys(b, "boundary", {"kind", "beta"});
    const auto kind = get<std::string>(b, "boundary", "kind", "dirichlet");
    if (kind == "dirichlet") {
      rc.boundary.kind = BoundaryKind::Dirichlet;
    } else if (kind == "robin") {
      rc.boundary.kind = BoundaryKind::Robin;
    } else {
      throw ConfigError("boundary.kind: unknown kind '" + kind + "'");
    }
    rc.boundary.beta = get<std::string>(b, "boundary", "beta", rc.boundary.beta);
  }

  if (const YAML::Node s = root["solver"]) {
    const std::string w = "solver";
    check_keys(s, w, {"tol", "seed", "max_levels", "base_scale", "falsify_budget", "gamma_cap",
                      "force_gamma0", "uniqueness_trials", "eig_tol"});
    auto& sc = rc.solver;
    sc.tol = get<double>(s, w, "tol", sc.tol);
    sc.seed = get<std::uint64_t>(s, w, "seed", sc.seed);
    sc.max_levels = get<int>(s, w, "max_levels", sc.max_levels);
    sc.base_scale = get<double>(s, w, "base_scale", sc.base_scale);
    sc.falsify_budget = get<int>(s, w, "falsify_budget", sc.falsify_budget);
    sc.gamma_cap = get<double>(s, w, "gamma_cap", sc.gamma_cap);
    sc.force_gamma0 = get<bool>(s, w, "force_gamma0", sc.force_gamma0);
    sc.uniqueness_trials = get<int>(s, w, "uniqueness_trials", sc.uniqueness_trials);
    sc.eig_tol = get<double>(s, w, "eig_tol", sc.eig_tol);
  }
  if (!(rc.solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
  if (!(rc.solver.eig_tol > 0.0)) throw ConfigError("solver.eig_tol: must be positive");
  if (rc.solver.max_levels < 1) throw ConfigError("solver.max_levels: must be at least 1");
  if (rc.solver.falsify_budget < 0) throw ConfigError("solver.falsify_budget: must be >= 0");

  if (const YAML::Node c = root["counterexample"]) {
    const std::string w = "counterexample";
    check_keys(c, w, {"case", "lambda1", "epsilon", "r", "widths", "h", "strip_width",
                      "control_factor"});
    auto& cc = rc.counterexample;
    cc.case_tag = get<std::string>(c, w, "case", cc.case_tag);
    cc.lambda1 = get<std::string>(c, w, "lambda1", cc.lambda1);
    cc.epsilon = get<std::string>(c, w, "epsilon", cc.epsilon);
    cc.r = get<std::string>(c, w, "r", cc.r);
    if (c["widths"]) cc.widths = get_vec(c, w, "widths");
    cc.h = get<double>(c, w, "h", cc.h);
    cc.strip_width = get<double>(c, w, "strip_width", cc.strip_width);
    cc.control_factor = get<double>(c, w, "control_factor", cc.control_factor);
    if (cc.case_tag != "i" && cc.case_tag != "ii" && cc.case_tag != "iii") {
      throw ConfigError("counterexample.case: expected i, ii or iii");
    }
    if (cc.widths.empty()) throw ConfigError("counterexample.widths: at least one width");
    if (!(cc.h >= 0.0) || !(cc.strip_width > 0.0)) {
      throw ConfigError("counterexample: h and strip_width must be positive");
    }
  }

  if (const YAML::Node o = root["output"]) {
    check_keys(o, "output", {"dir", "fields"});
    rc.output.dir = get<std::string>(o, "output", "dir", rc.output.dir);
    rc.output.fields = get<bool>(o, "output", "fields", rc.output.fields);
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace semilin
