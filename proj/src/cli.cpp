#include "pdilab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "pdilab/audit.hpp"
#include "pdilab/error.hpp"
#include "pdilab/liouville.hpp"
#include "pdilab/params.hpp"
#include "pdilab/radial.hpp"
#include "pdilab/report.hpp"
#include "pdilab/solver.hpp"
#include "pdilab/source.hpp"

namespace pdilab::cli {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  int dim = 3;
  double p = 2.0, gamma = 2.0, lambda = 0.0, c_h = 1.0, nu = 1.0;
  std::string q = "inf";
  std::string op = "p-laplacian";
  int nodes = 0;
  std::uint64_t seed = 1;
  double tol = kUnset;
  std::string out_path;
  std::string profile = "euclidean";

  std::string source = "zero";
  std::string input = "sharpness";
  double r_in = 0.0, r_out = 1.0, right = 0.0;
  std::string left = "neumann";
  double R = 1.0, r = 10.0;
  std::string t_list = "0.01,0.02,0.05,0.1,0.2,0.3,0.4,0.5";
  bool no_lambda = false;
  int pairs = 20000;
  double h_min = 1e-4, h_max = 1e-1, predicted = kUnset;
  double s_index = 1.0, theta = 1.5, omega_radius = 1.0;
  int centers = 16, radius_samples = 241;
  std::string expect;
  double t_start = 1.0;
  std::string mode = "analytic";
  double sigma_r = 1.0;
  std::string weight = "none";
  bool search = false;
  std::string task = "exponents";
  std::vector<std::string> grids;
};

// ---- token parsing ----------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_real(tok));
  return out;
}

// "name:a,b" -> {a, b}
std::vector<double> family_args(const std::string& text, std::size_t expected) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("missing arguments in '" + text + "'");
  auto vals = parse_reals(text.substr(colon + 1));
  if (vals.size() != expected)
    throw UsageError("'" + text + "' needs " + std::to_string(expected) + " arguments");
  return vals;
}

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> read_two_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::vector<double> xs, ys;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2) throw UsageError("expected two columns 'r,value' in '" + path + "'");
    try {
      const double x = parse_real(cols[0]), y = parse_real(cols[1]);
      xs.push_back(x);
      ys.push_back(y);
    } catch (const UsageError&) {
      if (!first) throw;  // a header line is allowed
    }
    first = false;
  }
  Eigen::VectorXd gx = Eigen::Map<Eigen::VectorXd>(xs.data(), Eigen::Index(xs.size()));
  Eigen::VectorXd gy = Eigen::Map<Eigen::VectorXd>(ys.data(), Eigen::Index(ys.size()));
  return {gx, gy};
}

Integrability parse_q(const std::string& s) {
  const double v = parse_real(s);
  return std::isinf(v) ? Integrability::infinite() : Integrability::finite(v);
}

ProblemParams make_params(const Flags& f) {
  ProblemParams p;
  p.dim = f.dim;
  p.p = f.p;
  p.gamma = f.gamma;
  p.lambda = f.lambda;
  p.c_H = f.c_h;
  p.nu = f.nu;
  p.q = parse_q(f.q);
  return p;
}

OperatorKind parse_operator(const std::string& s, double p) {
  if (s == "p-laplacian") return OperatorKind::p_laplacian(p);
  if (s == "mean-curvature") return OperatorKind::mean_curvature();
  if (starts_with(s, "gmc:")) return OperatorKind::generalized_mean_curvature(family_args(s, 1)[0]);
  throw UsageError("unknown operator '" + s + "'");
}

std::string operator_name(const OperatorKind& k) {
  if (const auto* pl = std::get_if<PLaplacian>(&k.family())) {
    (void)pl;
    return "p-laplacian";
  }
  if (std::holds_alternative<MeanCurvature>(k.family())) return "mean-curvature";
  return "gmc";
}

AreaProfile parse_area(const std::string& s, int dim) {
  if (s == "euclidean") return AreaProfile::euclidean(dim);
  if (starts_with(s, "power:")) {
    const auto a = family_args(s, 2);
    return AreaProfile::power(a[0], a[1]);
  }
  if (starts_with(s, "exp:")) {
    const auto a = family_args(s, 2);
    return AreaProfile::exponential(a[0], a[1]);
  }
  if (starts_with(s, "file:")) {
    auto [x, y] = read_two_columns(s.substr(5));
    return AreaProfile::sampled(std::move(x), std::move(y));
  }
  throw UsageError("unknown profile '" + s + "'");
}

SourceTerm parse_source(const std::string& s) {
  if (s == "zero") return SourceTerm::zero();
  if (starts_with(s, "power:")) {
    const auto a = family_args(s, 2);
    return SourceTerm::radial_power(a[0], a[1]);
  }
  if (starts_with(s, "file:")) {
    auto [x, y] = read_two_columns(s.substr(5));
    return SourceTerm::sampled(std::move(x), std::move(y));
  }
  throw UsageError("unknown source '" + s + "'");
}

LeftBoundary parse_left(const std::string& s) {
  if (s == "neumann") return NeumannZero{};
  if (starts_with(s, "value:")) return DirichletValue{family_args(s, 1)[0]};
  throw UsageError("unknown left boundary '" + s + "'");
}

double or_default(double v, double fallback) { return std::isnan(v) ? fallback : v; }

// ---- audit inputs -----------------------------------------------------------

struct ProfileInput {
  RadialProfile profile;
  std::pair<double, double> extent;
};
using AuditInput = std::variant<ProfileInput, DiscreteRadialSolution>;

AuditInput make_input(const Flags& f, const ProblemParams& params, double R) {
  const std::pair<double, double> unit{0.0, std::min(R, 1.0)};
  if (f.input == "sharpness") return ProfileInput{sharpness_profile(params.dim, params.p, params.gamma), unit};
  if (f.input == "entire")
    return ProfileInput{nonconstant_entire_profile(params.dim, params.p, params.gamma, params.c_H), unit};
  if (f.input == "bump") {
    const BumpScale b = bump_profile_scale(params.dim, params.p, params.gamma, params.c_H,
                                           log_grid(1e-2, 1e2, 200));
    const double delta = (params.p - params.gamma) / (params.gamma - (params.p - 1.0));
    return ProfileInput{RadialProfile::bump(b.c, delta), unit};
  }
  if (starts_with(f.input, "power:")) {
    const auto a = family_args(f.input, 2);
    return ProfileInput{RadialProfile::power(a[0], a[1]), unit};
  }
  if (starts_with(f.input, "file:")) {
    auto [x, y] = read_two_columns(f.input.substr(5));
    const std::pair<double, double> ext{x[0], x[x.size() - 1]};
    return ProfileInput{RadialProfile::sampled(std::move(x), std::move(y)), ext};
  }
  if (f.input == "solve") {
    SolverConfig cfg;
    cfg.n_nodes = f.nodes > 0 ? f.nodes : 512;
    return solve_radial_dirichlet(parse_operator(f.op, params.p), params, parse_source(f.source),
                                  RadialDomain{0.0, R}, BoundaryConditions{NeumannZero{}, 0.0}, cfg);
  }
  throw UsageError("unknown input '" + f.input + "'");
}

// ---- reporting --------------------------------------------------------------

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Outcome {
  Json results = Json::object();
  bool pass = true;
  std::string summary;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw UsageError("cannot write '" + path + "'");
  o << text;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    out += a;
    out.push_back('\x1f');
  }
  return out;
}

// ---- commands ---------------------------------------------------------------

Outcome cmd_exponents(const Flags&, const ProblemParams& params) {
  Outcome o;
  const ExponentReport rep = exponents(params);
  o.results["exponents"] = to_json(rep);
  if (params.p < params.dim) o.results["regime"] = to_json(classify_regime(params));
  o.summary = "exponents: s=" + format_real(rep.s) +
              (rep.alpha ? " alpha=" + format_real(*rep.alpha) : std::string(" alpha=undefined"));
  return o;
}

Outcome cmd_verify_sharpness(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const int n = f.nodes > 0 ? f.nodes : 512;
  const double tol = or_default(f.tol, 1e-8);
  const RadialProfile u = sharpness_profile(params.dim, params.p, params.gamma);
  ProblemParams eq = params;
  eq.lambda = 0.0;
  eq.c_H = 1.0;
  const ResidualReport rep = residual_scan(OperatorKind::p_laplacian(params.p), u, eq,
                                           SourceTerm::zero(),
                                           Eigen::VectorXd::LinSpaced(n, 0.05, 0.95), tol);
  o.results["profile"] = to_json(u);
  o.results["residual"] = to_json(rep);
  o.pass = rep.pass && rep.max_abs_residual < tol;
  o.summary = "verify-sharpness: max|residual|=" + format_real(rep.max_abs_residual);
  return o;
}

Outcome cmd_verify_bump(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const int n = f.nodes > 0 ? f.nodes : 200;
  const BumpScale b = bump_profile_scale(params.dim, params.p, params.gamma, params.c_H,
                                         log_grid(1e-2, 1e2, n));
  const double delta = (params.p - params.gamma) / (params.gamma - (params.p - 1.0));
  o.results["profile"] = to_json(RadialProfile::bump(b.c, delta));
  o.results["residual"] = to_json(b.report);
  o.pass = b.report.pass;
  o.summary = "verify-bump: c=" + format_real(b.c) + " min residual=" + format_real(b.report.min_residual);
  return o;
}

Outcome cmd_solve(const Flags& f, ProblemParams params) {
  Outcome o;
  const OperatorKind kind = parse_operator(f.op, params.p);
  params.p = kind.growth_order();
  SolverConfig cfg;
  if (f.nodes > 0) cfg.n_nodes = f.nodes;
  if (!std::isnan(f.tol)) cfg.newton_tol = f.tol;
  const SourceTerm src = parse_source(f.source);
  const DiscreteRadialSolution sol = solve_radial_dirichlet(
      kind, params, src, RadialDomain{f.r_in, f.r_out}, BoundaryConditions{parse_left(f.left), f.right}, cfg);
  o.results["operator"] = operator_name(kind);
  o.results["meta"] = to_json(sol.meta);
  o.results["residual"] = number(solution_residual(sol, src));
  o.results["grid"] = numbers(sol.grid);
  o.results["values"] = numbers(sol.values);
  if (!f.out_path.empty()) {
    std::string csv = "r,value\n";
    for (Eigen::Index i = 0; i < sol.grid.size(); ++i)
      csv += format_real(sol.grid[i]) + "," + format_real(sol.values[i]) + "\n";
    write_file(f.out_path, csv);
  }
  o.summary = "solve: " + std::to_string(sol.meta.iterations) + " Newton steps, residual " +
              format_real(sol.meta.final_residual);
  return o;
}

Outcome cmd_caccioppoli(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const std::vector<double> ts = parse_reals(f.t_list);
  const AuditInput in = make_input(f, params, f.R);
  const CaccioppoliReport rep = std::visit(
      [&](const auto& u) {
        if constexpr (std::is_same_v<std::decay_t<decltype(u)>, ProfileInput>)
          return caccioppoli_audit(u.profile, params, f.R, ts, !f.no_lambda);
        else
          return caccioppoli_audit(u, params, f.R, ts, !f.no_lambda);
      },
      in);
  o.results["input"] = f.input;
  o.results["caccioppoli"] = to_json(rep);
  o.pass = rep.pass;
  o.summary = "audit-caccioppoli: fitted growth " + format_real(rep.fitted_growth) + " vs predicted " +
              format_real(rep.predicted_growth) + (rep.stable ? ", stable" : ", UNSTABLE");
  return o;
}

Outcome cmd_holder(const Flags& f, const ProblemParams& params) {
  Outcome o;
  HolderFitOptions opt;
  opt.pair_budget = f.pairs;
  opt.h_min = f.h_min;
  opt.h_max = f.h_max;
  opt.seed = f.seed;
  // solver output may be more regular than guaranteed: only undershooting fails
  opt.one_sided = f.input == "solve";
  opt.tolerance = or_default(f.tol, opt.one_sided ? 0.1 : 0.05);
  if (!std::isnan(f.predicted)) {
    opt.predicted_alpha = f.predicted;
  } else if (f.input == "sharpness" || f.input == "solve") {
    opt.predicted_alpha = exponents(params).alpha;
  }
  const AuditInput in = make_input(f, params, 1.0);
  const HolderFitReport rep = std::visit(
      [&](const auto& u) {
        if constexpr (std::is_same_v<std::decay_t<decltype(u)>, ProfileInput>)
          return holder_fit(u.profile, u.extent, opt);
        else
          return holder_fit(u, opt);
      },
      in);
  o.results["input"] = f.input;
  o.results["holder"] = to_json(rep);
  o.pass = rep.pass;
  o.summary = "audit-holder: fitted alpha " + format_real(rep.fitted_alpha) + " (r^2 " +
              format_real(rep.r_squared) + ")";
  return o;
}

Outcome cmd_morrey(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const SourceTerm src = parse_source(f.source == "zero" ? "power:1,1" : f.source);
  const MorreyNorm m = morrey_norm(src, params.dim, f.s_index, f.theta, f.omega_radius, f.centers,
                                   f.radius_samples);
  o.results["source"] = f.source == "zero" ? "power:1,1" : f.source;
  o.results["morrey"] = to_json(m);
  o.summary = "morrey: " + (m.value ? format_real(*m.value) : std::string("DIVERGENT"));
  return o;
}

bool expectation_met(const std::string& expect, Verdict v) {
  if (expect.empty()) return true;
  if (expect != "LIOUVILLE" && expect != "NO_LIOUVILLE" && expect != "INCONCLUSIVE")
    throw UsageError("--expect takes LIOUVILLE, NO_LIOUVILLE or INCONCLUSIVE");
  return expect == to_string(v);
}

Outcome cmd_liouville(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const LiouvilleVerdict v = liouville_classify_euclidean(params.dim, params.p, params.gamma);
  const AreaTestResult area = area_condition_test(AreaProfile::euclidean(params.dim), params.p,
                                                  params.gamma, 1.0, AreaTestMode::Analytic);
  o.results["liouville"] = to_json(v);
  o.results["area_test"] = std::string(to_string(area));
  const bool witness_ok = !v.witness_check || v.witness_check->pass;
  const bool consistent = (v.verdict == Verdict::Liouville) == (area == AreaTestResult::Divergent);
  o.results["consistent_with_area_test"] = consistent;
  if (!f.expect.empty()) o.results["expected"] = f.expect;
  o.pass = witness_ok && consistent && expectation_met(f.expect, v.verdict);
  o.summary = "liouville: " + std::string(to_string(v.verdict)) +
              (v.mechanism ? " via " + std::string(to_string(*v.mechanism)) : std::string());
  return o;
}

AreaTestMode parse_mode(const std::string& s) {
  if (s == "analytic") return AreaTestMode::Analytic;
  if (s == "numeric") return AreaTestMode::Numeric;
  throw UsageError("--mode takes analytic or numeric");
}

Outcome cmd_manifold(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const AreaProfile prof = parse_area(f.profile, params.dim);
  const AreaTestMode mode = parse_mode(f.mode);
  const AreaTestResult area = area_condition_test(prof, params.p, params.gamma, f.t_start, mode);
  const LiouvilleVerdict v = liouville_classify_area(prof, params.p, params.gamma, f.t_start, mode);
  o.results["profile"] = f.profile;
  o.results["mode"] = std::string(to_string(mode));
  o.results["rho"] = number(area_exponent(params.p, params.gamma));
  o.results["area_test"] = std::string(to_string(area));
  o.results["liouville"] = to_json(v);
  if (!f.expect.empty()) o.results["expected"] = f.expect;
  o.pass = expectation_met(f.expect, v.verdict);
  o.summary = "manifold: area integral " + std::string(to_string(area));
  return o;
}

Outcome cmd_sigma_bound(const Flags& f, const ProblemParams& params) {
  Outcome o;
  const AreaProfile prof = parse_area(f.profile, params.dim);
  EnergyWeight w = EnergyWeight::None;
  if (f.weight == "exp") w = EnergyWeight::Exponential;
  else if (f.weight != "none") throw UsageError("--weight takes none or exp");
  const SigmaBoundReport rep = sigma_lower_bound(f.sigma_r, params, prof, f.R, f.r, w);
  o.results["profile"] = f.profile;
  o.results["sigma_bound"] = to_json(rep);
  if (f.search) {
    const auto rc = contradiction_radius(f.sigma_r, params, prof, f.R);
    o.results["contradiction_radius"] = rc ? number(*rc) : Json(nullptr);
  }
  o.summary = "sigma-bound: rhs " + format_real(rep.rhs) + " vs lhs " + format_real(rep.lhs) +
              (rep.contradiction ? " (contradiction)" : "");
  return o;
}

// ---- sweep ------------------------------------------------------------------

const std::vector<std::string> kSweepOrder{"dim", "p", "gamma", "q", "lambda", "c-h", "nu"};

std::vector<double> parse_axis(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("range must be start:stop:step");
    const double a = parse_real(parts[0]), b = parse_real(parts[1]), h = parse_real(parts[2]);
    if (!(h > 0.0) || b < a) throw UsageError("range needs step > 0 and stop >= start");
    std::vector<double> out;
    for (long k = 0;; ++k) {
      const double v = a + double(k) * h;
      if (v > b + 1e-9 * h) break;
      out.push_back(v);
    }
    return out;
  }
  return parse_reals(text);
}

void set_param(Flags& f, const std::string& name, double v) {
  if (name == "dim") {
    if (v != std::floor(v)) throw UsageError("dim must be an integer");
    f.dim = int(v);
  } else if (name == "p") f.p = v;
  else if (name == "gamma") f.gamma = v;
  else if (name == "q") f.q = format_real(v);
  else if (name == "lambda") f.lambda = v;
  else if (name == "c-h") f.c_h = v;
  else if (name == "nu") f.nu = v;
}

std::vector<std::string> sweep_columns(const std::string& task) {
  if (task == "exponents") return {"alpha", "s", "gamma_star", "growth", "liouville_regime"};
  if (task == "liouville")
    return {"verdict", "mechanism", "witness", "witness_pass", "area_test", "consistent"};
  throw UsageError("--task takes exponents or liouville");
}

std::vector<std::string> sweep_point(const std::string& task, const Flags& f) {
  const ProblemParams params = make_params(f);
  if (task == "exponents") {
    const ExponentReport rep = exponents(params);
    std::vector<std::string> row{rep.alpha ? format_real(*rep.alpha) : "", format_real(rep.s),
                                 rep.gamma_star ? format_real(*rep.gamma_star) : "", "", ""};
    if (params.p < params.dim) {
      const Regime reg = classify_regime(params);
      row[3] = to_string(reg.growth);
      row[4] = to_string(reg.liouville);
    }
    return row;
  }
  const LiouvilleVerdict v = liouville_classify_euclidean(params.dim, params.p, params.gamma);
  const AreaTestResult area = area_condition_test(AreaProfile::euclidean(params.dim), params.p,
                                                  params.gamma, 1.0, AreaTestMode::Analytic);
  const bool consistent = (v.verdict == Verdict::Liouville) == (area == AreaTestResult::Divergent);
  return {std::string(to_string(v.verdict)),
          v.mechanism ? std::string(to_string(*v.mechanism)) : "",
          std::string(to_string(v.witness)),
          v.witness_check ? (v.witness_check->pass ? "true" : "false") : "",
          std::string(to_string(area)),
          consistent ? "true" : "false"};
}

unsigned sweep_threads(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PDI_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, unsigned(cap));
  }
  return unsigned(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

int cmd_sweep(const Flags& base, std::ostream& out, std::ostream& err) {
  std::map<std::string, std::vector<double>> axes;
  for (const auto& g : base.grids) {
    const auto eq = g.find('=');
    if (eq == std::string::npos) throw UsageError("--grid takes name=values");
    const std::string name = g.substr(0, eq);
    if (std::find(kSweepOrder.begin(), kSweepOrder.end(), name) == kSweepOrder.end())
      throw UsageError("unknown sweep parameter '" + name + "'");
    auto vals = parse_axis(g.substr(eq + 1));
    std::sort(vals.begin(), vals.end());
    axes[name] = std::move(vals);
  }
  if (axes.empty()) throw UsageError("sweep needs at least one --grid");
  std::vector<std::string> names;
  for (const auto& n : kSweepOrder)
    if (axes.count(n)) names.push_back(n);
  const std::vector<std::string> columns = sweep_columns(base.task);

  // odometer over the axes in canonical order: this enumerates rows already sorted
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> idx(names.size(), 0);
  for (;;) {
    std::vector<double> pt;
    for (std::size_t i = 0; i < names.size(); ++i) pt.push_back(axes[names[i]][idx[i]]);
    points.push_back(std::move(pt));
    std::size_t k = names.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[names[k]].size()) break;
      idx[k] = 0;
      if (k == 0) goto done;
    }
  }
done:

  std::vector<std::vector<std::string>> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      Flags f = base;
      std::vector<std::string> row;
      for (std::size_t j = 0; j < names.size(); ++j) {
        set_param(f, names[j], points[i][j]);
        row.push_back(format_real(points[i][j]));
      }
      std::string status = "OK";
      std::vector<std::string> cols;
      try {
        cols = sweep_point(base.task, f);
      } catch (const Error& e) {
        status = std::string(to_string(e.code()));
      } catch (const std::exception&) {
        status = "ERROR";
      }
      cols.resize(columns.size());
      row.push_back(status);
      row.insert(row.end(), cols.begin(), cols.end());
      rows[i] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_threads = sweep_threads(points.size());
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv;
  auto emit = [&csv](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) csv.push_back(',');
      csv += cells[i];
    }
    csv.push_back('\n');
  };
  std::vector<std::string> header = names;
  header.push_back("status");
  header.insert(header.end(), columns.begin(), columns.end());
  emit(header);
  for (const auto& r : rows) emit(r);
  out << csv;
  if (!base.out_path.empty()) write_file(base.out_path, csv);
  err << "sweep: " << rows.size() << " rows (" << base.task << ")\n";
  return 0;
}

// ---- option wiring ----------------------------------------------------------

void add_params(CLI::App* sub, Flags& f) {
  sub->add_option("--dim", f.dim, "dimension N (or homogeneous dimension Q)")->capture_default_str();
  sub->add_option("--p", f.p, "diffusion growth order p > 1")->capture_default_str();
  sub->add_option("--gamma", f.gamma, "gradient power gamma > p-1")->capture_default_str();
  sub->add_option("--lambda", f.lambda, "zero-order coefficient lambda >= 0")->capture_default_str();
  sub->add_option("--q", f.q, "source integrability <real|inf>")->capture_default_str();
  sub->add_option("--c-h", f.c_h, "gradient coefficient c_H > 0")->capture_default_str();
  sub->add_option("--nu", f.nu, "flux growth constant nu > 0")->capture_default_str();
  sub->add_option("--seed", f.seed, "seed for sampled audits")->capture_default_str();
  sub->add_option("--tol", f.tol, "tolerance (command specific default)");
  sub->add_option("--out", f.out_path, "also write the output to <path>");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"pdi-lab: numerical checks for quasilinear inequalities with gradient terms", "pdi-lab"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", PDILAB_VERSION);

  auto* exps = app.add_subcommand("exponents", "Hoelder/Caccioppoli exponents and regime tags");
  add_params(exps, f);

  auto* sharp = app.add_subcommand("verify-sharpness", "residual scan of the explicit sharp solution");
  add_params(sharp, f);
  sharp->add_option("--nodes", f.nodes, "scan nodes on [0.05, 0.95] (default 512)");

  auto* bump = app.add_subcommand("verify-bump", "search and check the bounded bump supersolution");
  add_params(bump, f);
  bump->add_option("--nodes", f.nodes, "log-spaced scan nodes on [1e-2, 1e2] (default 200)");

  auto* solve = app.add_subcommand("solve", "radial Dirichlet problem with damped Newton");
  add_params(solve, f);
  solve->add_option("--operator", f.op, "p-laplacian | mean-curvature | gmc:k")->capture_default_str();
  solve->add_option("--nodes", f.nodes, "grid nodes (default 256)");
  solve->add_option("--source", f.source, "zero | power:A,beta | file:path")->capture_default_str();
  solve->add_option("--r-in", f.r_in, "inner radius")->capture_default_str();
  solve->add_option("--r-out", f.r_out, "outer radius")->capture_default_str();
  solve->add_option("--left", f.left, "neumann | value:v")->capture_default_str();
  solve->add_option("--right", f.right, "Dirichlet value at r_out")->capture_default_str();

  const std::string input_help = "sharpness | entire | bump | power:c,a | file:path | solve";
  auto* cac = app.add_subcommand("audit-caccioppoli", "energy growth against the Caccioppoli bound");
  add_params(cac, f);
  cac->add_option("--input", f.input, input_help)->capture_default_str();
  cac->add_option("--R", f.R, "outer ball radius")->capture_default_str();
  cac->add_option("--t-list", f.t_list, "comma separated inner radii in (0, R)")->capture_default_str();
  cac->add_flag("--no-lambda", f.no_lambda, "drop the lambda * negative-part term");
  cac->add_option("--operator", f.op, "operator for --input solve")->capture_default_str();
  cac->add_option("--source", f.source, "source for --input solve")->capture_default_str();
  cac->add_option("--nodes", f.nodes, "solver nodes for --input solve (default 512)");

  auto* hol = app.add_subcommand("audit-holder", "log-log fit of the Hoelder exponent");
  add_params(hol, f);
  hol->add_option("--input", f.input, input_help)->capture_default_str();
  hol->add_option("--pairs", f.pairs, "sampled pair budget")->capture_default_str();
  hol->add_option("--h-min", f.h_min, "smallest pair distance")->capture_default_str();
  hol->add_option("--h-max", f.h_max, "largest pair distance")->capture_default_str();
  hol->add_option("--predicted", f.predicted, "exponent to compare against");
  hol->add_option("--operator", f.op, "operator for --input solve")->capture_default_str();
  hol->add_option("--source", f.source, "source for --input solve")->capture_default_str();
  hol->add_option("--nodes", f.nodes, "solver nodes for --input solve (default 512)");

  auto* mor = app.add_subcommand("morrey", "Morrey norm of a radial source");
  add_params(mor, f);
  mor->add_option("--source", f.source, "power:A,beta | file:path (default power:1,1)");
  mor->add_option("--s-index", f.s_index, "Lebesgue index s >= 1")->capture_default_str();
  mor->add_option("--theta", f.theta, "scaling index theta in (0, dim]")->capture_default_str();
  mor->add_option("--omega-radius", f.omega_radius, "radius of the ball domain")->capture_default_str();
  mor->add_option("--centers", f.centers, "non-central centers sampled")->capture_default_str();
  mor->add_option("--radius-samples", f.radius_samples, "log-spaced radii")->capture_default_str();

  auto* lio = app.add_subcommand("liouville", "Euclidean Liouville classification with witnesses");
  add_params(lio, f);
  lio->add_option("--expect", f.expect, "LIOUVILLE | NO_LIOUVILLE | INCONCLUSIVE");

  auto* man = app.add_subcommand("manifold", "area-growth Liouville criterion");
  add_params(man, f);
  man->add_option("--profile", f.profile, "euclidean | power:A,beta | exp:A,kappa | file:path")
      ->capture_default_str();
  man->add_option("--t-start", f.t_start, "lower end of the area integral")->capture_default_str();
  man->add_option("--mode", f.mode, "analytic | numeric")->capture_default_str();
  man->add_option("--expect", f.expect, "LIOUVILLE | NO_LIOUVILLE | INCONCLUSIVE");

  auto* sig = app.add_subcommand("sigma-bound", "lower bound on the growth of the gradient energy");
  add_params(sig, f);
  sig->add_option("--profile", f.profile, "euclidean | power:A,beta | exp:A,kappa | file:path")
      ->capture_default_str();
  sig->add_option("--sigma-r", f.sigma_r, "energy on B_R, > 0")->capture_default_str();
  sig->add_option("--R", f.R, "inner radius")->capture_default_str();
  sig->add_option("--r", f.r, "outer radius")->capture_default_str();
  sig->add_option("--weight", f.weight, "none | exp")->capture_default_str();
  sig->add_flag("--search", f.search, "search r = R 2^k for a contradiction");

  auto* swp = app.add_subcommand("sweep", "CSV over a Cartesian parameter grid");
  add_params(swp, f);
  swp->add_option("--task", f.task, "exponents | liouville")->capture_default_str();
  swp->add_option("--grid", f.grids, "name=v1,v2,... or name=start:stop:step; names: dim p gamma q lambda c-h nu")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "sweep") return cmd_sweep(f, out, err);
    const ProblemParams params = make_params(f);
    params.validate();
    Outcome o;
    try {
      if (name == "exponents") o = cmd_exponents(f, params);
      else if (name == "verify-sharpness") o = cmd_verify_sharpness(f, params);
      else if (name == "verify-bump") o = cmd_verify_bump(f, params);
      else if (name == "solve") o = cmd_solve(f, params);
      else if (name == "audit-caccioppoli") o = cmd_caccioppoli(f, params);
      else if (name == "audit-holder") o = cmd_holder(f, params);
      else if (name == "morrey") o = cmd_morrey(f, params);
      else if (name == "liouville") o = cmd_liouville(f, params);
      else if (name == "manifold") o = cmd_manifold(f, params);
      else if (name == "sigma-bound") o = cmd_sigma_bound(f, params);
    } catch (const Error& e) {
      // preconditions are usage errors; everything else is a failed run with a report
      if (e.code() == ErrorCode::PreconditionViolation || e.code() == ErrorCode::IllPosedBoundary ||
          e.code() == ErrorCode::DomainExceeded)
        throw;
      o.results = Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
      o.pass = false;
      o.summary = name + ": " + e.what();
    }
    Json report{{"command", Json{{"name", name}, {"argv", args}}},
                {"params", to_json(params)},
                {"results", std::move(o.results)},
                {"provenance", Json{{"tool", "pdi-lab"},
                                    {"version", PDILAB_VERSION},
                                    {"seed", f.seed},
                                    {"config_hash", hex64(fnv1a64(join_args(args)))}}},
                {"pass", o.pass}};
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!f.out_path.empty() && name != "solve") write_file(f.out_path, text);
    err << o.summary << (o.pass ? " [pass]" : " [FAIL]") << "\n";
    return o.pass ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    return 2;
  }
}

}  // namespace pdilab::cli
