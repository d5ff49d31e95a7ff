#include "pdilab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pdilab/error.hpp"

namespace pdilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Three-point derivative weights on the stencil (x[i-1], x[i], x[i+1]).
Jet sampled_node_jet(const Sampled& s, Eigen::Index i) {
  const double h1 = s.grid[i] - s.grid[i - 1];
  const double h2 = s.grid[i + 1] - s.grid[i];
  const double fm = s.values[i - 1], f0 = s.values[i], fp = s.values[i + 1];
  Jet j;
  j.value = f0;
  j.d1 = -h2 / (h1 * (h1 + h2)) * fm + (h2 - h1) / (h1 * h2) * f0 + h1 / (h2 * (h1 + h2)) * fp;
  j.d2 = 2.0 * (fm / (h1 * (h1 + h2)) - f0 / (h1 * h2) + fp / (h2 * (h1 + h2)));
  return j;
}

bool same_node(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

Jet sampled_jet(const Sampled& s, double r) {
  const Eigen::Index n = s.grid.size();
  const double* first = s.grid.data();
  const double* last = first + n;
  const double* it = std::lower_bound(first, last, r);
  if (it != last && same_node(*it, r)) {
    const Eigen::Index i = it - first;
    require(i >= 1 && i <= n - 2, "sampled derivatives need an interior node");
    return sampled_node_jet(s, i);
  }
  if (it != first && same_node(*(it - 1), r)) {
    const Eigen::Index i = (it - first) - 1;
    require(i >= 1 && i <= n - 2, "sampled derivatives need an interior node");
    return sampled_node_jet(s, i);
  }
  require(it != first && it != last, "radius outside sampled grid", ErrorCode::DomainExceeded);
  const Eigen::Index hi = it - first;
  const Eigen::Index lo = hi - 1;
  require(lo >= 1 && hi <= n - 2, "radius must lie between interior sample nodes");
  const Jet a = sampled_node_jet(s, lo);
  const Jet b = sampled_node_jet(s, hi);
  const double w = (r - s.grid[lo]) / (s.grid[hi] - s.grid[lo]);
  return {(1 - w) * a.value + w * b.value, (1 - w) * a.d1 + w * b.d1, (1 - w) * a.d2 + w * b.d2};
}

double sampled_value(const Sampled& s, double r) {
  const Eigen::Index n = s.grid.size();
  require(r >= s.grid[0] * (1 - 1e-12) && r <= s.grid[n - 1] * (1 + 1e-12),
          "radius outside sampled grid", ErrorCode::DomainExceeded);
  if (r <= s.grid[0]) return s.values[0];
  if (r >= s.grid[n - 1]) return s.values[n - 1];
  const double* first = s.grid.data();
  const Eigen::Index hi = std::upper_bound(first, first + n, r) - first;
  const Eigen::Index lo = hi - 1;
  const double w = (r - s.grid[lo]) / (s.grid[hi] - s.grid[lo]);
  return (1 - w) * s.values[lo] + w * s.values[hi];
}

}  // namespace

RadialProfile RadialProfile::power_shifted(double c, double a) {
  require(std::isfinite(c) && std::isfinite(a), "profile coefficients must be finite");
  require(a != 0.0 || c == 0.0, "power-shifted profile needs a != 0 unless c = 0");
  return RadialProfile(PowerShifted{c, a});
}

RadialProfile RadialProfile::power(double c, double a) {
  require(std::isfinite(c) && std::isfinite(a), "profile coefficients must be finite");
  require(a != 0.0 || c == 0.0, "power profile needs a != 0 unless c = 0");
  return RadialProfile(Power{c, a});
}

RadialProfile RadialProfile::bump(double c, double delta) {
  require(std::isfinite(c) && std::isfinite(delta), "profile coefficients must be finite");
  return RadialProfile(Bump{c, delta});
}

RadialProfile RadialProfile::constant(double value) { return bump(value, 0.0); }

RadialProfile RadialProfile::sampled(Eigen::VectorXd grid, Eigen::VectorXd values) {
  require(grid.size() >= 4, "sampled profile needs at least 4 nodes");
  require(grid.size() == values.size(), "sampled profile grid/values size mismatch");
  require(grid[0] > 0.0, "sampled profile grid must be positive");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "sampled profile grid must be strictly increasing");
  return RadialProfile(Sampled{std::move(grid), std::move(values)});
}

std::pair<double, double> RadialProfile::domain() const {
  if (const auto* s = std::get_if<Sampled>(&family_))
    return {s->grid[0], s->grid[s->grid.size() - 1]};
  return {0.0, std::numeric_limits<double>::infinity()};
}

double RadialProfile::value(double r) const {
  return std::visit(
      overloaded{
          [&](const PowerShifted& f) { return f.c == 0.0 ? 0.0 : f.c * (std::pow(r, f.a) - 1.0); },
          [&](const Power& f) { return f.c == 0.0 ? 0.0 : f.c * std::pow(r, f.a); },
          [&](const Bump& f) { return f.c * std::pow(1.0 + r * r, -0.5 * f.delta); },
          [&](const Sampled& f) { return sampled_value(f, r); },
      },
      family_);
}

Jet RadialProfile::jet(double r) const {
  return std::visit(
      overloaded{
          [&](const PowerShifted& f) {
            if (f.c == 0.0) return Jet{};
            const double ra = std::pow(r, f.a);
            return Jet{f.c * (ra - 1.0), f.c * f.a * ra / r, f.c * f.a * (f.a - 1.0) * ra / (r * r)};
          },
          [&](const Power& f) {
            if (f.c == 0.0) return Jet{};
            const double ra = std::pow(r, f.a);
            return Jet{f.c * ra, f.c * f.a * ra / r, f.c * f.a * (f.a - 1.0) * ra / (r * r)};
          },
          [&](const Bump& f) {
            const double w = 1.0 + r * r;
            const double base = std::pow(w, -0.5 * f.delta);
            const double d1 = -f.c * f.delta * r * base / w;
            const double d2 = -f.c * f.delta * base / (w * w) * (1.0 - (f.delta + 1.0) * r * r);
            return Jet{f.c * base, d1, d2};
          },
          [&](const Sampled& f) { return sampled_jet(f, r); },
      },
      family_);
}

double RadialProfile::nodal_slope(Eigen::Index i) const {
  const auto* s = std::get_if<Sampled>(&family_);
  require(s != nullptr, "nodal_slope is only defined for sampled profiles");
  const Eigen::Index n = s->grid.size();
  require(i >= 0 && i < n, "node index out of range");
  const auto& x = s->grid;
  const auto& v = s->values;
  if (i == 0) {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    return -(2 * h1 + h2) / (h1 * (h1 + h2)) * v[0] + (h1 + h2) / (h1 * h2) * v[1] -
           h1 / (h2 * (h1 + h2)) * v[2];
  }
  if (i == n - 1) {
    const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
    return h2 / (h1 * (h1 + h2)) * v[n - 3] - (h1 + h2) / (h1 * h2) * v[n - 2] +
           (2 * h2 + h1) / (h2 * (h1 + h2)) * v[n - 1];
  }
  return sampled_node_jet(*s, i).d1;
}

RadialProfile RadialProfile::negated() const {
  return std::visit(overloaded{
                        [](const PowerShifted& f) { return RadialProfile(PowerShifted{-f.c, f.a}); },
                        [](const Power& f) { return RadialProfile(Power{-f.c, f.a}); },
                        [](const Bump& f) { return RadialProfile(Bump{-f.c, f.delta}); },
                        [](const Sampled& f) { return RadialProfile(Sampled{f.grid, -f.values}); },
                    },
                    family_);
}

OperatorKind OperatorKind::p_laplacian(double p) {
  require(std::isfinite(p) && p > 1.0, "p-Laplacian needs p > 1");
  return OperatorKind(PLaplacian{p});
}

OperatorKind OperatorKind::generalized_mean_curvature(double k) {
  require(std::isfinite(k) && k >= 2.0, "generalized mean curvature needs k >= 2");
  return OperatorKind(GeneralizedMeanCurvature{k});
}

double OperatorKind::growth_order() const {
  return std::visit(overloaded{
                        [](const PLaplacian& o) { return o.p; },
                        [](const MeanCurvature&) { return 2.0; },
                        [](const GeneralizedMeanCurvature& o) { return 0.5 * o.k; },
                    },
                    family_);
}

bool OperatorKind::needs_regularization() const {
  return std::visit(overloaded{
                        [](const PLaplacian& o) { return o.p != 2.0; },
                        [](const MeanCurvature&) { return false; },
                        [](const GeneralizedMeanCurvature& o) { return o.k != 2.0; },
                    },
                    family_);
}

double OperatorKind::flux(double s, double eps) const {
  return std::visit(
      overloaded{
          [&](const PLaplacian& o) {
            if (o.p == 2.0) return s;
            if (eps == 0.0) return s == 0.0 ? 0.0 : s * std::pow(std::abs(s), o.p - 2.0);
            return s * std::pow(s * s + eps * eps, 0.5 * (o.p - 2.0));
          },
          [&](const MeanCurvature&) { return s / std::sqrt(1.0 + s * s); },
          [&](const GeneralizedMeanCurvature& o) {
            const double abs_s = std::abs(s);
            const double weight = (o.k == 2.0)   ? 1.0
                                  : (eps == 0.0) ? std::pow(abs_s, o.k - 2.0)
                                                 : std::pow(s * s + eps * eps, 0.5 * (o.k - 2.0));
            return s * weight / std::sqrt(1.0 + std::pow(abs_s, o.k));
          },
      },
      family_);
}

double OperatorKind::flux_derivative(double s, double eps) const {
  return std::visit(
      overloaded{
          [&](const PLaplacian& o) {
            if (o.p == 2.0) return 1.0;
            if (eps == 0.0) {
              if (s == 0.0)
                return o.p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
              return (o.p - 1.0) * std::pow(std::abs(s), o.p - 2.0);
            }
            const double q = s * s + eps * eps;
            return std::pow(q, 0.5 * (o.p - 4.0)) * ((o.p - 1.0) * s * s + eps * eps);
          },
          [&](const MeanCurvature&) { return std::pow(1.0 + s * s, -1.5); },
          [&](const GeneralizedMeanCurvature& o) {
            const double abs_s = std::abs(s);
            const double sk = std::pow(abs_s, o.k);
            double weight, log_slope;
            if (o.k == 2.0) {
              weight = 1.0;
              log_slope = 0.0;
            } else if (eps == 0.0) {
              if (s == 0.0) return 0.0;
              weight = std::pow(abs_s, o.k - 2.0);
              log_slope = o.k - 2.0;
            } else {
              const double q = s * s + eps * eps;
              weight = std::pow(q, 0.5 * (o.k - 2.0));
              log_slope = (o.k - 2.0) * s * s / q;
            }
            const double w = weight / std::sqrt(1.0 + sk);
            return w * (1.0 + log_slope - 0.5 * o.k * sk / (1.0 + sk));
          },
      },
      family_);
}

double radial_operator(const OperatorKind& kind, const RadialProfile& profile, double r, int dim) {
  require(r > 0.0, "radial operator needs r > 0");
  const Jet j = profile.jet(r);
  const double n1 = dim - 1.0;
  if (const auto* pl = std::get_if<PLaplacian>(&kind.family())) {
    const double p = pl->p;
    if (j.d1 == 0.0 && p != 2.0) {
      // |V'|^{p-2} V'' only blows up when V'' does not vanish with V'
      if (p < 2.0 && j.d2 != 0.0)
        throw Error(ErrorCode::DegeneratePoint,
                    "V'(r) = 0 with p < 2 at r = " + std::to_string(r));
      return 0.0;
    }
    const double weight = (p == 2.0) ? 1.0 : std::pow(std::abs(j.d1), p - 2.0);
    return -weight * ((p - 1.0) * j.d2 + n1 * j.d1 / r);
  }
  return -(kind.flux_derivative(j.d1) * j.d2 + n1 * kind.flux(j.d1) / r);
}

RadialProfile sharpness_profile(int dim, double p, double gamma) {
  require(dim >= 2 && p > 1.0 && p < dim, "sharpness profile needs 1 < p < dim");
  require(compare_exponents(gamma, p) > 0, "sharpness profile needs gamma > p");
  const double excess = gamma - (p - 1.0);
  const double balance = (dim - 1.0) * gamma - dim * (p - 1.0);
  require(balance > 0.0, "sharpness profile needs (dim-1) gamma > dim (p-1)");
  const double a = (gamma - p) / excess;
  const double c = -(excess / (gamma - p)) * std::pow(balance / excess, 1.0 / excess);
  return RadialProfile::power_shifted(c, a);
}

RadialProfile nonconstant_entire_profile(int dim, double p, double gamma, double c_H) {
  require(c_H > 0.0, "c_H must be > 0");
  const double star = liouville_threshold(dim, p);
  require(compare_exponents(gamma, star) > 0,
          "entire non-constant profiles need gamma above the Liouville threshold");
  require(compare_exponents(gamma, p) != 0,
          "gamma = p needs a logarithmic profile, which is not provided");
  const double excess = gamma - (p - 1.0);
  const double e = (gamma - p) / excess;
  const double bracket = ((dim - 1.0) * gamma - dim * (p - 1.0)) / excess;
  // (|C| |e|)^{gamma-(p-1)} = bracket / c_H, with sign(C e) < 0 so that -Delta_p u > 0
  const double magnitude = std::pow(bracket / c_H, 1.0 / excess) / std::abs(e);
  return RadialProfile::power(e > 0.0 ? -magnitude : magnitude, e);
}

ResidualReport residual_scan(const OperatorKind& kind, const RadialProfile& profile,
                             const ProblemParams& params, const SourceTerm& f,
                             const Eigen::VectorXd& grid, double tol) {
  require(grid.size() > 0, "residual scan needs a nonempty grid");
  require(tol >= 0.0, "tolerance must be nonnegative");
  ResidualReport rep;
  rep.grid = grid;
  rep.tol = tol;
  rep.residuals.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double slope = profile.jet(r).d1;
    rep.residuals[i] = radial_operator(kind, profile, r, params.dim) -
                       params.c_H * std::pow(std::abs(slope), params.gamma) +
                       params.lambda * profile.value(r) + f(r);
  }
  rep.min_residual = rep.residuals.minCoeff();
  rep.max_abs_residual = rep.residuals.cwiseAbs().maxCoeff();
  rep.pass = std::isfinite(rep.min_residual) && rep.min_residual >= -tol;
  return rep;
}

namespace {

struct BumpProblem {
  int dim;
  double p, gamma, c_H, delta, bracket;
  const Eigen::VectorXd& grid;

  ProblemParams params() const {
    ProblemParams out;
    out.dim = dim;
    out.p = p;
    out.gamma = gamma;
    out.c_H = c_H;
    return out;
  }

  // Limit of -Delta_p u / (c_H |grad u|^gamma) as r -> inf.
  double far_field_ratio(double c) const {
    return bracket * std::pow(c * delta, p - 1.0 - gamma) / c_H;
  }

  ResidualReport scan(double c) const {
    return residual_scan(OperatorKind::p_laplacian(p), RadialProfile::bump(c, delta), params(),
                         SourceTerm::zero(), grid, 0.0);
  }

  bool admissible(double c) const { return far_field_ratio(c) > 1.0 && scan(c).pass; }
};

}  // namespace

BumpScale bump_profile_scale(int dim, double p, double gamma, double c_H,
                             const Eigen::VectorXd& grid) {
  require(dim >= 2 && p > 1.0 && p < dim, "bump profile needs 1 < p < dim");
  require(gamma > p - 1.0, "bump profile needs gamma > p - 1");
  require(compare_exponents(gamma, p) < 0, "bump profile needs gamma < p (delta > 0)");
  require(c_H > 0.0, "c_H must be > 0");
  require(grid.size() > 0 && grid.minCoeff() > 0.0, "bump grid must be positive");
  const double excess = gamma - (p - 1.0);
  const BumpProblem prob{dim,   p, gamma, c_H, (p - gamma) / excess,
                         (dim - 1.0) - (p - 1.0) / excess, grid};

  // Admissibility is monotone in c: the diffusion side scales like c^{p-1},
  // the gradient side like c^gamma with gamma > p - 1.
  double hi = 1e3;
  if (prob.admissible(hi)) return {hi, prob.scan(hi)};
  constexpr double floor_scale = 1e-30;
  double lo = hi;
  while (!prob.admissible(lo)) {
    hi = lo;
    lo *= 1e-2;
    if (lo < floor_scale)
      throw Error(ErrorCode::NoAdmissibleScale,
                  "no c in [1e-30, 1e3] makes the bump a supersolution");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (prob.admissible(mid)) lo = mid;
    else hi = mid;
  }
  const double c = 0.5 * lo;
  ResidualReport rep = prob.scan(c);
  require(rep.pass, "bump scale lost admissibility after backing off", ErrorCode::NoAdmissibleScale);
  return {c, std::move(rep)};
}

Eigen::VectorXd log_grid(double lo, double hi, Eigen::Index n) {
  require(lo > 0.0 && hi > lo && n >= 2, "log grid needs 0 < lo < hi and n >= 2");
  Eigen::VectorXd out(n);
  const double step = std::log(hi / lo) / double(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = lo * std::exp(step * double(i));
  out[n - 1] = hi;
  return out;
}

}  // namespace pdilab
