#include "pdilab/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pdilab/audit.hpp"
#include "pdilab/error.hpp"

namespace pdilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

// Log-linear interpolation of sampled areas.
double sampled_log_area(const SampledArea& s, double t) {
  const Eigen::Index n = s.grid.size();
  const double slack = 1e-12 * std::max(1.0, s.grid[n - 1]);
  require(t >= s.grid[0] - slack && t <= s.grid[n - 1] + slack, "t outside the sampled area grid",
          ErrorCode::DomainExceeded);
  if (t <= s.grid[0]) return std::log(s.values[0]);
  if (t >= s.grid[n - 1]) return std::log(s.values[n - 1]);
  const Eigen::Index hi = std::upper_bound(s.grid.data(), s.grid.data() + n, t) - s.grid.data();
  const Eigen::Index lo = hi - 1;
  const double w = std::log(t / s.grid[lo]) / std::log(s.grid[hi] / s.grid[lo]);
  return (1 - w) * std::log(s.values[lo]) + w * std::log(s.values[hi]);
}

// exact int_a^b t^{-e} dt
double power_integral(double a, double b, double e) {
  if (b <= a) return 0.0;
  const double m = 1.0 - e;
  if (m == 0.0) return std::log(b / a);
  // a^m ((b/a)^m - 1) / m, with expm1 for |m| near 0
  return std::pow(a, m) * std::expm1(m * std::log(b / a)) / m;
}

}  // namespace

AreaProfile AreaProfile::euclidean(int dim) {
  require(dim >= 1, "dimension must be >= 1");
  return AreaProfile(EuclideanArea{dim});
}

AreaProfile AreaProfile::power(double A, double beta) {
  require(A > 0.0, "power area needs A > 0");
  return AreaProfile(PowerArea{A, beta});
}

AreaProfile AreaProfile::exponential(double A, double kappa) {
  require(A > 0.0, "exponential area needs A > 0");
  return AreaProfile(ExponentialArea{A, kappa});
}

AreaProfile AreaProfile::sampled(Eigen::VectorXd grid, Eigen::VectorXd values) {
  require(grid.size() >= 2 && grid.size() == values.size(),
          "sampled area needs >= 2 nodes and matching sizes");
  require(grid[0] > 0.0, "sampled area grid must be positive");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "sampled area grid must be strictly increasing");
  require(values.minCoeff() > 0.0, "areas must be strictly positive");
  return AreaProfile(SampledArea{std::move(grid), std::move(values)});
}

double AreaProfile::normalization() const {
  return std::visit(overloaded{
                        [](const EuclideanArea& e) { return e.dim * unit_ball_volume(e.dim); },
                        [](const PowerArea& a) { return a.A; },
                        [](const ExponentialArea& a) { return a.A; },
                        [](const SampledArea&) { return 1.0; },
                    },
                    family_);
}

double AreaProfile::log_shape(double t) const {
  require(t > 0.0, "area is evaluated at t > 0");
  return std::visit(overloaded{
                        [t](const EuclideanArea& e) { return (e.dim - 1.0) * std::log(t); },
                        [t](const PowerArea& a) { return a.beta * std::log(t); },
                        [t](const ExponentialArea& a) { return a.kappa * t; },
                        [t](const SampledArea& s) { return sampled_log_area(s, t); },
                    },
                    family_);
}

double AreaProfile::log_area(double t) const { return std::log(normalization()) + log_shape(t); }

double AreaProfile::area(double t) const { return std::exp(log_area(t)); }

double AreaProfile::extent() const {
  if (const auto* s = std::get_if<SampledArea>(&family_)) return s->grid[s->grid.size() - 1];
  return std::numeric_limits<double>::infinity();
}

double area_exponent(double p, double gamma) {
  require(p > 1.0, "p must be > 1");
  require(compare_exponents(gamma, p - 1.0) > 0, "gamma must exceed p - 1");
  return (gamma - (p - 1.0)) / (p - 1.0);
}

std::string_view to_string(AreaTestMode m) {
  return m == AreaTestMode::Analytic ? "ANALYTIC" : "NUMERIC";
}

std::string_view to_string(AreaTestResult r) {
  switch (r) {
    case AreaTestResult::Divergent: return "DIVERGENT";
    case AreaTestResult::Convergent: return "CONVERGENT";
    case AreaTestResult::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string_view to_string(EnergyWeight w) {
  return w == EnergyWeight::None ? "NONE" : "EXPONENTIAL";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Liouville: return "LIOUVILLE";
    case Verdict::NoLiouville: return "NO_LIOUVILLE";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::ClosedFormThreshold: return "CLOSED_FORM_THRESHOLD";
    case Mechanism::AreaIntegralDiverges: return "AREA_INTEGRAL_DIVERGES";
    case Mechanism::CounterexampleWitness: return "COUNTEREXAMPLE_WITNESS";
    case Mechanism::AreaIntegralConverges: return "AREA_INTEGRAL_CONVERGES";
  }
  return "?";
}

std::string_view to_string(WitnessKind w) {
  switch (w) {
    case WitnessKind::None: return "NONE";
    case WitnessKind::Bump: return "BUMP";
    case WitnessKind::EntirePower: return "ENTIRE_POWER";
    case WitnessKind::Unavailable: return "WITNESS_UNAVAILABLE";
  }
  return "?";
}

namespace {

AreaTestResult analytic_test(const AreaProfile& profile, double rho) {
  return std::visit(
      overloaded{
          [rho](const EuclideanArea& e) {
            return compare_exponents((e.dim - 1.0) * rho, 1.0) <= 0 ? AreaTestResult::Divergent
                                                                   : AreaTestResult::Convergent;
          },
          [rho](const PowerArea& a) {
            return compare_exponents(a.beta * rho, 1.0) <= 0 ? AreaTestResult::Divergent
                                                            : AreaTestResult::Convergent;
          },
          [](const ExponentialArea& a) {
            return a.kappa > 0.0 ? AreaTestResult::Convergent : AreaTestResult::Divergent;
          },
          [](const SampledArea&) { return AreaTestResult::Inconclusive; },
      },
      profile.family());
}

// int_T^{2T} area^{-rho}, written as T int_0^1 area(T(1+x))^{-rho} dx
double dyadic_piece(const AreaProfile& profile, double rho, double T) {
  const double log_T = std::log(T);
  const auto integrand = [&](double x) {
    return std::exp(log_T - rho * profile.log_area(T * (1.0 + x)));
  };
  return Kronrod::integrate(integrand, 0.0, 1.0, 10, 1e-14);
}

AreaTestResult numeric_test(const AreaProfile& profile, double rho, double t_start) {
  constexpr int kRun = 3;
  constexpr double kVanishing = 1e-12;
  constexpr double kRatioFloor = 1.0 - 1e-9;
  constexpr int kWarmup = 4;
  double total = 0.0, prev_piece = 0.0;
  int small_run = 0, flat_run = 0;
  for (int k = 0;; ++k) {
    const double T = std::ldexp(t_start, k);
    if (!std::isfinite(2.0 * T) || 2.0 * T > profile.extent()) return AreaTestResult::Inconclusive;
    const double piece = dyadic_piece(profile, rho, T);
    if (!std::isfinite(piece)) return AreaTestResult::Divergent;
    total += piece;
    if (!std::isfinite(total)) return AreaTestResult::Divergent;
    small_run = (piece < kVanishing * total) ? small_run + 1 : 0;
    if (small_run >= kRun) return AreaTestResult::Convergent;
    if (k > 0 && prev_piece > 0.0) {
      flat_run = (piece / prev_piece >= kRatioFloor) ? flat_run + 1 : 0;
      if (k >= kWarmup && flat_run >= kRun) return AreaTestResult::Divergent;
    }
    prev_piece = piece;
  }
}

}  // namespace

AreaTestResult area_condition_test(const AreaProfile& profile, double p, double gamma,
                                   double t_start, AreaTestMode mode) {
  const double rho = area_exponent(p, gamma);
  require(t_start > 0.0, "t_start must be > 0");
  require(t_start < profile.extent(), "t_start beyond the sampled area grid");
  return mode == AreaTestMode::Analytic ? analytic_test(profile, rho)
                                        : numeric_test(profile, rho, t_start);
}

SigmaBoundReport sigma_lower_bound(double sigma_R, const ProblemParams& params,
                                   const AreaProfile& profile, double R, double r,
                                   EnergyWeight weight) {
  params.validate();
  require(sigma_R > 0.0, "sigma(R) must be > 0 for a nonconstant u");
  require(R > 0.0 && r >= R, "need 0 < R <= r");
  require(r <= profile.extent(), "r beyond the sampled area grid", ErrorCode::DomainExceeded);
  const double rho = area_exponent(params.p, params.gamma);

  SigmaBoundReport rep;
  rep.R = R;
  rep.r = r;
  rep.sigma_R = sigma_R;
  rep.weight = weight;
  rep.rho = rho;
  rep.lhs = std::pow(sigma_R, -rho) / rho;
  rep.constant_C = std::pow(params.c_H / params.nu, params.gamma / (params.p - 1.0));
  rep.area_normalization = profile.normalization();
  rep.reduced_integral = std::visit(
      overloaded{
          [&](const EuclideanArea& e) { return power_integral(R, r, (e.dim - 1.0) * rho); },
          [&](const PowerArea& a) { return power_integral(R, r, a.beta * rho); },
          [&](const auto&) {
            if (r == R) return 0.0;
            return Kronrod::integrate(
                [&](double t) { return std::exp(-rho * profile.log_shape(t)); }, R, r, 15, 1e-13);
          },
      },
      profile.family());
  rep.comparison_integral = std::pow(rep.area_normalization, -rho) * rep.reduced_integral;
  rep.rhs = rep.constant_C * rep.comparison_integral;
  rep.contradiction = rep.rhs > rep.lhs;
  return rep;
}

std::optional<double> contradiction_radius(double sigma_R, const ProblemParams& params,
                                           const AreaProfile& profile, double R,
                                           int max_doublings) {
  for (int k = 1; k <= max_doublings; ++k) {
    const double r = std::ldexp(R, k);
    if (!std::isfinite(r) || r > profile.extent()) break;
    if (sigma_lower_bound(sigma_R, params, profile, R, r).contradiction) return r;
  }
  return std::nullopt;
}

LiouvilleVerdict liouville_classify_euclidean(int dim, double p, double gamma) {
  require(p > 1.0 && p < dim, "Euclidean classification needs 1 < p < dim");
  require(compare_exponents(gamma, p - 1.0) > 0, "gamma must exceed p - 1");
  LiouvilleVerdict out;
  out.gamma_star = liouville_threshold(dim, p);
  if (compare_exponents(gamma, out.gamma_star) <= 0) {
    out.verdict = Verdict::Liouville;
    out.mechanism = Mechanism::ClosedFormThreshold;
    return out;
  }
  out.verdict = Verdict::NoLiouville;
  const int side = compare_exponents(gamma, p);
  if (side == 0) {
    out.mechanism = Mechanism::ClosedFormThreshold;
    out.witness = WitnessKind::Unavailable;
    return out;
  }
  out.mechanism = Mechanism::CounterexampleWitness;
  ProblemParams params;
  params.dim = dim;
  params.p = p;
  params.gamma = gamma;
  const OperatorKind kind = OperatorKind::p_laplacian(p);
  if (side < 0) {
    out.witness = WitnessKind::Bump;
    BumpScale scale = bump_profile_scale(dim, p, gamma, 1.0, log_grid(1e-2, 1e2, 200));
    out.witness_profile = RadialProfile::bump(scale.c, (p - gamma) / (gamma - (p - 1.0)));
    out.witness_check = std::move(scale.report);
  } else {
    out.witness = WitnessKind::EntirePower;
    out.witness_profile = nonconstant_entire_profile(dim, p, gamma, 1.0);
    out.witness_check = residual_scan(kind, *out.witness_profile, params, SourceTerm::zero(),
                                      log_grid(0.1, 10.0, 200), 1e-8);
  }
  return out;
}

LiouvilleVerdict liouville_classify_area(const AreaProfile& profile, double p, double gamma,
                                         double t_start, AreaTestMode mode) {
  LiouvilleVerdict out;
  if (const auto* e = std::get_if<EuclideanArea>(&profile.family()); e && e->dim >= 2)
    out.gamma_star = (e->dim * (p - 1.0)) / (e->dim - 1.0);
  switch (area_condition_test(profile, p, gamma, t_start, mode)) {
    case AreaTestResult::Divergent:
      out.verdict = Verdict::Liouville;
      out.mechanism = Mechanism::AreaIntegralDiverges;
      break;
    case AreaTestResult::Convergent:
      out.verdict = Verdict::Inconclusive;
      out.mechanism = Mechanism::AreaIntegralConverges;
      break;
    case AreaTestResult::Inconclusive:
      out.verdict = Verdict::Inconclusive;
      break;
  }
  return out;
}

}  // namespace pdilab
