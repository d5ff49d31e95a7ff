#include "pdilab/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pdilab/error.hpp"

namespace pdilab {

double unit_ball_volume(int dim) {
  require(dim >= 1, "dimension must be >= 1");
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

namespace {

template <class Integrand>
double trapezoid_on_lattice(const Integrand& g, double a, double b, double step) {
  require(step > 0.0, "quadrature step must be > 0");
  if (b <= a) return 0.0;
  const double tol = 1e-9 * step;
  auto k = static_cast<long long>(std::floor((a + tol) / step)) + 1;
  double prev_r = a;
  double prev_g = g(a);
  double acc = 0.0;
  for (;; ++k) {
    const double r = static_cast<double>(k) * step;
    if (r >= b - tol) break;
    const double gr = g(r);
    acc += 0.5 * (r - prev_r) * (prev_g + gr);
    prev_r = r;
    prev_g = gr;
  }
  acc += 0.5 * (b - prev_r) * (prev_g + g(b));
  return acc;
}

// Trapezoid over nodal data truncated at t (linear interpolation of the last panel).
double trapezoid_nodal(const Eigen::VectorXd& x, const Eigen::VectorXd& g, double t) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    if (x[i] >= t) break;
    if (x[i + 1] <= t) {
      acc += 0.5 * (x[i + 1] - x[i]) * (g[i] + g[i + 1]);
    } else {
      const double w = (t - x[i]) / (x[i + 1] - x[i]);
      const double gt = (1 - w) * g[i] + w * g[i + 1];
      acc += 0.5 * (t - x[i]) * (g[i] + gt);
      break;
    }
  }
  return acc;
}

void check_extent(double t, double lo, double hi) {
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  require(t >= lo - slack && t <= hi + slack, "radius outside the domain of u",
          ErrorCode::DomainExceeded);
}

double sphere_weight(int dim, double r) {
  return dim * unit_ball_volume(dim) * std::pow(r, dim - 1.0);
}

// Integrand |V'|^gamma * area(r) of a closed-form profile; zero at the origin.
auto closed_form_energy_density(const RadialProfile& u, double gamma, int dim) {
  return [&u, gamma, dim](double r) {
    if (r <= 0.0) return 0.0;
    return std::pow(std::abs(u.jet(r).d1), gamma) * sphere_weight(dim, r);
  };
}

Eigen::VectorXd nodal_slopes(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    out[i] = -h2 / (h1 * (h1 + h2)) * v[i - 1] + (h2 - h1) / (h1 * h2) * v[i] +
             h1 / (h2 * (h1 + h2)) * v[i + 1];
  }
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    out[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * v[0] + (h1 + h2) / (h1 * h2) * v[1] -
             h1 / (h2 * (h1 + h2)) * v[2];
  }
  {
    const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
    out[n - 1] = h2 / (h1 * (h1 + h2)) * v[n - 3] - (h1 + h2) / (h1 * h2) * v[n - 2] +
                 (2 * h2 + h1) / (h2 * (h1 + h2)) * v[n - 1];
  }
  return out;
}

double nodal_energy(const Eigen::VectorXd& x, const Eigen::VectorXd& slopes, double gamma,
                    int dim, double t) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = std::pow(std::abs(slopes[i]), gamma) * sphere_weight(dim, x[i]);
  return trapezoid_nodal(x, g, t);
}

double nodal_negative_mass(const Eigen::VectorXd& x, const Eigen::VectorXd& v, int dim, double t) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = std::max(-v[i], 0.0) * sphere_weight(dim, x[i]);
  return trapezoid_nodal(x, g, t);
}

Eigen::VectorXd sampled_slopes(const RadialProfile& u) {
  const auto& s = std::get<Sampled>(u.family());
  Eigen::VectorXd out(s.grid.size());
  for (Eigen::Index i = 0; i < s.grid.size(); ++i) out[i] = u.nodal_slope(i);
  return out;
}

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit out;
  const std::size_t n = x.size();
  if (n < 2) return out;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return out;
  out.slope = sxy / sxx;
  out.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

template <class EnergyFn>
CaccioppoliReport caccioppoli_common(const EnergyFn& energy, const ProblemParams& params, double R,
                                     std::span<const double> t_list) {
  require(R > 0.0, "R must be > 0");
  require(!t_list.empty(), "t_list must be nonempty");
  CaccioppoliReport rep;
  rep.R = R;
  rep.predicted_s = caccioppoli_exponent(params);
  rep.predicted_growth = params.dim - rep.predicted_s;
  rep.radii_t.assign(t_list.begin(), t_list.end());
  std::sort(rep.radii_t.begin(), rep.radii_t.end());
  for (double t : rep.radii_t) require(t > 0.0 && t < R, "every t must lie in (0, R)");

  const double Rd = std::pow(R, params.dim);
  std::vector<double> log_t, log_e, normalized;
  for (double t : rep.radii_t) {
    const double e = energy(t);
    rep.energies.push_back(e);
    rep.fitted_K = std::max(rep.fitted_K, e * std::pow(R - t, rep.predicted_s) / Rd);
    normalized.push_back(e / std::pow(t, rep.predicted_growth));
    if (e > 0.0 && t <= 0.5 * R) {
      log_t.push_back(std::log(t));
      log_e.push_back(std::log(e));
    }
  }
  if (log_t.size() < 2) {
    log_t.clear();
    log_e.clear();
    for (std::size_t i = 0; i < rep.radii_t.size(); ++i) {
      if (rep.energies[i] > 0.0) {
        log_t.push_back(std::log(rep.radii_t[i]));
        log_e.push_back(std::log(rep.energies[i]));
      }
    }
  }
  rep.fitted_growth = least_squares(log_t, log_e).slope;

  // energy / t^{dim-s} must stay bounded as t -> 0
  const std::size_t half = (normalized.size() + 1) / 2;
  const double inner = *std::max_element(normalized.begin(), normalized.begin() + half);
  const double outer = (half < normalized.size())
                           ? *std::max_element(normalized.begin() + half, normalized.end())
                           : inner;
  rep.stable = inner <= 2.0 * outer || inner == 0.0;
  rep.pass = std::isfinite(rep.fitted_K);
  return rep;
}

class PairSampler {
 public:
  explicit PairSampler(std::uint64_t seed) : engine_(seed) {}
  // uniform in [0, 1) with 53 random bits, independent of the standard library's distributions
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

template <class ValueFn>
HolderFitReport holder_common(const ValueFn& value, double lo, double hi,
                              const HolderFitOptions& opt) {
  require(opt.pair_budget > 0, "pair budget must be > 0");
  require(opt.h_min > 0.0 && opt.h_max > opt.h_min, "scale range needs 0 < h_min < h_max");
  require(opt.h_max <= hi - lo, "scale range exceeds the domain extent");
  const int n_bins = static_cast<int>(std::floor(std::log2(opt.h_max / opt.h_min) + 1e-9));
  if (n_bins < 3)
    throw Error(ErrorCode::InsufficientScales, "fewer than 3 dyadic distance bins");
  const int per_bin = std::max(1, opt.pair_budget / n_bins);
  PairSampler rng(opt.seed);

  HolderFitReport rep;
  rep.predicted_alpha = opt.predicted_alpha;
  rep.tolerance = opt.tolerance;
  std::vector<double> log_d, log_inc;
  for (int b = 0; b < n_bins; ++b) {
    const double edge_lo = opt.h_min * std::ldexp(1.0, b);
    double best = 0.0, best_d = edge_lo;
    auto probe = [&](double r1, double d) {
      const double inc = std::abs(value(r1 + d) - value(r1));
      if (inc > best) {
        best = inc;
        best_d = d;
      }
    };
    // extreme placements at the top of the bin
    const double top = 2.0 * edge_lo;
    probe(lo, top);
    probe(hi - top, top);
    for (int k = 0; k < per_bin; ++k) {
      const double d = edge_lo * std::exp2(rng.uniform());
      const double span = (hi - lo) - d;
      const double u = rng.uniform();
      const double mode = rng.uniform();
      double r1;
      if (mode < 0.5) r1 = lo + span * u;
      else if (mode < 0.75) r1 = lo + span * std::pow(10.0, -8.0 * u);
      else r1 = lo + span * (1.0 - std::pow(10.0, -8.0 * u));
      probe(r1, d);
    }
    if (best > 0.0) {
      rep.scales.push_back(best_d);
      rep.max_increments.push_back(best);
      log_d.push_back(std::log(best_d));
      log_inc.push_back(std::log(best));
    }
  }
  if (rep.scales.size() < 3)
    throw Error(ErrorCode::InsufficientScales, "fewer than 3 nonempty distance bins");
  const LinearFit fit = least_squares(log_d, log_inc);
  rep.fitted_alpha = fit.slope;
  rep.r_squared = fit.r_squared;
  rep.one_sided = opt.one_sided;
  if (!rep.predicted_alpha) rep.pass = true;
  else if (opt.one_sided) rep.pass = rep.fitted_alpha >= *rep.predicted_alpha - rep.tolerance;
  else rep.pass = std::abs(rep.fitted_alpha - *rep.predicted_alpha) <= rep.tolerance;
  return rep;
}

// int_0^phi sin^m, from cos(phi), sin(phi) and 1 - cos(phi)
double sine_power_integral(int m, double c, double sn, double omc) {
  if (m == 0) return std::atan2(sn, c);
  if (m == 1) return omc;
  return -c * std::pow(sn, m - 1) / m + double(m - 1) / m * sine_power_integral(m - 2, c, sn, omc);
}

// (N-1)-measure of the part of the sphere |x| = rho lying inside B_r(z), |z| = zeta.
double sphere_in_ball(int dim, double rho, double zeta, double r) {
  if (zeta == 0.0 || rho + zeta <= r) return rho <= r ? sphere_weight(dim, rho) : 0.0;
  if (rho >= r + zeta || rho <= zeta - r) return 0.0;
  // 1 - cos(phi) without cancellation
  const double omc = std::clamp((r - rho + zeta) * (r + rho - zeta) / (2.0 * rho * zeta), 0.0, 2.0);
  const double c = 1.0 - omc;
  const double sn = std::sqrt(omc * (2.0 - omc));
  const double small_sphere = (dim - 1.0) * unit_ball_volume(dim - 1);
  return std::pow(rho, dim - 1.0) * small_sphere * sine_power_integral(dim - 2, c, sn, omc);
}

// int_{B_m(0)} g(|x|) dx for g = |f|^s
template <class G>
double centered_mass(const SourceTerm& f, const G& g, int dim, double s, double m) {
  if (f.is_zero() || m <= 0.0) return 0.0;
  if (const auto* rp = std::get_if<RadialPowerSource>(&f.family())) {
    const double e = dim - rp->beta * s;
    return std::pow(std::abs(rp->A), s) * dim * unit_ball_volume(dim) * std::pow(m, e) / e;
  }
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double rho) { return g(rho) * sphere_weight(dim, rho); }, 0.0, m, 15, 1e-12);
}

}  // namespace

double gradient_energy(const RadialProfile& u, double gamma, double t, int dim, double step) {
  require(gamma > 0.0, "gamma must be > 0");
  const auto [lo, hi] = u.domain();
  check_extent(t, lo, hi);
  if (u.is_sampled()) {
    const auto& s = std::get<Sampled>(u.family());
    return nodal_energy(s.grid, sampled_slopes(u), gamma, dim, t);
  }
  return trapezoid_on_lattice(closed_form_energy_density(u, gamma, dim), 0.0, t, step);
}

double gradient_energy(const DiscreteRadialSolution& u, double gamma, double t) {
  require(gamma > 0.0, "gamma must be > 0");
  check_extent(t, u.grid[0], u.grid[u.grid.size() - 1]);
  return nodal_energy(u.grid, nodal_slopes(u.grid, u.values), gamma, u.params.dim, t);
}

double shell_energy(const RadialProfile& u, double gamma, double t1, double t2, int dim,
                    double step) {
  require(t2 >= t1, "shell needs t1 <= t2");
  const auto [lo, hi] = u.domain();
  check_extent(t1, lo, hi);
  check_extent(t2, lo, hi);
  if (u.is_sampled()) return gradient_energy(u, gamma, t2, dim) - gradient_energy(u, gamma, t1, dim);
  return trapezoid_on_lattice(closed_form_energy_density(u, gamma, dim), t1, t2, step);
}

double negative_part_mass(const RadialProfile& u, double t, int dim, double step) {
  const auto [lo, hi] = u.domain();
  check_extent(t, lo, hi);
  if (u.is_sampled()) {
    const auto& s = std::get<Sampled>(u.family());
    return nodal_negative_mass(s.grid, s.values, dim, t);
  }
  return trapezoid_on_lattice(
      [&](double r) { return r <= 0.0 ? 0.0 : std::max(-u.value(r), 0.0) * sphere_weight(dim, r); },
      0.0, t, step);
}

double negative_part_mass(const DiscreteRadialSolution& u, double t) {
  check_extent(t, u.grid[0], u.grid[u.grid.size() - 1]);
  return nodal_negative_mass(u.grid, u.values, u.params.dim, t);
}

CaccioppoliReport caccioppoli_audit(const RadialProfile& u, const ProblemParams& params, double R,
                                    std::span<const double> t_list, bool include_lambda_term) {
  params.validate();
  return caccioppoli_common(
      [&](double t) {
        double e = gradient_energy(u, params.gamma, t, params.dim);
        if (include_lambda_term && params.lambda > 0.0)
          e += params.lambda * negative_part_mass(u, t, params.dim);
        return e;
      },
      params, R, t_list);
}

CaccioppoliReport caccioppoli_audit(const DiscreteRadialSolution& u, const ProblemParams& params,
                                    double R, std::span<const double> t_list,
                                    bool include_lambda_term) {
  params.validate();
  return caccioppoli_common(
      [&](double t) {
        double e = gradient_energy(u, params.gamma, t);
        if (include_lambda_term && params.lambda > 0.0) e += params.lambda * negative_part_mass(u, t);
        return e;
      },
      params, R, t_list);
}

HolderFitReport holder_fit(const RadialProfile& u, std::pair<double, double> domain,
                           const HolderFitOptions& options) {
  const auto [lo, hi] = u.domain();
  require(domain.first >= lo && domain.second <= hi && domain.second > domain.first,
          "Hoelder domain must lie inside the profile's domain");
  return holder_common([&](double r) { return u.value(r); }, domain.first, domain.second, options);
}

HolderFitReport holder_fit(const DiscreteRadialSolution& u, const HolderFitOptions& options) {
  const double lo = u.grid[0], hi = u.grid[u.grid.size() - 1];
  return holder_common([&](double r) { return evaluate(u, std::min(r, hi)); }, lo, hi, options);
}

MorreyNorm morrey_norm(const SourceTerm& f, int dim, double s_index, double theta,
                       double omega_radius, int center_samples, int radius_samples) {
  require(dim >= 1, "dimension must be >= 1");
  require(s_index >= 1.0, "Morrey index s must be >= 1");
  require(theta > 0.0 && theta <= dim, "Morrey index theta must lie in (0, dim]");
  require(omega_radius > 0.0, "domain radius must be > 0");
  require(center_samples >= 0 && radius_samples >= 21, "need >= 21 radius samples");
  if (const auto* rp = std::get_if<RadialPowerSource>(&f.family()))
    require(rp->A == 0.0 || rp->beta * s_index < dim, "|f|^s is not locally integrable",
            ErrorCode::NonIntegrable);

  MorreyNorm out;
  out.s_index = s_index;
  out.theta = theta;
  if (f.is_zero()) {
    out.value = 0.0;
    out.argmax_radius = omega_radius;
    return out;
  }
  const auto g = [&](double rho) { return std::pow(std::abs(f(rho)), s_index); };

  // |z| values: origin plus van der Corput points in [0, omega_radius)
  std::vector<double> centers{0.0};
  for (int k = 1; k <= center_samples; ++k) {
    double x = 0.0, base = 0.5;
    for (int j = k; j > 0; j >>= 1, base *= 0.5)
      if (j & 1) x += base;
    centers.push_back(x * omega_radius);
  }

  // the two finest decades must be resolved: radius grid spans 6 decades below omega_radius
  const double r_min = omega_radius * 1e-6;
  const double diam = 2.0 * omega_radius;
  Eigen::VectorXd radii = log_grid(r_min, diam, radius_samples);
  std::vector<double> rs(radii.data(), radii.data() + radii.size());
  rs.push_back(omega_radius);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());

  auto mass = [&](double zeta, double r) {
    if (zeta == 0.0) return centered_mass(f, g, dim, s_index, std::min(r, omega_radius));
    double acc = 0.0;
    const double inner = std::min(std::max(r - zeta, 0.0), omega_radius);
    acc += centered_mass(f, g, dim, s_index, inner);
    const double a = std::max(std::abs(r - zeta), 0.0);
    const double b = std::min(omega_radius, r + zeta);
    if (b > a)
      acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double rho) { return g(rho) * sphere_in_ball(dim, rho, zeta, r); }, a, b, 8, 1e-10);
    return acc;
  };

  std::vector<double> per_radius(rs.size(), 0.0);
  double best = -1.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    const double scale = std::pow(r, (theta - dim) / s_index);
    for (double zeta : centers) {
      const double v = scale * std::pow(mass(zeta, r), 1.0 / s_index);
      per_radius[i] = std::max(per_radius[i], v);
      if (v > best) {
        best = v;
        out.argmax_radius = r;
        out.argmax_center = zeta;
      }
    }
  }

  // divergence: the value keeps growing as r decreases through [r_min, 100 r_min]
  auto at = [&](double r) {
    const auto it = std::min_element(rs.begin(), rs.end(), [&](double a, double b) {
      return std::abs(std::log(a / r)) < std::abs(std::log(b / r));
    });
    return per_radius[std::size_t(it - rs.begin())];
  };
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < rs.size() && rs[i + 1] <= 100.0 * r_min * (1 + 1e-9); ++i)
    if (!(per_radius[i] > per_radius[i + 1])) monotone = false;
  const double v0 = at(r_min), v1 = at(10.0 * r_min), v2 = at(100.0 * r_min);
  const bool growing = v0 > 1.01 * v1 && v1 > 1.01 * v2;
  if (monotone && growing) {
    out.value.reset();
    out.argmax_radius = r_min;
    out.argmax_center = 0.0;
  } else {
    out.value = best;
  }
  return out;
}

}  // namespace pdilab
