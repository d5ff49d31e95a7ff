#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdilab/params.hpp"
#include "pdilab/radial.hpp"
#include "pdilab/solver.hpp"
#include "pdilab/source.hpp"

namespace pdilab {

/// Volume of the unit ball in R^dim.
double unit_ball_volume(int dim);

/// Quadrature lattice spacing used for closed-form profiles.
inline constexpr double kDefaultEnergyStep = 1e-5;

/// int_{B_t} |grad u|^gamma, composite trapezoid in r against dim w_dim r^{dim-1}.
/// Closed-form profiles use the lattice {k * step}; sampled profiles and
/// discrete solutions use their own nodes.
double gradient_energy(const RadialProfile& u, double gamma, double t, int dim,
                       double step = kDefaultEnergyStep);
double gradient_energy(const DiscreteRadialSolution& u, double gamma, double t);

/// Same quadrature restricted to the shell t1 <= |x| <= t2.
double shell_energy(const RadialProfile& u, double gamma, double t1, double t2, int dim,
                    double step = kDefaultEnergyStep);

/// int_{B_t} u^-.
double negative_part_mass(const RadialProfile& u, double t, int dim,
                          double step = kDefaultEnergyStep);
double negative_part_mass(const DiscreteRadialSolution& u, double t);

struct CaccioppoliReport {
  double R = 0.0;
  std::vector<double> radii_t;
  std::vector<double> energies;
  double predicted_s = 0.0;
  /// dim - s: small-t growth exponent implied by the estimate with R = 2t.
  double predicted_growth = 0.0;
  /// Least-squares slope of log energy against log t over t <= R/2.
  double fitted_growth = 0.0;
  double fitted_K = 0.0;
  /// energy / t^{dim-s} over the inner half of the radii stays within 2x of its
  /// maximum over the outer half; slower small-t growth than predicted breaks this.
  bool stable = false;
  bool pass = false;
};

CaccioppoliReport caccioppoli_audit(const RadialProfile& u, const ProblemParams& params, double R,
                                    std::span<const double> t_list, bool include_lambda_term = true);
CaccioppoliReport caccioppoli_audit(const DiscreteRadialSolution& u, const ProblemParams& params,
                                    double R, std::span<const double> t_list,
                                    bool include_lambda_term = true);

struct HolderFitOptions {
  int pair_budget = 20000;
  double h_min = 1e-4;
  double h_max = 1e-1;
  std::uint64_t seed = 1;
  std::optional<double> predicted_alpha;
  double tolerance = 0.05;
  /// Pass when fitted >= predicted - tolerance (a lower bound on regularity).
  bool one_sided = false;
};

struct HolderFitReport {
  std::vector<double> scales;
  std::vector<double> max_increments;
  double fitted_alpha = 0.0;
  double r_squared = 0.0;
  std::optional<double> predicted_alpha;
  double tolerance = 0.0;
  bool one_sided = false;
  bool pass = false;
};

/// Log-log regression of the per-bin sup of |u(r1) - u(r2)| against |r1 - r2|
/// over dyadic distance bins. Pairs are collinear radius pairs in [lo, hi].
HolderFitReport holder_fit(const RadialProfile& u, std::pair<double, double> domain,
                           const HolderFitOptions& options = {});
HolderFitReport holder_fit(const DiscreteRadialSolution& u, const HolderFitOptions& options = {});

struct MorreyNorm {
  double s_index = 1.0;
  double theta = 0.0;
  std::optional<double> value;  // empty when DIVERGENT
  double argmax_radius = 0.0;
  double argmax_center = 0.0;  // |z| of the maximizing center
};

/// sup over sampled (z, r) of r^{(theta-dim)/s} ||f||_{L^s(B_r(z) cap B_omega)}, with
/// 0 < r <= diam. Centers: the origin plus a van der Corput sequence of |z|.
MorreyNorm morrey_norm(const SourceTerm& f, int dim, double s_index, double theta,
                       double omega_radius, int center_samples, int radius_samples = 241);

}  // namespace pdilab
