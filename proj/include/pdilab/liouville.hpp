#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include <Eigen/Core>

#include "pdilab/params.hpp"
#include "pdilab/radial.hpp"

namespace pdilab {

/// area(dB_t) = dim w_dim t^{dim-1}
struct EuclideanArea {
  int dim = 3;
};
/// area(dB_t) = A t^beta
struct PowerArea {
  double A = 1.0;
  double beta = 0.0;
};
/// area(dB_t) = A e^{kappa t}
struct ExponentialArea {
  double A = 1.0;
  double kappa = 0.0;
};
/// Tabulated areas, interpolated linearly in (log t, log area); undefined outside the grid.
struct SampledArea {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
};

class AreaProfile {
 public:
  using Family = std::variant<EuclideanArea, PowerArea, ExponentialArea, SampledArea>;

  static AreaProfile euclidean(int dim);
  static AreaProfile power(double A, double beta);
  static AreaProfile exponential(double A, double kappa);
  static AreaProfile sampled(Eigen::VectorXd grid, Eigen::VectorXd values);

  const Family& family() const noexcept { return family_; }

  double area(double t) const;
  double log_area(double t) const;

  /// Split area = normalization * shape(t); the normalization is the constant prefactor
  /// (dim w_dim or A) of the closed forms and 1 for tabulated areas.
  double normalization() const;
  double log_shape(double t) const;

  /// Largest t at which area() is defined.
  double extent() const;

 private:
  explicit AreaProfile(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// (gamma - (p-1)) / (p-1): the power of 1/area in the comparison integral.
double area_exponent(double p, double gamma);

enum class AreaTestMode { Analytic, Numeric };
enum class AreaTestResult { Divergent, Convergent, Inconclusive };

std::string_view to_string(AreaTestMode m);
std::string_view to_string(AreaTestResult r);

/// Decides whether int^inf area(dB_t)^{-rho} dt diverges.
/// Numeric mode sums dyadic pieces [T, 2T] from t_start on: three consecutive pieces
/// below 1e-12 of the running total mean CONVERGENT; three consecutive piece ratios
/// at or above 1 - 1e-9 mean DIVERGENT.
AreaTestResult area_condition_test(const AreaProfile& profile, double p, double gamma,
                                   double t_start, AreaTestMode mode);

enum class EnergyWeight { None, Exponential };
std::string_view to_string(EnergyWeight w);

struct SigmaBoundReport {
  double R = 0.0;
  double r = 0.0;
  double sigma_R = 0.0;
  EnergyWeight weight = EnergyWeight::None;
  double rho = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant_C = 0.0;
  /// int_R^r area^{-rho}
  double comparison_integral = 0.0;
  double area_normalization = 1.0;
  /// int_R^r shape^{-rho}; comparison_integral = normalization^{-rho} * this.
  double reduced_integral = 0.0;
  bool contradiction = false;
};

/// Lower bound for the growth of sigma(r) = int_{B_r} |grad u|^gamma from
/// sigma' >= (c_H/nu)^{gamma/(p-1)} sigma^{gamma/(p-1)} area^{-rho}, integrated over [R, r].
/// With the exponential weight sigma is replaced by int_{B_r} e^{-u} |grad u|^gamma
/// (u >= 0 assumed by the caller); the comparison side is unchanged.
SigmaBoundReport sigma_lower_bound(double sigma_R, const ProblemParams& params,
                                   const AreaProfile& profile, double R, double r,
                                   EnergyWeight weight = EnergyWeight::None);

/// First r = R 2^k (k = 1..max_doublings) at which the bound is contradicted.
std::optional<double> contradiction_radius(double sigma_R, const ProblemParams& params,
                                           const AreaProfile& profile, double R,
                                           int max_doublings = 1000);

enum class Verdict { Liouville, NoLiouville, Inconclusive };
enum class Mechanism {
  ClosedFormThreshold,
  AreaIntegralDiverges,
  CounterexampleWitness,
  AreaIntegralConverges
};
enum class WitnessKind { None, Bump, EntirePower, Unavailable };

std::string_view to_string(Verdict v);
std::string_view to_string(Mechanism m);
std::string_view to_string(WitnessKind w);

struct LiouvilleVerdict {
  Verdict verdict = Verdict::Inconclusive;
  /// Empty when the numeric area test could not decide.
  std::optional<Mechanism> mechanism;
  WitnessKind witness = WitnessKind::None;
  std::optional<RadialProfile> witness_profile;
  std::optional<ResidualReport> witness_check;
  double gamma_star = 0.0;
};

/// Closed-form Euclidean classification with a residual-checked counterexample on
/// the non-Liouville side.
LiouvilleVerdict liouville_classify_euclidean(int dim, double p, double gamma);

/// Verdict from the area-growth criterion alone.
LiouvilleVerdict liouville_classify_area(const AreaProfile& profile, double p, double gamma,
                                         double t_start, AreaTestMode mode);

}  // namespace pdilab
