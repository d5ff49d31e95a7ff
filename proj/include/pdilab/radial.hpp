#pragma once

#include <utility>
#include <variant>

#include <Eigen/Core>

#include "pdilab/params.hpp"
#include "pdilab/source.hpp"

namespace pdilab {

/// V(r) = c (r^a - 1)
struct PowerShifted {
  double c = 0.0;
  double a = 1.0;
};

/// V(r) = c r^a
struct Power {
  double c = 0.0;
  double a = 1.0;
};

/// V(r) = c (1 + r^2)^{-delta/2}
struct Bump {
  double c = 0.0;
  double delta = 0.0;
};

/// Nodal samples on a strictly increasing positive grid.
struct Sampled {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
};

/// Value and first two radial derivatives at one point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// A radial function u(x) = V(|x|).
class RadialProfile {
 public:
  using Family = std::variant<PowerShifted, Power, Bump, Sampled>;

  static RadialProfile power_shifted(double c, double a);
  static RadialProfile power(double c, double a);
  static RadialProfile bump(double c, double delta);
  static RadialProfile sampled(Eigen::VectorXd grid, Eigen::VectorXd values);
  /// Bump family with delta = 0.
  static RadialProfile constant(double value);

  const Family& family() const noexcept { return family_; }
  bool is_sampled() const noexcept { return std::holds_alternative<Sampled>(family_); }

  /// [lo, hi] on which value() is defined. Closed forms: [0, +inf).
  std::pair<double, double> domain() const;

  double value(double r) const;

  /// Closed forms: exact. Sampled: three-point differences at interior nodes,
  /// linearly interpolated between them; r must lie within the interior nodes.
  Jet jet(double r) const;

  /// First derivative at the i-th sample node (one-sided second order at the
  /// ends). Sampled profiles only.
  double nodal_slope(Eigen::Index i) const;

  RadialProfile negated() const;

 private:
  explicit RadialProfile(Family f) : family_(std::move(f)) {}
  Family family_;
};

struct PLaplacian {
  double p = 2.0;
};
/// Flux s / sqrt(1 + s^2), growth order p = 2.
struct MeanCurvature {};
/// Flux s |s|^{k-2} / sqrt(1 + |s|^k), growth order p = k/2.
struct GeneralizedMeanCurvature {
  double k = 2.0;
};

class OperatorKind {
 public:
  using Family = std::variant<PLaplacian, MeanCurvature, GeneralizedMeanCurvature>;

  static OperatorKind p_laplacian(double p);
  static OperatorKind mean_curvature() { return OperatorKind(MeanCurvature{}); }
  static OperatorKind generalized_mean_curvature(double k);

  const Family& family() const noexcept { return family_; }

  /// Growth order p declared by the kind.
  double growth_order() const;

  /// Scalar flux a(s). eps > 0 regularizes |s|^{m-2} as (s^2 + eps^2)^{(m-2)/2}.
  double flux(double s, double eps = 0.0) const;
  double flux_derivative(double s, double eps = 0.0) const;

  /// True when the unregularized flux derivative degenerates or blows up at 0.
  bool needs_regularization() const;

 private:
  explicit OperatorKind(Family f) : family_(f) {}
  Family family_;
};

struct ResidualReport {
  Eigen::VectorXd grid;
  Eigen::VectorXd residuals;
  double min_residual = 0.0;
  double max_abs_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// -div A(grad u) for u = V(|x|) at radius r.
double radial_operator(const OperatorKind& kind, const RadialProfile& profile, double r, int dim);

/// Explicit solution of -Delta_p u = |grad u|^gamma on B_1 vanishing on the boundary
/// (gamma > p, dim (p-1)/(dim-1) < gamma).
RadialProfile sharpness_profile(int dim, double p, double gamma);

/// Power profile C r^e, e = (gamma-p)/(gamma-(p-1)), solving -Delta_p u = c_H |grad u|^gamma
/// in R^dim \ {0}. Its negation solves -Delta_p u + c_H |grad u|^gamma = 0.
RadialProfile nonconstant_entire_profile(int dim, double p, double gamma, double c_H = 1.0);

struct BumpScale {
  double c = 0.0;
  ResidualReport report;
};

/// Small c > 0 making c(1+r^2)^{-delta/2} a supersolution of
/// -Delta_p u >= c_H |grad u|^gamma on `grid` and in the far field r -> inf.
BumpScale bump_profile_scale(int dim, double p, double gamma, double c_H,
                             const Eigen::VectorXd& grid);

/// residual = -div A(grad u) - c_H |grad u|^gamma + lambda u + f; pass iff min >= -tol.
ResidualReport residual_scan(const OperatorKind& kind, const RadialProfile& profile,
                             const ProblemParams& params, const SourceTerm& f,
                             const Eigen::VectorXd& grid, double tol);

/// n points, geometrically spaced on [lo, hi].
Eigen::VectorXd log_grid(double lo, double hi, Eigen::Index n);

}  // namespace pdilab
