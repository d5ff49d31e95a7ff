#pragma once

#include <variant>

#include <Eigen/Core>

namespace pdilab {

/// f(x) = A |x|^{-beta}
struct RadialPowerSource {
  double A = 1.0;
  double beta = 0.0;
};

/// Radial samples of f, linearly interpolated between nodes.
struct SampledSource {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
};

struct ZeroSource {};

class SourceTerm {
 public:
  using Family = std::variant<ZeroSource, RadialPowerSource, SampledSource>;

  SourceTerm() = default;
  static SourceTerm zero() { return SourceTerm(ZeroSource{}); }
  static SourceTerm radial_power(double A, double beta);
  static SourceTerm sampled(Eigen::VectorXd grid, Eigen::VectorXd values);

  const Family& family() const noexcept { return family_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroSource>(family_); }

  /// Pointwise value at radius r >= 0 (may be +inf at r = 0).
  double operator()(double r) const;

  /// Mean of f over the shell lo <= |x| <= hi in dimension dim. Exact for the
  /// closed-form families; trapezoid in r^{dim-1} dr for sampled data.
  double shell_average(double lo, double hi, int dim) const;

 private:
  explicit SourceTerm(Family f) : family_(std::move(f)) {}
  Family family_ = ZeroSource{};
};

}  // namespace pdilab
