#pragma once

#include <optional>
#include <string_view>

namespace pdilab {

/// Integrability index q of the source term: a finite value >= 1 or infinity.
class Integrability {
 public:
  static Integrability infinite() { return Integrability(); }
  static Integrability finite(double q);

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; only meaningful when !is_infinite().
  double value() const noexcept { return value_; }
  /// dim / q, exactly 0 for q = infinity.
  double divide(double dim) const noexcept { return infinite_ ? 0.0 : dim / value_; }

  friend bool operator==(const Integrability&, const Integrability&) = default;

 private:
  Integrability() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

/// Exponent/coefficient tuple shared by every formula. `dim` is the spatial
/// dimension N, or the homogeneous dimension Q in the subelliptic reading.
struct ProblemParams {
  int dim = 3;
  double p = 2.0;
  double gamma = 2.0;
  double lambda = 0.0;
  double c_H = 1.0;
  double nu = 1.0;
  Integrability q = Integrability::infinite();

  /// Throws PreconditionViolation when an invariant fails.
  void validate() const;
};

/// Which arm of a min/max is active.
enum class Branch { Integrability, Gradient, Both };

struct ExponentReport {
  std::optional<double> alpha;  // only when gamma > p and q > dim/gamma
  Branch alpha_branch = Branch::Gradient;
  double s = 0.0;
  Branch s_branch = Branch::Gradient;
  std::optional<double> gamma_star;  // only when p < dim
};

enum class GrowthRegime { Subnatural, Supernatural };
enum class LiouvilleRegime { Subcritical, Critical, Supercritical };

struct Regime {
  GrowthRegime growth;
  LiouvilleRegime liouville;
  friend bool operator==(const Regime&, const Regime&) = default;
};

std::string_view to_string(Branch b);
std::string_view to_string(GrowthRegime g);
std::string_view to_string(LiouvilleRegime l);

/// Three-way comparison with a relative tolerance of 1e-12, used wherever a
/// parameter is tested against a threshold (gamma vs p, gamma vs gamma*).
int compare_exponents(double a, double b) noexcept;

double holder_exponent(const ProblemParams& params);
double caccioppoli_exponent(const ProblemParams& params);
double liouville_threshold(int dim, double p);
Regime classify_regime(const ProblemParams& params);

/// All exponents that are defined for `params`, with the active branches.
ExponentReport exponents(const ProblemParams& params);

}  // namespace pdilab
