#include "pdilab/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdilab/error.hpp"

namespace pdilab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PreconditionViolation: return "PRECONDITION_VIOLATION";
    case ErrorCode::DegeneratePoint: return "DEGENERATE_POINT";
    case ErrorCode::NoAdmissibleScale: return "NO_ADMISSIBLE_SCALE";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::IllPosedBoundary: return "ILL_POSED_BC";
    case ErrorCode::DomainExceeded: return "DOMAIN_EXCEEDED";
    case ErrorCode::InsufficientScales: return "INSUFFICIENT_SCALES";
    case ErrorCode::NonIntegrable: return "NON_INTEGRABLE";
  }
  return "UNKNOWN";
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Integrability: return "INTEGRABILITY";
    case Branch::Gradient: return "GRADIENT";
    case Branch::Both: return "BOTH";
  }
  return "UNKNOWN";
}

std::string_view to_string(GrowthRegime g) {
  return g == GrowthRegime::Subnatural ? "SUBNATURAL" : "SUPERNATURAL";
}

std::string_view to_string(LiouvilleRegime l) {
  switch (l) {
    case LiouvilleRegime::Subcritical: return "LIOUVILLE_SUBCRITICAL";
    case LiouvilleRegime::Critical: return "LIOUVILLE_CRITICAL";
    case LiouvilleRegime::Supercritical: return "LIOUVILLE_SUPERCRITICAL";
  }
  return "UNKNOWN";
}

Integrability Integrability::finite(double q) {
  require(std::isfinite(q) && q >= 1.0, "q must be >= 1 (got " + std::to_string(q) + ")");
  Integrability out;
  out.infinite_ = false;
  out.value_ = q;
  return out;
}

void ProblemParams::validate() const {
  require(dim >= 2, "dim must be >= 2");
  require(std::isfinite(p) && p > 1.0, "p must be > 1");
  require(std::isfinite(gamma) && gamma > p - 1.0, "gamma must be > p - 1");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be >= 0");
  require(std::isfinite(c_H) && c_H > 0.0, "c_H must be > 0");
  require(std::isfinite(nu) && nu > 0.0, "nu must be > 0");
  require(q.is_infinite() || q.value() >= 1.0, "q must be >= 1");
}

int compare_exponents(double a, double b) noexcept {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a - b) <= 1e-12 * scale) return 0;
  return a < b ? -1 : 1;
}

namespace {

Branch pick(double integrability_arm, double gradient_arm) {
  const int c = compare_exponents(integrability_arm, gradient_arm);
  if (c == 0) return Branch::Both;
  return c < 0 ? Branch::Integrability : Branch::Gradient;
}

}  // namespace

double holder_exponent(const ProblemParams& params) {
  params.validate();
  const double p = params.p, g = params.gamma, dim = params.dim;
  require(g > p, "Hoelder exponent requires gamma > p");
  require(params.q.is_infinite() || params.q.value() > dim / g,
          "Hoelder exponent requires q > dim/gamma");
  const double integrability_arm = 1.0 - params.q.divide(dim) / g;
  const double gradient_arm = (g - p) / (g - (p - 1.0));
  return std::min(integrability_arm, gradient_arm);
}

double caccioppoli_exponent(const ProblemParams& params) {
  params.validate();
  const double p = params.p, g = params.gamma;
  return std::max(params.q.divide(params.dim), g / (g - (p - 1.0)));
}

double liouville_threshold(int dim, double p) {
  require(dim >= 2, "dim must be >= 2");
  require(p > 1.0 && p < dim, "Liouville threshold requires 1 < p < dim");
  return dim * (p - 1.0) / (dim - 1.0);
}

Regime classify_regime(const ProblemParams& params) {
  params.validate();
  const double star = liouville_threshold(params.dim, params.p);
  Regime out{};
  out.growth = compare_exponents(params.gamma, params.p) > 0 ? GrowthRegime::Supernatural
                                                             : GrowthRegime::Subnatural;
  switch (compare_exponents(params.gamma, star)) {
    case -1: out.liouville = LiouvilleRegime::Subcritical; break;
    case 0: out.liouville = LiouvilleRegime::Critical; break;
    default: out.liouville = LiouvilleRegime::Supercritical; break;
  }
  return out;
}

ExponentReport exponents(const ProblemParams& params) {
  params.validate();
  const double p = params.p, g = params.gamma, dim = params.dim;
  ExponentReport rep;
  const double dq = params.q.divide(dim);
  const double grad_s = g / (g - (p - 1.0));
  rep.s = std::max(dq, grad_s);
  // the larger arm of s is the one that becomes active in alpha = 1 - s/gamma
  switch (compare_exponents(dq, grad_s)) {
    case 0: rep.s_branch = Branch::Both; break;
    case 1: rep.s_branch = Branch::Integrability; break;
    default: rep.s_branch = Branch::Gradient; break;
  }
  if (g > p && (params.q.is_infinite() || params.q.value() > dim / g)) {
    const double integrability_arm = 1.0 - dq / g;
    const double gradient_arm = (g - p) / (g - (p - 1.0));
    rep.alpha = std::min(integrability_arm, gradient_arm);
    rep.alpha_branch = pick(integrability_arm, gradient_arm);
  }
  if (p < dim) rep.gamma_star = liouville_threshold(params.dim, p);
  return rep;
}

}  // namespace pdilab
