#include <gtest/gtest.h>

#include <cmath>

#include "pdilab/error.hpp"
#include "pdilab/radial.hpp"

using namespace pdilab;

namespace {

ProblemParams eq_params(int dim, double p, double gamma) {
  ProblemParams prm;
  prm.dim = dim;
  prm.p = p;
  prm.gamma = gamma;
  return prm;
}

// independent finite-difference evaluation of -r^{1-N} (r^{N-1} a(V'))'
double operator_by_differences(const OperatorKind& kind, const RadialProfile& u, double r, int dim) {
  const double h = 1e-3 * r;
  auto slope = [&](double x) { return (u.value(x + 1e-2 * h) - u.value(x - 1e-2 * h)) / (2e-2 * h); };
  auto flux = [&](double x) { return std::pow(x, dim - 1.0) * kind.flux(slope(x)); };
  return -(flux(r + h) - flux(r - h)) / (2 * h) / std::pow(r, dim - 1.0);
}

}  // namespace

TEST(Radial, ConstantProfileHasZeroOperator) {
  const RadialProfile u = RadialProfile::constant(3.5);
  for (const OperatorKind& k : {OperatorKind::p_laplacian(1.5), OperatorKind::p_laplacian(2.0),
                                OperatorKind::p_laplacian(3.0), OperatorKind::mean_curvature(),
                                OperatorKind::generalized_mean_curvature(3.0)})
    for (double r : {0.1, 1.0, 7.0}) EXPECT_EQ(radial_operator(k, u, r, 3), 0.0);
}

TEST(Radial, LaplacianOfSquare) {
  EXPECT_NEAR(radial_operator(OperatorKind::p_laplacian(2.0), RadialProfile::power(1.0, 2.0), 1.0, 3), -6.0,
              1e-14);
}

TEST(Radial, ShiftedPowerClosedForm) {
  const double c = -1.77844, a = 2.0 / 3.0;
  const double expected = -(10.0 / 9.0) * c * std::pow(0.5, -4.0 / 3.0);
  const double got =
      radial_operator(OperatorKind::p_laplacian(2.0), RadialProfile::power_shifted(c, a), 0.5, 3);
  EXPECT_NEAR(got, expected, 1e-12);
  EXPECT_NEAR(got, 4.979, 1e-3);
}

TEST(Radial, DegeneratePointForSingularP) {
  // sampled (r-1)^2 on a dyadic grid: V'(1) = 0 exactly, V''(1) = 2
  Eigen::VectorXd g(5), v(5);
  g << 0.5, 0.75, 1.0, 1.25, 1.5;
  v << 0.25, 0.0625, 0.0, 0.0625, 0.25;
  const RadialProfile u = RadialProfile::sampled(g, v);
  ASSERT_EQ(u.jet(1.0).d1, 0.0);
  try {
    radial_operator(OperatorKind::p_laplacian(1.5), u, 1.0, 3);
    ADD_FAILURE() << "expected DEGENERATE_POINT";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePoint);
  }
  EXPECT_EQ(radial_operator(OperatorKind::p_laplacian(3.0), u, 1.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(radial_operator(OperatorKind::p_laplacian(2.0), u, 1.0, 3), -u.jet(1.0).d2);
}

TEST(Radial, PLaplacianMatchesIndependentDifferences) {
  const RadialProfile u = RadialProfile::power_shifted(-0.7, 0.4);
  for (double p : {1.5, 2.0, 3.5})
    for (double r : {0.3, 0.8, 2.0}) {
      const OperatorKind k = OperatorKind::p_laplacian(p);
      const double exact = radial_operator(k, u, r, 4);
      EXPECT_NEAR(exact, operator_by_differences(k, u, r, 4), 1e-5 * std::max(1.0, std::abs(exact)));
    }
}

TEST(Radial, CurvatureKindsMatchIndependentDifferences) {
  const RadialProfile u = RadialProfile::bump(2.0, 1.5);
  for (const OperatorKind& k : {OperatorKind::mean_curvature(), OperatorKind::generalized_mean_curvature(2.0),
                                OperatorKind::generalized_mean_curvature(5.0)})
    for (double r : {0.2, 1.0, 3.0}) {
      const double exact = radial_operator(k, u, r, 3);
      EXPECT_NEAR(exact, operator_by_differences(k, u, r, 3), 1e-5 * std::max(1.0, std::abs(exact)));
    }
}

TEST(Radial, PEqualsTwoIsTheLaplacian) {
  const RadialProfile u = RadialProfile::bump(1.3, 0.7);
  for (int dim : {2, 3, 5})
    for (double r : {0.05, 0.5, 4.0}) {
      const Jet j = u.jet(r);
      EXPECT_DOUBLE_EQ(radial_operator(OperatorKind::p_laplacian(2.0), u, r, dim),
                       -(j.d2 + (dim - 1.0) * j.d1 / r));
    }
}

TEST(Radial, FluxBoundHoldsWithNuOne) {
  const Eigen::VectorXd s = log_grid(1e-6, 1e6, 241);
  const std::vector<OperatorKind> kinds{OperatorKind::p_laplacian(1.5), OperatorKind::p_laplacian(4.0),
                                        OperatorKind::mean_curvature(),
                                        OperatorKind::generalized_mean_curvature(2.0),
                                        OperatorKind::generalized_mean_curvature(6.0)};
  for (const auto& k : kinds)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      for (double sign : {1.0, -1.0}) {
        const double x = sign * s[i];
        EXPECT_LE(std::abs(k.flux(x)), std::pow(std::abs(x), k.growth_order() - 1.0) * (1 + 1e-14));
      }
}

TEST(Radial, FluxDerivativeMatchesDifferences) {
  for (const OperatorKind& k : {OperatorKind::p_laplacian(3.0), OperatorKind::mean_curvature(),
                                OperatorKind::generalized_mean_curvature(4.0)})
    for (double s : {-2.0, -0.3, 0.4, 1.7}) {
      const double h = 1e-6;
      EXPECT_NEAR(k.flux_derivative(s), (k.flux(s + h) - k.flux(s - h)) / (2 * h), 1e-6);
    }
  // regularized p-Laplacian flux
  const OperatorKind pl = OperatorKind::p_laplacian(1.5);
  EXPECT_NEAR(pl.flux(0.3, 1e-2), 0.3 * std::pow(0.09 + 1e-4, -0.25), 1e-14);
}

TEST(Radial, SharpnessProfileConstants) {
  const RadialProfile u = sharpness_profile(3, 2.0, 4.0);
  const auto& f = std::get<PowerShifted>(u.family());
  EXPECT_NEAR(f.a, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(std::pow(std::abs(f.c), 3.0), 45.0 / 8.0, 1e-12);
  EXPECT_NEAR(f.c, -1.77844, 1e-5);
  const auto& g = std::get<PowerShifted>(sharpness_profile(3, 2.0, 3.0).family());
  EXPECT_NEAR(g.a, 0.5, 1e-15);
  EXPECT_NEAR(g.c, -2.0 * std::sqrt(1.5), 1e-12);
  EXPECT_THROW(sharpness_profile(3, 2.0, 2.0), Error);
  EXPECT_EQ(u.value(1.0), 0.0);
}

TEST(Radial, SharpnessProfileSolvesTheEquation) {
  for (auto [dim, p, gamma] : {std::tuple{3, 2.0, 4.0}, std::tuple{4, 3.0, 5.0}, std::tuple{5, 1.5, 2.5}}) {
    const RadialProfile u = sharpness_profile(dim, p, gamma);
    const ResidualReport rep = residual_scan(OperatorKind::p_laplacian(p), u, eq_params(dim, p, gamma),
                                             SourceTerm::zero(), Eigen::VectorXd::LinSpaced(9, 0.1, 0.9), 1e-8);
    EXPECT_TRUE(rep.pass);
    EXPECT_LT(rep.max_abs_residual, 1e-8) << dim << " " << p << " " << gamma;
  }
}

TEST(Radial, EntireProfileSupernatural) {
  const RadialProfile u = nonconstant_entire_profile(3, 2.0, 4.0);
  const auto& f = std::get<Power>(u.family());
  EXPECT_NEAR(f.a, 2.0 / 3.0, 1e-15);
  // same scalar balance as the sharpness constant
  EXPECT_NEAR(std::abs(f.c), std::abs(std::get<PowerShifted>(sharpness_profile(3, 2, 4).family()).c), 1e-12);
  const ResidualReport rep = residual_scan(OperatorKind::p_laplacian(2.0), u, eq_params(3, 2, 4),
                                           SourceTerm::zero(), log_grid(1e-2, 1e2, 50), 1e-8);
  EXPECT_LT(rep.max_abs_residual, 1e-8);
}

TEST(Radial, EntireProfileSubnaturalExponent) {
  // the exponent that balances is (gamma-p)/(gamma-(p-1)) = -0.25
  const RadialProfile u = nonconstant_entire_profile(3, 2.0, 1.8);
  const auto& f = std::get<Power>(u.family());
  EXPECT_NEAR(f.a, -0.25, 1e-15);
  EXPECT_GT(f.c, 0.0);
  const ResidualReport rep = residual_scan(OperatorKind::p_laplacian(2.0), u, eq_params(3, 2, 1.8),
                                           SourceTerm::zero(), log_grid(0.1, 10.0, 50), 1e-8);
  EXPECT_LT(rep.max_abs_residual, 1e-8);
  // the negation solves -Delta u + |grad u|^gamma = 0
  const RadialProfile w = u.negated();
  for (double r : {0.2, 1.0, 5.0}) {
    const double lhs = radial_operator(OperatorKind::p_laplacian(2.0), w, r, 3) +
                       std::pow(std::abs(w.jet(r).d1), 1.8);
    EXPECT_NEAR(lhs, 0.0, 1e-10);
  }
  EXPECT_THROW(nonconstant_entire_profile(3, 2.0, 1.4), Error);
  EXPECT_THROW(nonconstant_entire_profile(3, 2.0, 2.0), Error);
}

TEST(Radial, BumpScaleExamples) {
  const Eigen::VectorXd grid = log_grid(1e-2, 1e2, 200);
  const BumpScale b = bump_profile_scale(3, 2.0, 1.8, 1.0, grid);
  EXPECT_GT(b.c, 0.0);
  EXPECT_TRUE(b.report.pass);
  EXPECT_GE(b.report.min_residual, 0.0);
  try {
    bump_profile_scale(3, 2.0, 1.4, 1.0, grid);
    ADD_FAILURE() << "expected NO_ADMISSIBLE_SCALE";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoAdmissibleScale);
  }
  try {
    bump_profile_scale(3, 2.0, 2.0, 1.0, grid);
    ADD_FAILURE() << "expected PRECONDITION_VIOLATION";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolation);
  }
}

TEST(Radial, BumpAdmissibilityTracksTheThreshold) {
  const Eigen::VectorXd grid = log_grid(1e-2, 1e2, 100);
  for (int dim : {3, 4, 5}) {
    const double p = 2.0, star = dim * (p - 1.0) / (dim - 1.0);
    for (int k = 1; k < 20; ++k) {
      const double gamma = 1.0 + k * 0.05;
      if (std::abs(gamma - star) < 1e-9) continue;
      if (gamma < star) EXPECT_THROW(bump_profile_scale(dim, p, gamma, 1.0, grid), Error);
      else EXPECT_TRUE(bump_profile_scale(dim, p, gamma, 1.0, grid).report.pass);
    }
  }
}

TEST(Radial, ResidualScanOfConstant) {
  const ResidualReport rep = residual_scan(OperatorKind::p_laplacian(2.0), RadialProfile::constant(2.0),
                                           eq_params(3, 2, 2), SourceTerm::zero(),
                                           Eigen::VectorXd::LinSpaced(5, 0.1, 1.0), 0.0);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.max_abs_residual, 0.0);
}

TEST(Radial, SampledOperatorConvergesAtSecondOrder) {
  const RadialProfile exact = sharpness_profile(3, 2.0, 4.0);
  const OperatorKind k = OperatorKind::p_laplacian(2.0);
  const double r = 0.6;
  std::vector<double> err, h;
  for (int n : {41, 81, 161, 321}) {
    const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(n, 0.2, 1.0);
    const Eigen::VectorXd v = g.unaryExpr([&](double x) { return exact.value(x); });
    const RadialProfile s = RadialProfile::sampled(g, v);
    err.push_back(std::abs(radial_operator(k, s, r, 3) - radial_operator(k, exact, r, 3)));
    h.push_back(0.8 / (n - 1));
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i)
    EXPECT_GE(std::log(err[i] / err[i + 1]) / std::log(h[i] / h[i + 1]), 1.9);
}

TEST(Radial, SampledValidation) {
  EXPECT_THROW(RadialProfile::sampled(Eigen::VectorXd::LinSpaced(3, 0.1, 1.0), Eigen::VectorXd::Zero(3)), Error);
  Eigen::VectorXd g(4);
  g << 0.1, 0.3, 0.2, 0.4;
  EXPECT_THROW(RadialProfile::sampled(g, Eigen::VectorXd::Zero(4)), Error);
}

TEST(Radial, LogGridEndpoints) {
  const Eigen::VectorXd g = log_grid(1e-2, 1e2, 5);
  EXPECT_DOUBLE_EQ(g[0], 1e-2);
  EXPECT_DOUBLE_EQ(g[4], 1e2);
  EXPECT_NEAR(g[2], 1.0, 1e-14);
}
