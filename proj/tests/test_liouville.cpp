#include <gtest/gtest.h>

#include <cmath>

#include "pdilab/audit.hpp"
#include "pdilab/error.hpp"
#include "pdilab/liouville.hpp"

using namespace pdilab;

namespace {

ProblemParams params(int dim, double p, double gamma) {
  ProblemParams prm;
  prm.dim = dim;
  prm.p = p;
  prm.gamma = gamma;
  return prm;
}

}  // namespace

TEST(Area, ProfilesAndSplit) {
  const AreaProfile e = AreaProfile::euclidean(3);
  EXPECT_NEAR(e.area(2.0), 4.0 * M_PI * 4.0, 1e-12);
  EXPECT_NEAR(std::log(e.normalization()) + e.log_shape(2.0), e.log_area(2.0), 1e-14);
  const AreaProfile x = AreaProfile::exponential(2.0, 1.5);
  EXPECT_NEAR(x.area(3.0), 2.0 * std::exp(4.5), 1e-10);
  EXPECT_EQ(x.normalization(), 2.0);
  EXPECT_NEAR(x.log_shape(2.0), 3.0, 1e-15);
  EXPECT_NEAR(AreaProfile::power(3.0, 2.5).area(4.0), 3.0 * 32.0, 1e-12);
  EXPECT_TRUE(std::isinf(e.extent()));
}

TEST(Area, SampledProfileIsLogLogLinearAndBounded) {
  Eigen::VectorXd g(3), v(3);
  g << 1, 2, 4;
  v << 1, 4, 16;
  const AreaProfile s = AreaProfile::sampled(g, v);
  EXPECT_NEAR(s.area(2.0), 4.0, 1e-14);
  // t^2 tabulated is reproduced between nodes
  EXPECT_NEAR(s.area(3.0), 9.0, 1e-12);
  EXPECT_EQ(s.extent(), 4.0);
  try {
    s.area(8.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainExceeded);
  }
}

TEST(Area, ConditionExamples) {
  const AreaProfile e3 = AreaProfile::euclidean(3);
  for (AreaTestMode m : {AreaTestMode::Analytic, AreaTestMode::Numeric}) {
    EXPECT_EQ(area_condition_test(e3, 2.0, 1.4, 1.0, m), AreaTestResult::Divergent);
    EXPECT_EQ(area_condition_test(e3, 2.0, 1.5, 1.0, m), AreaTestResult::Divergent);
    EXPECT_EQ(area_condition_test(e3, 2.0, 1.8, 1.0, m), AreaTestResult::Convergent);
    EXPECT_EQ(area_condition_test(AreaProfile::exponential(1.0, 1.0), 2.0, 1.2, 1.0, m),
              AreaTestResult::Convergent);
  }
  EXPECT_NEAR(area_exponent(2.0, 1.4), 0.4, 1e-15);
}

TEST(Area, AnalyticAndNumericAgreeOnPowerGrowth) {
  // power area t^beta: the integral of t^{-beta rho} diverges iff beta rho <= 1
  int compared = 0;
  for (double beta : {0.5, 1.0, 2.0, 3.0})
    for (double p : {1.5, 2.0, 3.0})
      for (double gamma = p - 1 + 0.1; gamma < p + 3; gamma += 0.35) {
        const AreaProfile a = AreaProfile::power(2.0, beta);
        const double br = beta * area_exponent(p, gamma);
        if (std::abs(br - 1.0) < 0.05) continue;  // too slow to separate numerically in the budget
        const AreaTestResult an = area_condition_test(a, p, gamma, 1.0, AreaTestMode::Analytic);
        EXPECT_EQ(an, br <= 1.0 ? AreaTestResult::Divergent : AreaTestResult::Convergent);
        const AreaTestResult nu = area_condition_test(a, p, gamma, 1.0, AreaTestMode::Numeric);
        if (nu != AreaTestResult::Inconclusive) {
          EXPECT_EQ(nu, an) << beta << " " << p << " " << gamma;
          ++compared;
        }
      }
  EXPECT_GT(compared, 20);
}

TEST(Area, SampledAnalyticIsInconclusive) {
  const Eigen::VectorXd g = log_grid(1.0, 1e3, 50);
  const AreaProfile s = AreaProfile::sampled(g, g.array().square());
  EXPECT_EQ(area_condition_test(s, 2.0, 1.4, 1.0, AreaTestMode::Analytic), AreaTestResult::Inconclusive);
}

TEST(SigmaBound, ReducedIntegralExamples) {
  const AreaProfile e3 = AreaProfile::euclidean(3);
  const SigmaBoundReport a = sigma_lower_bound(1.0, params(3, 2, 1.4), e3, 1.0, 10.0);
  EXPECT_NEAR(a.reduced_integral, (std::pow(10.0, 0.2) - 1.0) / 0.2, 1e-12);
  EXPECT_NEAR(a.reduced_integral, 2.9245, 1e-4);
  EXPECT_NEAR(a.comparison_integral, std::pow(a.area_normalization, -a.rho) * a.reduced_integral, 1e-15);
  const SigmaBoundReport b = sigma_lower_bound(1.0, params(3, 2, 1.5), e3, 1.0, std::exp(1.0));
  EXPECT_NEAR(b.reduced_integral, 1.0, 1e-12);
  const SigmaBoundReport z = sigma_lower_bound(1.0, params(3, 2, 1.4), e3, 2.0, 2.0);
  EXPECT_EQ(z.rhs, 0.0);
  EXPECT_FALSE(z.contradiction);
}

TEST(SigmaBound, ReducedIntegralMatchesQuadratureOnSampledArea) {
  // sampled t^2 areas follow the numerical path; same integral as the Euclidean shape
  const Eigen::VectorXd g = log_grid(0.5, 20.0, 400);
  const AreaProfile s = AreaProfile::sampled(g, 4.0 * M_PI * g.array().square());
  const SigmaBoundReport a = sigma_lower_bound(1.0, params(3, 2, 1.4), s, 1.0, 10.0);
  const SigmaBoundReport e = sigma_lower_bound(1.0, params(3, 2, 1.4), AreaProfile::euclidean(3), 1.0, 10.0);
  EXPECT_NEAR(a.comparison_integral, e.comparison_integral, 1e-8 * e.comparison_integral);
}

TEST(SigmaBound, MonotoneInRadius) {
  const AreaProfile e3 = AreaProfile::euclidean(3);
  double prev = -1.0;
  for (double r : {1.5, 2.0, 5.0, 20.0, 100.0}) {
    const double rhs = sigma_lower_bound(0.3, params(3, 2, 1.6), e3, 1.0, r).rhs;
    EXPECT_GT(rhs, prev);
    prev = rhs;
  }
}

TEST(SigmaBound, ConstantScaling) {
  // rhs is linear in C = (c_H / nu)^{gamma/(p-1)}
  ProblemParams a = params(3, 2, 1.4), b = a;
  b.c_H = 2.0;
  const AreaProfile e3 = AreaProfile::euclidean(3);
  const SigmaBoundReport ra = sigma_lower_bound(1.0, a, e3, 1.0, 10.0);
  const SigmaBoundReport rb = sigma_lower_bound(1.0, b, e3, 1.0, 10.0);
  EXPECT_NEAR(rb.constant_C / ra.constant_C, std::pow(2.0, 1.4), 1e-12);
  EXPECT_NEAR(rb.rhs / ra.rhs, std::pow(2.0, 1.4), 1e-12);
  EXPECT_EQ(ra.lhs, rb.lhs);
}

TEST(SigmaBound, WeightDoesNotChangeTheComparisonSide) {
  const AreaProfile e3 = AreaProfile::euclidean(3);
  for (double gamma : {1.2, 1.5, 1.9}) {
    const SigmaBoundReport a = sigma_lower_bound(0.7, params(3, 2, gamma), e3, 1.0, 30.0);
    const SigmaBoundReport w = sigma_lower_bound(0.7, params(3, 2, gamma), e3, 1.0, 30.0, EnergyWeight::Exponential);
    EXPECT_EQ(a.comparison_integral, w.comparison_integral);
    EXPECT_EQ(a.rhs, w.rhs);
    EXPECT_EQ(a.lhs, w.lhs);
    EXPECT_EQ(w.weight, EnergyWeight::Exponential);
  }
}

TEST(SigmaBound, ContradictionAtAndBelowThreshold) {
  const AreaProfile e3 = AreaProfile::euclidean(3);
  for (double gamma : {1.2, 1.4, 1.5}) {
    const auto r = contradiction_radius(1e-3, params(3, 2, gamma), e3, 1.0);
    ASSERT_TRUE(r) << gamma;
    EXPECT_TRUE(sigma_lower_bound(1e-3, params(3, 2, gamma), e3, 1.0, *r).contradiction);
    EXPECT_FALSE(sigma_lower_bound(1e-3, params(3, 2, gamma), e3, 1.0, *r / 2).contradiction);
  }
}

TEST(SigmaBound, SupercriticalWitnessIsNeverContradicted) {
  // the bump witness is a genuine positive supersolution, so its energy must satisfy the bound
  const ProblemParams prm = params(3, 2, 1.8);
  const BumpScale b = bump_profile_scale(3, 2.0, 1.8, 1.0, log_grid(1e-2, 1e2, 200));
  const RadialProfile u = RadialProfile::bump(b.c, std::get<Bump>(liouville_classify_euclidean(3, 2, 1.8)
                                                                       .witness_profile->family())
                                                       .delta);
  const double sigma_R = gradient_energy(u, 1.8, 1.0, 3);
  EXPECT_FALSE(contradiction_radius(sigma_R, prm, AreaProfile::euclidean(3), 1.0, 60));
}

TEST(Classify, EuclideanExamples) {
  const LiouvilleVerdict a = liouville_classify_euclidean(3, 2, 1.4);
  EXPECT_EQ(a.verdict, Verdict::Liouville);
  EXPECT_EQ(a.mechanism, Mechanism::ClosedFormThreshold);
  EXPECT_NEAR(a.gamma_star, 1.5, 1e-15);
  EXPECT_EQ(liouville_classify_euclidean(3, 2, 1.5).verdict, Verdict::Liouville);

  const LiouvilleVerdict b = liouville_classify_euclidean(3, 2, 1.8);
  EXPECT_EQ(b.verdict, Verdict::NoLiouville);
  EXPECT_EQ(b.witness, WitnessKind::Bump);
  ASSERT_TRUE(b.witness_check);
  EXPECT_TRUE(b.witness_check->pass);

  const LiouvilleVerdict c = liouville_classify_euclidean(3, 2, 4);
  EXPECT_EQ(c.verdict, Verdict::NoLiouville);
  EXPECT_EQ(c.witness, WitnessKind::EntirePower);
  ASSERT_TRUE(c.witness_check);
  EXPECT_TRUE(c.witness_check->pass);

  const LiouvilleVerdict d = liouville_classify_euclidean(3, 2, 2);
  EXPECT_EQ(d.verdict, Verdict::NoLiouville);
  EXPECT_EQ(d.witness, WitnessKind::Unavailable);

  EXPECT_THROW(liouville_classify_euclidean(3, 2, 1.0), Error);
}

TEST(Classify, MonotoneInGamma) {
  // once non-Liouville, larger gamma stays non-Liouville
  for (int dim : {3, 4, 6})
    for (double p : {1.5, 2.0, 2.5}) {
      bool seen_no = false;
      for (double gamma = p - 1 + 0.05; gamma < p + 2; gamma += 0.1) {
        const Verdict v = liouville_classify_euclidean(dim, p, gamma).verdict;
        if (seen_no) EXPECT_EQ(v, Verdict::NoLiouville) << dim << " " << p << " " << gamma;
        seen_no = seen_no || v == Verdict::NoLiouville;
      }
      EXPECT_TRUE(seen_no);
    }
}

TEST(Classify, AreaVerdicts) {
  const LiouvilleVerdict a =
      liouville_classify_area(AreaProfile::euclidean(3), 2, 1.4, 1.0, AreaTestMode::Numeric);
  EXPECT_EQ(a.verdict, Verdict::Liouville);
  EXPECT_EQ(a.mechanism, Mechanism::AreaIntegralDiverges);
  const LiouvilleVerdict b =
      liouville_classify_area(AreaProfile::exponential(1.0, 1.0), 2, 1.2, 1.0, AreaTestMode::Analytic);
  EXPECT_EQ(b.verdict, Verdict::Inconclusive);
  EXPECT_EQ(b.mechanism, Mechanism::AreaIntegralConverges);
  const Eigen::VectorXd g = log_grid(1.0, 1e3, 50);
  const LiouvilleVerdict c = liouville_classify_area(AreaProfile::sampled(g, g.array().square()), 2, 1.4, 1.0,
                                                     AreaTestMode::Analytic);
  EXPECT_EQ(c.verdict, Verdict::Inconclusive);
  EXPECT_FALSE(c.mechanism);
}

TEST(Classify, EuclideanAgreesWithAreaCriterion) {
  for (int dim : {3, 5})
    for (double p : {1.5, 2.0, 2.5})
      for (double gamma = p - 1 + 0.07; gamma < p; gamma += 0.11) {
        const bool liouville = liouville_classify_euclidean(dim, p, gamma).verdict == Verdict::Liouville;
        const AreaTestResult r =
            area_condition_test(AreaProfile::euclidean(dim), p, gamma, 1.0, AreaTestMode::Analytic);
        EXPECT_EQ(liouville, r == AreaTestResult::Divergent) << dim << " " << p << " " << gamma;
      }
}
