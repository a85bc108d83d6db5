#include <cmath>

#include <gtest/gtest.h>

#include "mroot/metric_eval.hpp"
#include "support/corpus.hpp"

using namespace mroot;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v1(double a) { return (Vec(1) << a).finished(); }

void expect_mat_near(const Mat& a, const Mat& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << "\n" << a << "\nvs\n" << b;
}

}  // namespace

TEST(MetricEval, Euclid) {
  const auto f = corpus::load("euclid2");
  const MetricEval ev = evaluate(f.field, {v2(0, 0), v2(1, 0)});
  EXPECT_DOUBLE_EQ(ev.A, 1.0);
  expect_mat_near(ev.A_i, v2(2, 0), 0.0);
  expect_mat_near(ev.A_ij, 2.0 * Mat::Identity(2, 2), 0.0);
  expect_mat_near(ev.g, Mat::Identity(2, 2), 1e-15);
  expect_mat_near(ev.A_inv, 0.5 * Mat::Identity(2, 2), 1e-15);
  expect_mat_near(ev.g_inv, Mat::Identity(2, 2), 1e-15);
  expect_mat_near(ev.h, (Mat(2, 2) << 0, 0, 0, 1).finished(), 1e-15);
  EXPECT_EQ(ev.A_xl.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(ev.A0, 0.0);
  EXPECT_EQ(ev.A0l.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MetricEval, Quartic) {
  const auto f = corpus::load("quartic2");
  const MetricEval ev = evaluate(f.field, {v2(0, 0), v2(1, 1)});
  EXPECT_DOUBLE_EQ(ev.A, 2.0);
  expect_mat_near(ev.A_i, v2(4, 4), 1e-14);
  expect_mat_near(ev.A_ij, 12.0 * Mat::Identity(2, 2), 1e-14);
  EXPECT_DOUBLE_EQ(ev.A_ijk[0](0, 0), 24.0);
  EXPECT_DOUBLE_EQ(ev.A_ijk[0](1, 1), 0.0);

  const double s = std::pow(2.0, -1.5);
  const Mat g = s * (Mat(2, 2) << 4, -2, -2, 4).finished();
  expect_mat_near(ev.g, g, 1e-14);
  expect_mat_near(ev.A_inv, Mat::Identity(2, 2) / 12.0, 1e-15);
  expect_mat_near(ev.g_inv, g.inverse(), 1e-13);
  expect_mat_near(ev.h, s * (Mat(2, 2) << 3, -3, -3, 3).finished(), 1e-14);
}

TEST(MetricEval, ScaledQuarticXDerivative) {
  const auto f = corpus::load("quartic2_scaled");
  const MetricEval ev = evaluate(f.field, {v2(0, 0), v2(1, 1)});
  EXPECT_DOUBLE_EQ(ev.A_xl(0), 2.0);
  EXPECT_DOUBLE_EQ(ev.A_xl(1), 0.0);
}

TEST(MetricEval, Funk) {
  const auto f = corpus::load("funk1");
  const MetricEval ev = evaluate(f.field, {v1(0), v1(1)});
  EXPECT_DOUBLE_EQ(ev.A, 1.0);
  EXPECT_DOUBLE_EQ(ev.A_i(0), 2.0);
  EXPECT_DOUBLE_EQ(ev.A_ij(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(ev.A_xl(0), 2.0);
  EXPECT_DOUBLE_EQ(ev.A0, 2.0);
  EXPECT_DOUBLE_EQ(ev.A0l(0), 4.0);
  EXPECT_NEAR(ev.g(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(ev.A_inv(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(ev.g_inv(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(ev.h(0, 0), 0.0, 1e-15);
}

TEST(MetricEval, ConeBoundaryIsDegenerate) {
  const auto f = corpus::load("quartic2");
  try {
    evaluate(f.field, {v2(0, 0), v2(1, 0)});
    FAIL();
  } catch (const DegenerateMetric& e) {
    EXPECT_EQ(e.kind(), DegenerateMetric::Kind::singular_hessian);
    EXPECT_EQ(e.rcond(), 0.0);
  }
  EXPECT_THROW(evaluate(f.field, {v2(0, 0), v2(0, 0)}), DegenerateMetric);
}

TEST(MetricEval, NonPositiveAIsOutsideCone) {
  const auto f = parse_metric_file(corpus::random_cubic_text());
  const Vec x = Vec::Zero(3);
  try {
    evaluate(f.field, {x, -Vec::Ones(3)});
    FAIL();
  } catch (const DegenerateMetric& e) {
    EXPECT_EQ(e.kind(), DegenerateMetric::Kind::nonpositive_A);
  }
}

TEST(MetricEval, OutsideBoxIsDomainError) {
  const auto f = corpus::load("funk1");
  EXPECT_THROW(evaluate(f.field, {v1(0.95), v1(1)}), DomainError);
}

TEST(EulerReport, EuclidIsExact) {
  const auto f = corpus::load("euclid2");
  for (const auto& r : euler_report(evaluate(f.field, {v2(0.1, 0.2), v2(0.6, -0.8)})))
    EXPECT_LE(r.value, 1e-15) << r.name;
}

TEST(EulerReport, FaultInjectionIsDetected) {
  const auto f = corpus::load("euclid2");
  MetricEval ev = evaluate(f.field, {v2(0, 0), v2(1, 0)});
  ev.A_i(0) += 1.0;
  const auto r = euler_report(ev);
  EXPECT_EQ(r.front().name, "euler_gradient");
  EXPECT_NEAR(r.front().value, 1.0 / (1.0 + ev.A), 1e-15);
}

// Identity block, F^2 reconstruction and the angular metric over the corpus.
class CorpusIdentities : public ::testing::TestWithParam<std::string> {};

TEST_P(CorpusIdentities, HoldAtSeededProbes) {
  const auto f = corpus::load(GetParam());
  const auto probes = corpus::seeded_probes(f.field, 5, 10);
  std::size_t count = 0;
  for (const auto& b : probes)
    for (const auto& y : b.fan) {
      const MetricEval ev = evaluate(f.field, {b.x, y});
      for (const auto& r : euler_report(ev)) EXPECT_LE(r.value, 1e-9) << r.name;

      const double F2 = ev.F2();
      EXPECT_LE(std::abs(ev.y.dot(ev.g * ev.y) - F2), 1e-9 * F2);
      const Mat h_def = ev.g - ev.y_low * ev.y_low.transpose() / F2;
      EXPECT_LE((ev.h - h_def).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + ev.g.cwiseAbs().maxCoeff()));
      EXPECT_LE((ev.h * ev.y).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + ev.h.cwiseAbs().maxCoeff()));
      ++count;
    }
  EXPECT_GE(count, 10u);
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusIdentities, ::testing::ValuesIn(corpus::corpus_names()));
