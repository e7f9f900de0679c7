#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "grouplife/random.hpp"
#include "test_support.hpp"

using namespace grouplife;
namespace gt = grouplife::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Dist>
std::vector<double> draws(const Dist& dist, std::size_t count, std::uint64_t seed) {
  RandomStream rs(seed);
  std::vector<double> values(count);
  for (auto& v : values) v = dist.draw(rs);
  return values;
}

}  // namespace

TEST(RandomStream, SameAddressSameSequence) {
  RandomStream a(42, {1, 7, 3});
  RandomStream b = RandomStream(42).child(1).child(7).child(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, ChildrenDiffer) {
  const RandomStream root(42);
  std::set<std::uint64_t> first;
  for (std::uint64_t c = 0; c < 1000; ++c) first.insert(root.child(c).child(0).next_u64());
  EXPECT_EQ(first.size(), 1000u);
  EXPECT_NE(RandomStream(1).next_u64(), RandomStream(2).next_u64());
}

TEST(RandomStream, DisjointSubstreamsIgnoreUpdateOrder) {
  const RandomStream root(9);
  RandomStream a1 = root.child(0), b1 = root.child(1);
  std::vector<double> a_first, b_first;
  for (int i = 0; i < 50; ++i) a_first.push_back(a1.uniform());
  for (int i = 0; i < 50; ++i) b_first.push_back(b1.standard_normal());

  RandomStream a2 = root.child(0), b2 = root.child(1);
  std::vector<double> a_second, b_second;
  for (int i = 0; i < 50; ++i) {
    b_second.push_back(b2.standard_normal());
    a_second.push_back(a2.uniform());
  }
  EXPECT_EQ(a_first, a_second);
  EXPECT_EQ(b_first, b_second);
}

TEST(RandomStream, UniformStaysInsideOpenInterval) {
  RandomStream rs(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rs.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, CopyKeepsPosition) {
  RandomStream a(5);
  a.next_u64();
  RandomStream b = a;
  EXPECT_EQ(a.position(), b.position());
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(LogDensity, Examples) {
  EXPECT_NEAR(log_density(LogNormal(0.0, 1.0), 1.0), -0.91893853320467274, 1e-15);
  EXPECT_NEAR(log_density(Weibull(1.0, 1.0), 0.5), -0.5, 1e-15);
  EXPECT_DOUBLE_EQ(log_density(Categorical({0.35, 0.65}), 0.0), std::log(0.35));
}

TEST(LogDensity, OutOfSupportIsNegativeInfinity) {
  EXPECT_EQ(log_density(LogNormal(0.0, 1.0), -1.0), -kInf);
  EXPECT_EQ(log_density(Weibull(1.0, 2.0), 0.0), -kInf);
  EXPECT_EQ(log_density(Gamma(2.0, 1.0), -0.5), -kInf);
  EXPECT_EQ(log_density(Beta(2.0, 2.0), 1.5), -kInf);
  EXPECT_EQ(log_density(Categorical({0.5, 0.5}), 2.0), -kInf);
  const std::vector<double> off_simplex{0.3, 0.3};
  EXPECT_EQ(log_density(Dirichlet({1.0, 1.0}), off_simplex), -kInf);
}

TEST(LogDensity, DirichletMatchesBeta) {
  const std::vector<double> x{0.3, 0.7};
  EXPECT_NEAR(Dirichlet({2.0, 3.0}).log_density(x), Beta(2.0, 3.0).log_density(0.3), 1e-12);
}

TEST(Construction, RejectsInvalidParameters) {
  EXPECT_THROW(Normal(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(GumbelMin(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(LogNormal(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(Weibull(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(Gamma(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(Beta(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(Dirichlet({}), std::invalid_argument);
  EXPECT_THROW(Dirichlet({1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(Categorical({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(Categorical({}), std::invalid_argument);
}

TEST(DensityMass, IntegratesToOne) {
  const std::vector<std::tuple<DistSpec, double, double>> cases{
      {Normal(-1.0, 0.5), -kInf, kInf},     {GumbelMin(0.3, 1.2), -kInf, kInf},
      {LogNormal(1.0, 0.4), 0.0, kInf},     {LogNormal(-0.5, 1.5), 0.0, kInf},
      {Weibull(2.0, 0.7), 0.0, kInf},       {Weibull(0.3, 3.0), 0.0, kInf},
      {Gamma(0.6, 2.0), 0.0, kInf},         {Gamma(5.0, 0.5), 0.0, kInf},
      {Beta(0.5, 0.5), 0.0, 1.0},           {Beta(3.0, 1.5), 0.0, 1.0},
  };
  for (const auto& [spec, a, b] : cases) {
    const double mass = gt::integrate([&](double x) { return std::exp(log_density(spec, x)); }, a, b);
    EXPECT_NEAR(mass, 1.0, 1e-6);
  }
}

TEST(Draws, KolmogorovSmirnovAgainstCdf) {
  constexpr std::size_t kCount = 10000;
  const double critical = gt::ks_critical_001(kCount);
  {
    const Normal d(0.5, 2.0);
    EXPECT_LT(gt::ks_statistic(draws(d, kCount, 1), [&](double x) { return d.cdf(x); }), critical);
  }
  {
    const GumbelMin d(-0.2, 0.7);
    EXPECT_LT(gt::ks_statistic(draws(d, kCount, 2), [&](double x) { return d.cdf(x); }), critical);
  }
  {
    const LogNormal d(0.3, 0.9);
    EXPECT_LT(gt::ks_statistic(draws(d, kCount, 3), [&](double x) { return d.cdf(x); }), critical);
  }
  {
    const Weibull d(1.5, 0.8);
    EXPECT_LT(gt::ks_statistic(draws(d, kCount, 4), [&](double x) { return d.cdf(x); }), critical);
  }
  for (double shape : {0.3, 1.0, 4.5}) {
    const Gamma d(shape, 1.7);
    EXPECT_LT(gt::ks_statistic(draws(d, kCount, 5), [&](double x) { return boost::math::gamma_p(shape, 1.7 * x); }),
              critical);
  }
  for (auto [a, b] : {std::pair{0.5, 0.5}, std::pair{2.0, 5.0}}) {
    const Beta d(a, b);
    EXPECT_LT(gt::ks_statistic(draws(d, kCount, 6), [&](double x) { return gt::beta_cdf(x, a, b); }), critical);
  }
}

TEST(Draws, CdfMatchesIndependentOracle) {
  for (double x : {-3.0, -0.4, 0.0, 1.1, 2.5}) {
    EXPECT_NEAR(Normal(0.2, 1.3).cdf(x), gt::normal_cdf(x, 0.2, 1.3), 1e-14);
    EXPECT_NEAR(standard_normal_cdf(x), gt::normal_cdf(x, 0.0, 1.0), 1e-15);
  }
}

TEST(Draws, DegenerateCategoricalAlwaysFirst) {
  RandomStream rs(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(Categorical({1.0}).draw(rs), 0u);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(Categorical({1.0, 0.0}).draw(rs), 0u);
}

TEST(Draws, CategoricalFrequencies) {
  const Categorical c({0.2, 0.5, 0.3});
  RandomStream rs(8);
  std::vector<double> freq(3, 0.0);
  constexpr int kCount = 100000;
  for (int i = 0; i < kCount; ++i) freq[c.draw(rs)] += 1.0 / kCount;
  for (std::size_t k = 0; k < 3; ++k) {
    const double p = c.probabilities[k];
    EXPECT_NEAR(freq[k], p, 4.0 * std::sqrt(p * (1 - p) / kCount));
  }
}

TEST(Draws, SymmetricDirichletMean) {
  constexpr std::size_t kCount = 100000;
  for (double a : {0.5, 3.0}) {
    const Dirichlet d({a, a});
    RandomStream rs(11);
    double m = 0.0;
    for (std::size_t i = 0; i < kCount; ++i) m += d.draw(rs)[0] / kCount;
    const double var = a * a / (4.0 * a * a * (2.0 * a + 1.0));
    EXPECT_NEAR(m, 0.5, 3.0 * std::sqrt(var / kCount));
  }
}

TEST(Draws, GammaMean) {
  constexpr std::size_t kCount = 100000;
  const auto values = draws(Gamma(2.0, 2.0), kCount, 12);
  EXPECT_NEAR(gt::mean(values), 1.0, 3.0 * std::sqrt(0.5 / kCount));
}

TEST(Draws, DirichletOnSimplexWithTinyConcentrations) {
  RandomStream rs(13);
  const Dirichlet d({0.01, 0.01, 0.01});
  for (int i = 0; i < 1000; ++i) {
    const auto v = d.draw(rs);
    double total = 0.0;
    for (double x : v) {
      ASSERT_GE(x, 0.0);
      total += x;
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Variant, DrawDispatch) {
  RandomStream a(3), b(3);
  EXPECT_EQ(draw(DistSpec(Normal(1.0, 2.0)), a), Normal(1.0, 2.0).draw(b));
  EXPECT_THROW(draw(DistSpec(Dirichlet({1.0, 1.0})), a), std::invalid_argument);
  EXPECT_EQ(draw_vector(DistSpec(Dirichlet({1.0, 1.0, 1.0})), a).size(), 3u);
  EXPECT_EQ(draw_vector(DistSpec(Gamma(1.0, 1.0)), a).size(), 1u);
}

TEST(Numeric, LogSumExpShiftInvariance) {
  const std::vector<double> w{-1000.0, -1001.0, -999.5};
  std::vector<double> shifted = w;
  for (double& v : shifted) v += 12345.0;
  const auto p1 = softmax(w), p2 = softmax(shifted);
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_NEAR(p1[k], p2[k], 1e-12);
  EXPECT_NEAR(log_sum_exp(shifted) - log_sum_exp(w), 12345.0, 1e-9);
}

TEST(Numeric, SoftmaxRejectsAllNegativeInfinity) {
  const std::vector<double> w{-kInf, -kInf};
  EXPECT_THROW(softmax(w), std::domain_error);
}

TEST(Numeric, LogSurvivalDeepTail) {
  for (double z : {-5.0, 0.0, 3.0, 10.0, 30.0}) {
    EXPECT_NEAR(log_standard_normal_survival(z), std::log(boost::math::erfc(z / std::sqrt(2.0)) / 2.0), 1e-10);
  }
  // Beyond the direct range use the asymptotic expansion as the oracle.
  const double z = 60.0;
  const double oracle = -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * M_PI) + std::log1p(-1.0 / (z * z) + 3.0 / std::pow(z, 4));
  EXPECT_NEAR(log_standard_normal_survival(z), oracle, 1e-9);
}
