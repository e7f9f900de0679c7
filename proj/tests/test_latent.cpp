#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "grouplife/latent.hpp"
#include "test_support.hpp"

using namespace grouplife;
namespace gt = grouplife::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> frequencies(const std::function<std::size_t(RandomStream&)>& draw, std::size_t K,
                                std::size_t count, std::uint64_t seed) {
  RandomStream rs(seed);
  std::vector<double> freq(K, 0.0);
  for (std::size_t i = 0; i < count; ++i) freq[draw(rs)] += 1.0 / static_cast<double>(count);
  return freq;
}

}  // namespace

TEST(DiscretePosterior, Examples) {
  const std::vector<double> flat{-3.2, -3.2};
  const std::vector<double> p{0.35, 0.65};
  const auto post = discrete_posterior(flat, p);
  EXPECT_NEAR(post[0], 0.35, 1e-15);
  EXPECT_NEAR(post[1], 0.65, 1e-15);

  const std::vector<double> ll{0.0, std::log(3.0)};
  const std::vector<double> half{0.5, 0.5};
  const auto post2 = discrete_posterior(ll, half);
  EXPECT_NEAR(post2[0], 0.25, 1e-15);
  EXPECT_NEAR(post2[1], 0.75, 1e-15);

  const std::vector<double> degenerate{1.0, 0.0};
  RandomStream rs(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_w_discrete(ll, degenerate, rs), 0u);
}

TEST(DiscretePosterior, ShiftInvariant) {
  RandomStream rs(2);
  for (int r = 0; r < 100; ++r) {
    // Values on a dyadic grid so that adding the shift is itself exact.
    std::vector<double> ll(3);
    for (double& v : ll) v = std::ldexp(std::round(std::ldexp(Normal(0, 50).draw(rs), 20)), -20);
    const auto p = Dirichlet({1.0, 1.0, 1.0}).draw(rs);
    auto shifted = ll;
    const double c = std::round(Normal(0, 1e4).draw(rs));
    for (double& v : shifted) v += c;
    const auto a = discrete_posterior(ll, p), b = discrete_posterior(shifted, p);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    const std::vector<NormalLaw> phi{{-1.0, 0.5}, {0.0, 1.0}, {2.0, 0.3}};
    const auto m = membership_posterior(ll[0] / 50.0, p, phi);
    double total = 0.0;
    for (double v : m) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(DiscretePosterior, DrawFrequenciesMatch) {
  const std::vector<double> ll{0.0, std::log(3.0)};
  const std::vector<double> p{0.5, 0.5};
  const auto freq = frequencies([&](RandomStream& rs) { return sample_w_discrete(ll, p, rs); }, 2, 100000, 3);
  EXPECT_NEAR(freq[1], 0.75, 4.0 * std::sqrt(0.75 * 0.25 / 100000));
}

TEST(DiscretePosterior, AllZeroWeightThrows) {
  const std::vector<double> ll{-kInf, -kInf};
  const std::vector<double> p{0.5, 0.5};
  RandomStream rs(1);
  EXPECT_THROW(sample_w_discrete(ll, p, rs), std::domain_error);
}

TEST(UpdateP, PosteriorMeanAndSimplex) {
  const std::vector<std::size_t> counts{3, 7};
  const std::vector<double> prior{0.5, 0.5};
  const RandomStream root(4);
  constexpr std::size_t kCount = 100000;
  double m = 0.0;
  for (std::size_t i = 0; i < kCount; ++i) {
    RandomStream rs = root.child(i);
    const auto p = update_p(counts, prior, rs);
    ASSERT_NEAR(p[0] + p[1], 1.0, 1e-12);
    ASSERT_GE(p[0], 0.0);
    m += p[0] / kCount;
  }
  const double a = 3.5, b = 7.5;
  const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1)));
  EXPECT_NEAR(m, a / (a + b), 3.0 * sd / std::sqrt(kCount));
}

TEST(UpdateP, NoDataReturnsPriorDraw) {
  const std::vector<std::size_t> counts{0, 0, 0};
  const std::vector<double> prior{0.5, 1.0, 2.0};
  RandomStream a(5), b(5), c(5);
  const auto expected = Dirichlet(prior).draw(b);
  EXPECT_EQ(update_p(counts, prior, a), expected);
  EXPECT_EQ(update_q(counts, prior, c), expected);
}

TEST(UpdateQ, MatchesBetaPosterior) {
  const std::vector<std::size_t> counts{2, 8};
  const std::vector<double> prior{0.5, 0.5};
  const RandomStream root(6);
  std::vector<double> first;
  for (std::size_t i = 0; i < 10000; ++i) {
    RandomStream rs = root.child(i);
    first.push_back(update_q(counts, prior, rs)[0]);
  }
  EXPECT_LT(gt::ks_statistic(first, [](double x) { return gt::beta_cdf(x, 2.5, 8.5); }), gt::ks_critical_001(10000));
}

TEST(SampleWContinuous, ConjugateLongRun) {
  // One uncensored lognormal unit: log t = W + sigma * eps, W ~ N(m, s^2).
  const double sigma = 0.5, m = 0.3, s = 0.8, log_t = 1.1;
  const std::vector<Observation> group{{std::exp(log_t), true, {}}};
  const RegressionParams theta{0.0, {}, sigma};
  const double precision = 1.0 / (s * s) + 1.0 / (sigma * sigma);
  const double post_mean = (m / (s * s) + log_t / (sigma * sigma)) / precision;
  const double post_sd = std::sqrt(1.0 / precision);

  RandomStream rs(7);
  double w = 0.0;
  std::vector<double> kept;
  for (int i = 0; i < 200000; ++i) {
    w = sample_w_continuous(w, group, theta, ErrorKind::lognormal, {m, s}, 1.0, rs).value;
    if (i % 20 == 19) kept.push_back(w);
  }
  EXPECT_EQ(kept.size(), 10000u);
  EXPECT_LT(gt::ks_statistic(kept, [&](double x) { return gt::normal_cdf(x, post_mean, post_sd); }),
            gt::ks_critical_001(kept.size()));
}

TEST(SampleWContinuous, RejectsBadScale) {
  RandomStream rs(1);
  const std::vector<Observation> group{{1.0, true, {}}};
  EXPECT_THROW(sample_w_continuous(0.0, group, {0.0, {}, 1.0}, ErrorKind::lognormal, {0, 1}, 0.0, rs),
               std::invalid_argument);
}

TEST(SampleWMixed, SingleComponentEqualsContinuous) {
  const std::vector<Observation> group{{2.0, true, {0.4}}, {3.5, false, {-0.2}}};
  const RegressionParams theta{0.2, {0.7}, 0.6};
  for (ErrorKind kind : {ErrorKind::lognormal, ErrorKind::weibull}) {
    RandomStream a(8), b(8);
    double wa = 0.0, wb = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto sa = sample_w_continuous(wa, group, theta, kind, {0.1, 0.9}, 0.5, a);
      const auto sb = sample_w_mixed(wb, group, theta, kind, {0.1, 0.9}, 0.5, b);
      ASSERT_EQ(sa.value, sb.value);
      ASSERT_EQ(sa.accepted, sb.accepted);
      wa = sa.value;
      wb = sb.value;
    }
  }
}

TEST(SampleWMixed, NarrowComponentPinsToMean) {
  const std::vector<Observation> group{{2.0, true, {}}, {0.5, true, {}}};
  const RegressionParams theta{0.0, {}, 0.5};
  RandomStream rs(9);
  double w = 0.7;
  for (int i = 0; i < 5000; ++i) {
    w = sample_w_mixed(w, group, theta, ErrorKind::weibull, {0.7, 1e-6}, 1e-6, rs).value;
  }
  EXPECT_NEAR(w, 0.7, 1e-4);
}

TEST(UpdatePhi, EmptyGroupDrawsFromHyperprior) {
  const NigHyperprior prior{0.5, 2.0, 6.0, 3.0};
  RandomStream a(10), b(10);
  const auto x = update_phi({}, prior, a);
  const auto y = draw_phi_prior(prior, b);
  EXPECT_EQ(x.mean, y.mean);
  EXPECT_EQ(x.sd, y.sd);
}

TEST(UpdatePhi, PosteriorMoments) {
  const NigHyperprior prior{0.0, 0.5, 3.0, 2.0};
  const std::vector<double> w{0.4, -0.3, 1.2, 0.8, 0.1};
  const double n = 5.0;
  const double mean = gt::mean(w);
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  const double kn = prior.k0 + n, mn = (prior.k0 * prior.m0 + n * mean) / kn;
  const double an = prior.a0 + n / 2, bn = prior.b0 + ss / 2 + prior.k0 * n * mean * mean / (2 * kn);

  const RandomStream root(11);
  std::vector<double> mu, var;
  for (std::size_t i = 0; i < 100000; ++i) {
    RandomStream rs = root.child(i);
    const auto phi = update_phi(w, prior, rs);
    ASSERT_GT(phi.sd, 0.0);
    mu.push_back(phi.mean);
    var.push_back(phi.sd * phi.sd);
  }
  const double var_mean = bn / (an - 1);
  const double var_var = bn * bn / ((an - 1) * (an - 1) * (an - 2));
  EXPECT_NEAR(gt::mean(var), var_mean, 3.0 * std::sqrt(var_var / 1e5));
  const double mu_var = var_mean / kn;
  EXPECT_NEAR(gt::mean(mu), mn, 3.0 * std::sqrt(mu_var / 1e5));
  EXPECT_LT(gt::ks_statistic(std::vector<double>(var.begin(), var.begin() + 10000),
                             [&](double x) { return gt::inverse_gamma_cdf(x, an, bn); }),
            gt::ks_critical_001(10000));
}

TEST(UpdatePhi, ConcentratesOnConstantData) {
  const std::vector<double> w(100000, 1.75);
  RandomStream rs(12);
  const auto phi = update_phi(w, NigHyperprior{}, rs);
  EXPECT_NEAR(phi.mean, 1.75, 1e-3);
  EXPECT_LT(phi.sd, 0.02);
}

TEST(Membership, Examples) {
  const std::vector<double> q{0.3, 0.7};
  const std::vector<NormalLaw> same{{0.0, 1.0}, {0.0, 1.0}};
  const auto p1 = membership_posterior(0.4, q, same);
  EXPECT_NEAR(p1[0], 0.3, 1e-15);

  const std::vector<double> half{0.5, 0.5};
  const std::vector<NormalLaw> sym{{-1.0, 1.0}, {1.0, 1.0}};
  const auto p2 = membership_posterior(0.0, half, sym);
  EXPECT_NEAR(p2[0], 0.5, 1e-15);
  EXPECT_NEAR(p2[1], 0.5, 1e-15);

  const std::vector<NormalLaw> apart{{-1.0, 0.2}, {1.0, 0.2}};
  EXPECT_GT(membership_posterior(5.0, half, apart)[1], 1.0 - 1e-12);
  RandomStream rs(13);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_membership(5.0, half, apart, rs), 1u);
  EXPECT_THROW(sample_membership(kInf, half, apart, rs), std::domain_error);
}

TEST(MixtureDensity, SingleAtomIsPlainDensity) {
  const RegressionParams theta{0.3, {0.5}, 0.8};
  const std::vector<double> x{1.2}, d{0.4}, p{1.0};
  for (ErrorKind kind : {ErrorKind::lognormal, ErrorKind::weibull}) {
    for (double t : {0.3, 1.0, 4.0}) {
      EXPECT_NEAR(mixture_marginal_density(theta, kind, x, d, p, t),
                  std::exp(unit_log_likelihood(theta, kind, {t, true, x}, 0.4)), 1e-15);
    }
  }
}

TEST(MixtureDensity, LognormalTwoTermDirect) {
  const RegressionParams theta{1.0, {}, 0.6};
  const std::vector<double> d{-0.5, 0.9}, p{0.35, 0.65};
  for (int g = 1; g <= 20; ++g) {
    const double t = 0.4 * g;
    double direct = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const double mu = 1.0 + d[k];
      const double z = (std::log(t) - mu) / 0.6;
      direct += p[k] * std::exp(-0.5 * z * z) / (t * 0.6 * std::sqrt(2.0 * M_PI));
    }
    EXPECT_NEAR(mixture_marginal_density(theta, ErrorKind::lognormal, {}, d, p, t), direct, 1e-12);
  }
}

TEST(MixtureDensity, WeibullComponentsShareShape) {
  // sigma = 0.5: every component is Weibull with shape 2 and rate exp(-2 mu_k).
  const RegressionParams theta{0.0, {}, 0.5};
  const std::vector<double> d{-0.3, 0.2}, p{0.4, 0.6};
  for (double t : {0.2, 0.9, 1.7}) {
    double direct = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const double rate = std::exp(-2.0 * d[k]);
      direct += p[k] * 2.0 * rate * t * std::exp(-rate * t * t);
    }
    EXPECT_NEAR(mixture_marginal_density(theta, ErrorKind::weibull, {}, d, p, t), direct, 1e-12);
  }
}

TEST(LatentTypes, Validation) {
  EXPECT_THROW(GslhD({1.0, 0.0}, {0.5, 0.5}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(GslhD({0.0, 1.0}, {0.5, 0.6}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(GslhD({0.0, 1.0}, {0.5, 0.5}, {0.5}), std::invalid_argument);
  EXPECT_NO_THROW(GslhD({-1.0, 1.0}, {0.35, 0.65}, {0.5, 0.5}));
  EXPECT_THROW(GslhC(0.0, 0.0, {}), std::invalid_argument);
  EXPECT_THROW(GslhC(0.0, 1.0, NigHyperprior{0.0, -1.0, 2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(GslhM({0.5, 0.5}, {{1.0, 0.3}, {-1.0, 0.3}}, {0.5, 0.5}, {}), std::invalid_argument);
  EXPECT_THROW(GslhM({0.5, 0.5}, {{-1.0, 0.0}, {1.0, 0.3}}, {0.5, 0.5}, {}), std::invalid_argument);
  EXPECT_NO_THROW(GslhM({0.35, 0.65}, {{-1.0, 0.3}, {1.0, 0.3}}, {0.5, 0.5}, {}));
}

TEST(LatentKindText, RoundTrip) {
  for (LatentKind kind : {LatentKind::none, LatentKind::discrete, LatentKind::continuous, LatentKind::mixed}) {
    EXPECT_EQ(parse_latent_kind(to_string(kind)), kind);
  }
  EXPECT_EQ(parse_latent_kind("baseline"), LatentKind::none);
  EXPECT_THROW(parse_latent_kind("gslh-x"), std::invalid_argument);
}
