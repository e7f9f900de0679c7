#include "grouplife/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grouplife {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// Philox4x32 with 10 rounds; returns the first two output words.
std::uint64_t philox4x32_10(std::uint64_t key, std::uint64_t counter) {
  constexpr std::uint32_t kM0 = 0xD2511F53U;
  constexpr std::uint32_t kM1 = 0xCD9E8D57U;
  constexpr std::uint32_t kW0 = 0x9E3779B9U;
  constexpr std::uint32_t kW1 = 0xBB67AE85U;

  std::uint32_t c0 = static_cast<std::uint32_t>(counter);
  std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
  std::uint32_t c2 = 0;
  std::uint32_t c3 = 0;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo32(kM0, c0, hi0, lo0);
    mulhilo32(kM1, c2, hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
    k0 += kW0;
    k1 += kW1;
  }
  return (static_cast<std::uint64_t>(c1) << 32) | c0;
}

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// RandomStream

RandomStream::RandomStream(std::uint64_t root_seed) : key_(splitmix64(root_seed)) {}

RandomStream::RandomStream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path)
    : RandomStream(root_seed) {
  for (auto index : path) key_ = child(index).key_;
}

RandomStream RandomStream::child(std::uint64_t index) const {
  const std::uint64_t derived = splitmix64(key_ ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  return RandomStream(derived, 0, 0);
}

std::uint64_t RandomStream::next_u64() { return philox4x32_10(key_, counter_++); }

double RandomStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::standard_normal() {
  // Box-Muller, cosine branch only, so each call consumes exactly two words.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// Helpers

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_standard_normal_survival(double z) {
  if (z < 35.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Asymptotic Mills-ratio expansion; erfc underflows past here.
  const double inv2 = 1.0 / (z * z);
  const double series = 1.0 - inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2;
  return -0.5 * z * z - std::log(z) - kHalfLog2Pi + std::log(series);
}

double log_sum_exp(std::span<const double> values) {
  double max_value = kNegInf;
  for (double v : values) max_value = std::max(max_value, v);
  if (!std::isfinite(max_value)) return max_value;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max_value);
  return max_value + std::log(sum);
}

std::vector<double> softmax(std::span<const double> log_weights) {
  const double normalizer = log_sum_exp(log_weights);
  if (!std::isfinite(normalizer)) {
    throw std::domain_error("softmax: no finite log weight");
  }
  std::vector<double> probabilities(log_weights.size());
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    probabilities[k] = std::exp(log_weights[k] - normalizer);
  }
  return probabilities;
}

// ---------------------------------------------------------------------------
// Univariate families

Normal::Normal(double mean_, double sd_) : mean(mean_), sd(sd_) {
  require(std::isfinite(mean), "normal: mean must be finite");
  require(positive_finite(sd), "normal: sd must be positive");
}

double Normal::log_density(double x) const {
  const double z = (x - mean) / sd;
  return -kHalfLog2Pi - std::log(sd) - 0.5 * z * z;
}

double Normal::cdf(double x) const { return standard_normal_cdf((x - mean) / sd); }

double Normal::draw(RandomStream& rs) const { return mean + sd * rs.standard_normal(); }

GumbelMin::GumbelMin(double location_, double scale_) : location(location_), scale(scale_) {
  require(std::isfinite(location), "gumbel-min: location must be finite");
  require(positive_finite(scale), "gumbel-min: scale must be positive");
}

double GumbelMin::log_density(double x) const {
  const double z = (x - location) / scale;
  return -std::log(scale) + z - std::exp(z);
}

double GumbelMin::cdf(double x) const {
  return -std::expm1(-std::exp((x - location) / scale));
}

double GumbelMin::draw(RandomStream& rs) const {
  return location + scale * std::log(-std::log(rs.uniform()));
}

LogNormal::LogNormal(double log_mean_, double log_sd_) : log_mean(log_mean_), log_sd(log_sd_) {
  require(std::isfinite(log_mean), "lognormal: log-mean must be finite");
  require(positive_finite(log_sd), "lognormal: log-sd must be positive");
}

double LogNormal::log_density(double t) const {
  if (!(t > 0.0)) return kNegInf;
  const double log_t = std::log(t);
  const double z = (log_t - log_mean) / log_sd;
  return -kHalfLog2Pi - std::log(log_sd) - log_t - 0.5 * z * z;
}

double LogNormal::cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  return standard_normal_cdf((std::log(t) - log_mean) / log_sd);
}

double LogNormal::draw(RandomStream& rs) const {
  return std::exp(log_mean + log_sd * rs.standard_normal());
}

Weibull::Weibull(double rate_, double shape_) : rate(rate_), shape(shape_) {
  require(positive_finite(rate), "weibull: rate must be positive");
  require(positive_finite(shape), "weibull: shape must be positive");
}

double Weibull::log_density(double t) const {
  if (!(t > 0.0)) return kNegInf;
  const double log_t = std::log(t);
  return std::log(shape) + std::log(rate) + (shape - 1.0) * log_t -
         rate * std::exp(shape * log_t);
}

double Weibull::cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  return -std::expm1(-rate * std::pow(t, shape));
}

double Weibull::draw(RandomStream& rs) const {
  return std::pow(-std::log(rs.uniform()) / rate, 1.0 / shape);
}

Gamma::Gamma(double shape_, double rate_) : shape(shape_), rate(rate_) {
  require(positive_finite(shape), "gamma: shape must be positive");
  require(positive_finite(rate), "gamma: rate must be positive");
}

double Gamma::log_density(double x) const {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double Gamma::draw(RandomStream& rs) const {
  // Marsaglia-Tsang; shape < 1 boosted through U^(1/shape).
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(rs.uniform(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rs.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rs.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

Beta::Beta(double a_, double b_) : a(a_), b(b_) {
  require(positive_finite(a), "beta: a must be positive");
  require(positive_finite(b), "beta: b must be positive");
}

double Beta::log_density(double x) const {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

double Beta::draw(RandomStream& rs) const {
  const double x = Gamma(a, 1.0).draw(rs);
  const double y = Gamma(b, 1.0).draw(rs);
  return x / (x + y);
}

// ---------------------------------------------------------------------------
// Multivariate / discrete families

Dirichlet::Dirichlet(std::vector<double> concentration_)
    : concentration(std::move(concentration_)) {
  require(!concentration.empty(), "dirichlet: empty concentration vector");
  for (double a : concentration) require(positive_finite(a), "dirichlet: concentration must be positive");
}

double Dirichlet::log_density(std::span<const double> x) const {
  if (x.size() != concentration.size()) return kNegInf;
  double total = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) return kNegInf;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) return kNegInf;
  double alpha_sum = 0.0;
  double result = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    alpha_sum += concentration[k];
    result += (concentration[k] - 1.0) * std::log(x[k]) - std::lgamma(concentration[k]);
  }
  return result + std::lgamma(alpha_sum);
}

std::vector<double> Dirichlet::draw(RandomStream& rs) const {
  std::vector<double> x(concentration.size());
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = Gamma(concentration[k], 1.0).draw(rs);
    total += x[k];
  }
  if (!(total > 0.0)) {
    // Every component underflowed (tiny concentrations); put the mass on the largest alpha.
    std::fill(x.begin(), x.end(), 0.0);
    x[std::distance(concentration.begin(),
                    std::max_element(concentration.begin(), concentration.end()))] = 1.0;
    return x;
  }
  for (double& v : x) v /= total;
  return x;
}

Categorical::Categorical(std::vector<double> probabilities_)
    : probabilities(std::move(probabilities_)) {
  require(!probabilities.empty(), "categorical: empty probability vector");
  double total = 0.0;
  for (double p : probabilities) {
    require(std::isfinite(p) && p >= 0.0, "categorical: probabilities must be non-negative");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-9, "categorical: probabilities must sum to 1");
}

double Categorical::log_mass(std::size_t k) const {
  if (k >= probabilities.size()) return kNegInf;
  return std::log(probabilities[k]);
}

std::size_t Categorical::draw(RandomStream& rs) const {
  const double u = rs.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    cumulative += probabilities[k];
    last_positive = k;
    if (u <= cumulative) return k;
  }
  return last_positive;
}

// ---------------------------------------------------------------------------
// Generic dispatch

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

double log_density(const DistSpec& spec, double x) {
  return std::visit(
      overloaded{
          [x](const Dirichlet&) -> double {
            throw std::invalid_argument("dirichlet density needs a vector argument");
          },
          [x](const Categorical& c) -> double {
            if (!(x >= 0.0) || x != std::floor(x)) return kNegInf;
            return c.log_mass(static_cast<std::size_t>(x));
          },
          [x](const auto& d) -> double { return d.log_density(x); },
      },
      spec);
}

double log_density(const DistSpec& spec, std::span<const double> x) {
  if (const auto* dirichlet = std::get_if<Dirichlet>(&spec)) return dirichlet->log_density(x);
  if (x.size() != 1) return kNegInf;
  return log_density(spec, x[0]);
}

double draw(const DistSpec& spec, RandomStream& rs) {
  return std::visit(
      overloaded{
          [](const Dirichlet&) -> double {
            throw std::invalid_argument("dirichlet draw is vector-valued");
          },
          [&rs](const Categorical& c) -> double { return static_cast<double>(c.draw(rs)); },
          [&rs](const auto& d) -> double { return d.draw(rs); },
      },
      spec);
}

std::vector<double> draw_vector(const DistSpec& spec, RandomStream& rs) {
  if (const auto* dirichlet = std::get_if<Dirichlet>(&spec)) return dirichlet->draw(rs);
  return {draw(spec, rs)};
}

}  // namespace grouplife
