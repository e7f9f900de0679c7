#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace grouplife {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is addressed by a root seed plus a path of child indices, e.g.
/// root -> chain -> sweep -> block -> group. The key is derived from the
/// path, so two streams with the same address always produce the same
/// sequence regardless of what any other stream has done. Copying a stream
/// copies its position.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t root_seed);
  RandomStream(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path);

  /// Independent substream at `index` below this one, starting at position 0.
  [[nodiscard]] RandomStream child(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double standard_normal();

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t position() const { return counter_; }

 private:
  RandomStream(std::uint64_t key, std::uint64_t counter, int /*tag*/)
      : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Distribution kernels. Constructors validate parameters and throw
// std::invalid_argument on violation.

struct Normal {
  double mean;
  double sd;
  Normal(double mean, double sd);
  [[nodiscard]] double log_density(double x) const;
  [[nodiscard]] double cdf(double x) const;
  double draw(RandomStream& rs) const;
};

/// Minimum extreme value law: F(x) = 1 - exp(-exp((x - location) / scale)).
/// If eta is standard gumbel-min, exp(lp + sigma * eta) is Weibull with
/// rate exp(-lp / sigma) and shape 1 / sigma.
struct GumbelMin {
  double location;
  double scale;
  GumbelMin(double location, double scale);
  [[nodiscard]] double log_density(double x) const;
  [[nodiscard]] double cdf(double x) const;
  double draw(RandomStream& rs) const;
};

struct LogNormal {
  double log_mean;
  double log_sd;
  LogNormal(double log_mean, double log_sd);
  [[nodiscard]] double log_density(double t) const;
  [[nodiscard]] double cdf(double t) const;
  double draw(RandomStream& rs) const;
};

/// f(t) = shape * rate * t^(shape - 1) * exp(-rate * t^shape).
struct Weibull {
  double rate;
  double shape;
  Weibull(double rate, double shape);
  [[nodiscard]] double log_density(double t) const;
  [[nodiscard]] double cdf(double t) const;
  double draw(RandomStream& rs) const;
};

struct Gamma {
  double shape;
  double rate;
  Gamma(double shape, double rate);
  [[nodiscard]] double log_density(double x) const;
  double draw(RandomStream& rs) const;
};

struct Beta {
  double a;
  double b;
  Beta(double a, double b);
  [[nodiscard]] double log_density(double x) const;
  double draw(RandomStream& rs) const;
};

struct Dirichlet {
  std::vector<double> concentration;
  explicit Dirichlet(std::vector<double> concentration);
  [[nodiscard]] double log_density(std::span<const double> x) const;
  std::vector<double> draw(RandomStream& rs) const;
};

/// Categorical over indices 0..K-1.
struct Categorical {
  std::vector<double> probabilities;
  explicit Categorical(std::vector<double> probabilities);
  [[nodiscard]] double log_mass(std::size_t k) const;
  /// Inverse CDF on the cumulative probabilities; ties go to the lower index.
  std::size_t draw(RandomStream& rs) const;
};

using DistSpec =
    std::variant<Normal, GumbelMin, LogNormal, Weibull, Gamma, Beta, Dirichlet, Categorical>;

/// Log density (or log mass) at a scalar point. Out-of-support points give -inf.
/// For Categorical, x is the index; for Dirichlet use the span overload.
double log_density(const DistSpec& spec, double x);
double log_density(const DistSpec& spec, std::span<const double> x);

/// Scalar draw; Categorical returns the index as a double. Throws for Dirichlet.
double draw(const DistSpec& spec, RandomStream& rs);
/// Vector draw for Dirichlet; other families return a one-element vector.
std::vector<double> draw_vector(const DistSpec& spec, RandomStream& rs);

// Shared numeric helpers.

double standard_normal_cdf(double z);
/// log(1 - Phi(z)), accurate far into the upper tail.
double log_standard_normal_survival(double z);
double log_sum_exp(std::span<const double> values);
/// Normalized probabilities proportional to exp(log_weights).
std::vector<double> softmax(std::span<const double> log_weights);

}  // namespace grouplife
