#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "grouplife/aft.hpp"
#include "grouplife/latent.hpp"
#include "grouplife/mcmc.hpp"
#include "grouplife/random.hpp"

namespace grouplife {

/// Thrown when the posterior is non-finite at the current state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PriorConfig {
  double beta_sd = 10.0;  // beta0 and each beta_j ~ Normal(0, beta_sd^2)
  double log_sigma_mean = 0.0;
  double log_sigma_sd = 10.0;
  double atom_sd = 10.0;  // each d_k ~ Normal(0, atom_sd^2), truncated to increasing order
  NigHyperprior hyper;
  double dirichlet = 0.5;  // every entry of nu (discrete) or zeta (mixed)
};

struct ModelSpec {
  ErrorKind error = ErrorKind::lognormal;
  LatentKind latent = LatentKind::none;
  std::size_t K = 2;  // atoms (discrete) or components (mixed); ignored otherwise
  PriorConfig priors;
  bool use_likelihood = true;  // false samples the prior
  bool recenter = true;        // shift the latent mean into beta0 after each sweep

  /// Number of latent components carried in the state (1 for continuous).
  [[nodiscard]] std::size_t components() const;
};

struct ProposalScales {
  double beta0 = 0.1;
  std::vector<double> beta;
  double log_sigma = 0.1;
  std::vector<double> w;
  std::vector<double> atoms;
};

struct ChainConfig {
  int tau_max = 20000;
  int burn_in = 10000;
  int thin = 5;
  std::uint64_t seed = 1;
  int n_chains = 2;
  // Initial random-walk scales per block.
  double scale_beta0 = 0.1;
  double scale_beta = 0.1;
  double scale_log_sigma = 0.1;
  double scale_w = 0.3;
  double scale_atom = 0.1;
  int adapt_until = -1;          // < 0 means burn_in / 2
  int adapt_window = 50;
  double adapt_gain = 0.5;
  double target_acceptance = 0.3;
  int threads = 1;  // workers for the per-group latent block

  void validate() const;
  [[nodiscard]] int resolved_adapt_until() const;
  [[nodiscard]] std::size_t retained_per_chain() const;
};

/// Parameters of the latent law in a shape shared by all structures:
///   discrete:   weights = p, locations = d, scales empty
///   continuous: weights = {1}, locations = {mu_w}, scales = {sigma_w}
///   mixed:      weights = q, locations = mu_k, scales = sigma_k
struct LatentLaw {
  std::vector<double> weights;
  std::vector<double> locations;
  std::vector<double> scales;

  friend bool operator==(const LatentLaw&, const LatentLaw&) = default;
};

struct ChainState {
  RegressionParams theta;
  LatentState latent;
  LatentLaw law;
};

inline bool operator==(const RegressionParams& a, const RegressionParams& b) {
  return a.beta0 == b.beta0 && a.beta == b.beta && a.sigma == b.sigma;
}
inline bool operator==(const ChainState& a, const ChainState& b) {
  return a.theta == b.theta && a.latent == b.latent && a.law == b.law;
}

struct Sample {
  ChainState state;
  double log_likelihood = 0.0;
};

struct BlockRate {
  std::string block;
  double rate = 0.0;
};

struct Trace {
  ModelSpec model;
  std::size_t chain = 0;
  std::size_t group_count = 0;
  std::size_t covariate_count = 0;
  std::vector<Sample> samples;
  std::vector<double> sweep_log_likelihood;  // every sweep, burn-in included
  std::vector<BlockRate> acceptance;         // post-adaptation rates

  /// Flattened column names; see `row` for the matching values.
  [[nodiscard]] std::vector<std::string> column_names() const;
  [[nodiscard]] std::vector<double> row(const Sample& sample) const;
};

/// Accepted/proposed counters per MH block.
struct BlockTally {
  std::size_t beta0_accepted = 0;
  std::vector<std::size_t> beta_accepted;
  std::size_t log_sigma_accepted = 0;
  std::vector<std::size_t> w_accepted;
  std::vector<std::size_t> atom_accepted;
  std::size_t sweeps = 0;

  static BlockTally zero(std::size_t p, std::size_t n, std::size_t atoms);
  void add(const BlockTally& other);
};

/// Multiply each scale by exp(gain * (observed rate - target)).
ProposalScales adapt_scales(const BlockTally& window, const ProposalScales& scales,
                            double target_acceptance, double gain = 0.5);

/// Gibbs/MH engine for one dataset and model. Holds a flattened copy of the
/// data and is immutable after construction, so one instance can serve
/// several chains.
class GibbsSampler {
 public:
  GibbsSampler(const GroupedDataset& data, ModelSpec model);

  [[nodiscard]] const ModelSpec& model() const { return model_; }
  [[nodiscard]] std::size_t group_count() const { return group_start_.size() - 1; }
  [[nodiscard]] std::size_t covariate_count() const { return p_; }

  /// Starting state: prior medians for the regression block, W_i = 0, weights
  /// from their Dirichlet prior, latent locations spread over the data.
  [[nodiscard]] ChainState initial_state(RandomStream rs) const;
  [[nodiscard]] ProposalScales initial_scales(const ChainConfig& config) const;

  /// One sweep: latent block, latent-law hyperparameters, regression block
  /// (plus atoms for the discrete structure), then optional re-centering.
  void sweep(ChainState& state, const RandomStream& sweep_stream, const ProposalScales& scales,
             BlockTally& tally, int threads = 1) const;

  [[nodiscard]] double log_likelihood(const ChainState& state) const;
  [[nodiscard]] double log_prior_regression(const RegressionParams& theta) const;

  /// Replace the event times (and censoring flags) while keeping covariates and
  /// grouping; used by joint-distribution tests that alternate simulation and updates.
  void replace_outcomes(std::span<const double> times, std::span<const std::uint8_t> events);
  [[nodiscard]] std::span<const double> covariate_row(std::size_t obs) const;
  [[nodiscard]] std::size_t group_of(std::size_t obs) const { return group_of_[obs]; }
  [[nodiscard]] std::size_t observation_count() const { return log_time_.size(); }

 private:
  double group_loglik(std::size_t group, std::span<const double> fixed_lp, double w,
                      double sigma) const;
  double total_loglik(std::span<const double> lp, double sigma) const;
  void latent_block(ChainState& state, const RandomStream& rs, const ProposalScales& scales,
                    BlockTally& tally, int threads) const;
  void hyper_block(ChainState& state, const RandomStream& rs) const;
  void regression_block(ChainState& state, const RandomStream& rs, const ProposalScales& scales,
                        BlockTally& tally) const;
  void recenter(ChainState& state) const;

  ModelSpec model_;
  std::size_t p_ = 0;
  std::vector<double> log_time_;
  std::vector<std::uint8_t> event_;
  std::vector<double> covariates_;  // row-major, observation x p
  std::vector<std::size_t> group_of_;
  std::vector<std::size_t> group_start_;  // n + 1 offsets
  std::vector<double> group_mean_log_time_;
};

/// Convenience wrapper around GibbsSampler::sweep.
ChainState gibbs_sweep(ChainState state, const GroupedDataset& data, const ModelSpec& model,
                       const ProposalScales& scales, const RandomStream& sweep_stream);

/// Run one chain; chain `index` draws from substream (seed, index).
Trace run_chain(const ChainConfig& config, const GroupedDataset& data, const ModelSpec& model,
                std::size_t index = 0);

/// Run config.n_chains chains, in parallel when config.threads > 1.
std::vector<Trace> run_chains(const ChainConfig& config, const GroupedDataset& data,
                              const ModelSpec& model);

/// Pool the retained samples of several chains into one trace.
Trace merge_traces(const std::vector<Trace>& traces);

}  // namespace grouplife
