#include "grouplife/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace grouplife {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Substream indices below a sweep stream.
enum Block : std::uint64_t {
  kMembershipBlock = 0,
  kLatentBlock = 1,
  kWeightBlock = 2,
  kPhiBlock = 3,
  kRegressionBlock = 4,
  kAtomBlock = 5,
};

constexpr int kOrderingAttempts = 1000;

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double normal_log_kernel(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z;
}

bool strictly_increasing(std::span<const double> v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

double rate(std::size_t accepted, std::size_t sweeps) {
  return sweeps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(sweeps);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::size_t ModelSpec::components() const {
  switch (latent) {
    case LatentKind::none: return 0;
    case LatentKind::continuous: return 1;
    default: return K;
  }
}

void ChainConfig::validate() const {
  if (tau_max < 1) throw std::invalid_argument("tau_max must be positive");
  if (burn_in < 0 || burn_in >= tau_max) throw std::invalid_argument("burn_in must be in [0, tau_max)");
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (n_chains < 1) throw std::invalid_argument("n_chains must be at least 1");
  if (adapt_until > burn_in) throw std::invalid_argument("adapt_until must not exceed burn_in");
  if (adapt_window < 1) throw std::invalid_argument("adapt_window must be positive");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw std::invalid_argument("target_acceptance must be in (0, 1)");
  }
  for (double s : {scale_beta0, scale_beta, scale_log_sigma, scale_w, scale_atom}) {
    if (!(s > 0.0)) throw std::invalid_argument("proposal scales must be positive");
  }
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

int ChainConfig::resolved_adapt_until() const { return adapt_until < 0 ? burn_in / 2 : adapt_until; }

std::size_t ChainConfig::retained_per_chain() const {
  return static_cast<std::size_t>((tau_max - burn_in) / thin);
}

BlockTally BlockTally::zero(std::size_t p, std::size_t n, std::size_t atoms) {
  BlockTally tally;
  tally.beta_accepted.assign(p, 0);
  tally.w_accepted.assign(n, 0);
  tally.atom_accepted.assign(atoms, 0);
  return tally;
}

void BlockTally::add(const BlockTally& other) {
  beta0_accepted += other.beta0_accepted;
  log_sigma_accepted += other.log_sigma_accepted;
  sweeps += other.sweeps;
  for (std::size_t j = 0; j < beta_accepted.size(); ++j) beta_accepted[j] += other.beta_accepted[j];
  for (std::size_t i = 0; i < w_accepted.size(); ++i) w_accepted[i] += other.w_accepted[i];
  for (std::size_t k = 0; k < atom_accepted.size(); ++k) atom_accepted[k] += other.atom_accepted[k];
}

ProposalScales adapt_scales(const BlockTally& window, const ProposalScales& scales,
                            double target_acceptance, double gain) {
  ProposalScales next = scales;
  const auto n = window.sweeps;
  next.beta0 = adapt_scale(scales.beta0, rate(window.beta0_accepted, n), target_acceptance, gain);
  for (std::size_t j = 0; j < next.beta.size(); ++j) {
    next.beta[j] = adapt_scale(scales.beta[j], rate(window.beta_accepted[j], n), target_acceptance, gain);
  }
  next.log_sigma =
      adapt_scale(scales.log_sigma, rate(window.log_sigma_accepted, n), target_acceptance, gain);
  for (std::size_t i = 0; i < next.w.size(); ++i) {
    next.w[i] = adapt_scale(scales.w[i], rate(window.w_accepted[i], n), target_acceptance, gain);
  }
  for (std::size_t k = 0; k < next.atoms.size(); ++k) {
    next.atoms[k] = adapt_scale(scales.atoms[k], rate(window.atom_accepted[k], n), target_acceptance, gain);
  }
  return next;
}

// ---------------------------------------------------------------------------
// Trace layout

std::vector<std::string> Trace::column_names() const {
  std::vector<std::string> names{"beta0"};
  for (std::size_t j = 0; j < covariate_count; ++j) names.push_back("beta[" + std::to_string(j + 1) + "]");
  names.emplace_back("sigma");
  const std::size_t K = model.components();
  auto indexed = [&](const char* prefix, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      names.push_back(std::string(prefix) + "[" + std::to_string(k + 1) + "]");
    }
  };
  switch (model.latent) {
    case LatentKind::none: break;
    case LatentKind::discrete:
      indexed("p", K);
      indexed("d", K);
      break;
    case LatentKind::continuous:
      names.emplace_back("mu_w");
      names.emplace_back("sigma_w");
      break;
    case LatentKind::mixed:
      indexed("q", K);
      indexed("mu", K);
      indexed("sd", K);
      break;
  }
  if (model.latent != LatentKind::none) indexed("w", group_count);
  if (model.latent == LatentKind::discrete || model.latent == LatentKind::mixed) indexed("xi", group_count);
  names.emplace_back("loglik");
  return names;
}

std::vector<double> Trace::row(const Sample& sample) const {
  const auto& s = sample.state;
  std::vector<double> values{s.theta.beta0};
  values.insert(values.end(), s.theta.beta.begin(), s.theta.beta.end());
  values.push_back(s.theta.sigma);
  switch (model.latent) {
    case LatentKind::none: break;
    case LatentKind::discrete:
      values.insert(values.end(), s.law.weights.begin(), s.law.weights.end());
      values.insert(values.end(), s.law.locations.begin(), s.law.locations.end());
      break;
    case LatentKind::continuous:
      values.push_back(s.law.locations.at(0));
      values.push_back(s.law.scales.at(0));
      break;
    case LatentKind::mixed:
      values.insert(values.end(), s.law.weights.begin(), s.law.weights.end());
      values.insert(values.end(), s.law.locations.begin(), s.law.locations.end());
      values.insert(values.end(), s.law.scales.begin(), s.law.scales.end());
      break;
  }
  if (model.latent != LatentKind::none) values.insert(values.end(), s.latent.w.begin(), s.latent.w.end());
  if (model.latent == LatentKind::discrete || model.latent == LatentKind::mixed) {
    for (int xi : s.latent.xi) values.push_back(static_cast<double>(xi + 1));
  }
  values.push_back(sample.log_likelihood);
  return values;
}

// ---------------------------------------------------------------------------
// GibbsSampler

GibbsSampler::GibbsSampler(const GroupedDataset& data, ModelSpec model)
    : model_(std::move(model)), p_(data.covariate_count()) {
  if (data.group_count() == 0) throw std::invalid_argument("sampler: empty dataset");
  if ((model_.latent == LatentKind::discrete || model_.latent == LatentKind::mixed) && model_.K < 1) {
    throw std::invalid_argument("sampler: K must be at least 1");
  }
  model_.priors.hyper.validate();
  group_start_.push_back(0);
  for (std::size_t i = 0; i < data.group_count(); ++i) {
    double sum_log_time = 0.0;
    for (const auto& obs : data.groups()[i].observations) {
      log_time_.push_back(std::log(obs.time));
      event_.push_back(obs.event ? 1 : 0);
      covariates_.insert(covariates_.end(), obs.covariates.begin(), obs.covariates.end());
      group_of_.push_back(i);
      sum_log_time += log_time_.back();
    }
    group_start_.push_back(log_time_.size());
    group_mean_log_time_.push_back(sum_log_time /
                                   static_cast<double>(data.groups()[i].observations.size()));
  }
}

std::span<const double> GibbsSampler::covariate_row(std::size_t obs) const {
  return std::span<const double>(covariates_).subspan(obs * p_, p_);
}

void GibbsSampler::replace_outcomes(std::span<const double> times,
                                    std::span<const std::uint8_t> events) {
  if (times.size() != log_time_.size() || events.size() != event_.size()) {
    throw std::invalid_argument("replace_outcomes: length mismatch");
  }
  for (std::size_t o = 0; o < times.size(); ++o) {
    log_time_[o] = std::log(times[o]);
    event_[o] = events[o];
  }
}

ProposalScales GibbsSampler::initial_scales(const ChainConfig& config) const {
  ProposalScales scales;
  scales.beta0 = config.scale_beta0;
  scales.beta.assign(p_, config.scale_beta);
  scales.log_sigma = config.scale_log_sigma;
  scales.w.assign(group_count(), config.scale_w);
  scales.atoms.assign(model_.latent == LatentKind::discrete ? model_.K : 0, config.scale_atom);
  return scales;
}

ChainState GibbsSampler::initial_state(RandomStream rs) const {
  const std::size_t n = group_count();
  const auto& priors = model_.priors;
  ChainState state;
  state.theta.beta0 = 0.0;
  state.theta.beta.assign(p_, 0.0);
  state.theta.sigma = std::exp(priors.log_sigma_mean);
  state.latent.w.assign(n, 0.0);

  // Latent locations start at evenly spaced quantiles of the centered group
  // mean log-times, nudged apart to respect the ordering.
  auto spread = [&](std::size_t K) {
    std::vector<double> centered = group_mean_log_time_;
    const double mean = std::accumulate(centered.begin(), centered.end(), 0.0) /
                        static_cast<double>(centered.size());
    for (double& v : centered) v -= mean;
    std::sort(centered.begin(), centered.end());
    std::vector<double> locations(K, 0.0);
    if (K == 1) return locations;
    for (std::size_t k = 0; k < K; ++k) {
      const double h = (static_cast<double>(k) + 0.5) / static_cast<double>(K) *
                       static_cast<double>(centered.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const auto hi = std::min(lo + 1, centered.size() - 1);
      locations[k] = centered[lo] + (h - static_cast<double>(lo)) * (centered[hi] - centered[lo]);
      if (k > 0 && locations[k] < locations[k - 1] + 0.1) locations[k] = locations[k - 1] + 0.1;
    }
    return locations;
  };
  auto nearest_to_zero = [](std::span<const double> locations) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < locations.size(); ++k) {
      if (std::abs(locations[k]) < std::abs(locations[best])) best = k;
    }
    return static_cast<int>(best);
  };
  const double initial_sd = std::sqrt(priors.hyper.b0 / (priors.hyper.a0 + 1.0));

  switch (model_.latent) {
    case LatentKind::none: break;
    case LatentKind::discrete: {
      auto weights_rs = rs.child(0);
      state.law.weights = Dirichlet(std::vector<double>(model_.K, priors.dirichlet)).draw(weights_rs);
      state.law.locations = spread(model_.K);
      const int start = nearest_to_zero(state.law.locations);
      state.latent.xi.assign(n, start);
      state.latent.w.assign(n, state.law.locations[static_cast<std::size_t>(start)]);
      break;
    }
    case LatentKind::continuous:
      state.law.weights = {1.0};
      state.law.locations = {priors.hyper.m0};
      state.law.scales = {initial_sd};
      break;
    case LatentKind::mixed: {
      auto weights_rs = rs.child(0);
      state.law.weights = Dirichlet(std::vector<double>(model_.K, priors.dirichlet)).draw(weights_rs);
      state.law.locations = model_.K == 1 ? std::vector<double>{priors.hyper.m0} : spread(model_.K);
      state.law.scales.assign(model_.K, initial_sd);
      state.latent.xi.assign(n, nearest_to_zero(state.law.locations));
      break;
    }
  }
  return state;
}

double GibbsSampler::group_loglik(std::size_t group, std::span<const double> fixed_lp, double w,
                                  double sigma) const {
  if (!model_.use_likelihood) return 0.0;
  double total = 0.0;
  for (std::size_t o = group_start_[group]; o < group_start_[group + 1]; ++o) {
    total += log_likelihood_term(model_.error, fixed_lp[o] + w, sigma, log_time_[o], event_[o] != 0);
  }
  return total;
}

double GibbsSampler::total_loglik(std::span<const double> lp, double sigma) const {
  if (!model_.use_likelihood) return 0.0;
  double total = 0.0;
  for (std::size_t o = 0; o < lp.size(); ++o) {
    total += log_likelihood_term(model_.error, lp[o], sigma, log_time_[o], event_[o] != 0);
  }
  return total;
}

double GibbsSampler::log_likelihood(const ChainState& state) const {
  double total = 0.0;
  for (std::size_t o = 0; o < log_time_.size(); ++o) {
    const double lp = linear_predictor(state.theta, covariate_row(o), state.latent.w[group_of_[o]]);
    total += log_likelihood_term(model_.error, lp, state.theta.sigma, log_time_[o], event_[o] != 0);
  }
  return total;
}

double GibbsSampler::log_prior_regression(const RegressionParams& theta) const {
  const auto& priors = model_.priors;
  double total = normal_log_kernel(theta.beta0, 0.0, priors.beta_sd);
  for (double b : theta.beta) total += normal_log_kernel(b, 0.0, priors.beta_sd);
  total += normal_log_kernel(std::log(theta.sigma), priors.log_sigma_mean, priors.log_sigma_sd);
  return total;
}

void GibbsSampler::latent_block(ChainState& state, const RandomStream& rs,
                                const ProposalScales& scales, BlockTally& tally,
                                int threads) const {
  const std::size_t n = group_count();
  std::vector<double> fixed_lp(log_time_.size());
  for (std::size_t o = 0; o < fixed_lp.size(); ++o) {
    fixed_lp[o] = linear_predictor(state.theta, covariate_row(o), 0.0);
  }
  const double sigma = state.theta.sigma;
  auto& w = state.latent.w;
  auto& xi = state.latent.xi;
  const auto& law = state.law;

  switch (model_.latent) {
    case LatentKind::none: return;

    case LatentKind::discrete: {
      const RandomStream block = rs.child(kLatentBlock);
      parallel_for(n, threads, [&](std::size_t i) {
        std::vector<double> loglik(model_.K);
        for (std::size_t k = 0; k < model_.K; ++k) {
          loglik[k] = group_loglik(i, fixed_lp, law.locations[k], sigma);
        }
        RandomStream group_rs = block.child(i);
        const std::size_t k = sample_w_discrete(loglik, law.weights, group_rs);
        xi[i] = static_cast<int>(k);
        w[i] = law.locations[k];
      });
      return;
    }

    case LatentKind::continuous:
    case LatentKind::mixed: {
      std::vector<NormalLaw> components(law.locations.size());
      for (std::size_t k = 0; k < components.size(); ++k) {
        components[k] = {law.locations[k], law.scales[k]};
      }
      if (model_.latent == LatentKind::mixed) {
        const RandomStream block = rs.child(kMembershipBlock);
        parallel_for(n, threads, [&](std::size_t i) {
          RandomStream group_rs = block.child(i);
          xi[i] = static_cast<int>(sample_membership(w[i], law.weights, components, group_rs));
        });
      }
      const RandomStream block = rs.child(kLatentBlock);
      std::vector<std::uint8_t> accepted(n, 0);
      parallel_for(n, threads, [&](std::size_t i) {
        const NormalLaw prior =
            components[model_.latent == LatentKind::mixed ? static_cast<std::size_t>(xi[i]) : 0];
        auto log_target = [&](double value) {
          return group_loglik(i, fixed_lp, value, sigma) + normal_log_kernel(value, prior.mean, prior.sd);
        };
        const double current = log_target(w[i]);
        if (!std::isfinite(current)) {
          std::ostringstream msg;
          msg << "non-finite latent posterior for group " << i + 1 << " at w=" << w[i]
              << " (sigma=" << sigma << ")";
          throw NumericalError(msg.str());
        }
        RandomStream group_rs = block.child(i);
        const MhStep step = mh_update_scalar(w[i], current, log_target, scales.w[i], group_rs);
        w[i] = step.value;
        accepted[i] = step.accepted ? 1 : 0;
      });
      for (std::size_t i = 0; i < n; ++i) tally.w_accepted[i] += accepted[i];
      return;
    }
  }
}

void GibbsSampler::hyper_block(ChainState& state, const RandomStream& rs) const {
  const std::size_t n = group_count();
  const auto& priors = model_.priors;
  auto& law = state.law;
  const auto& xi = state.latent.xi;
  const auto& w = state.latent.w;

  if (model_.latent == LatentKind::discrete || model_.latent == LatentKind::mixed) {
    std::vector<std::size_t> counts(model_.K, 0);
    for (int k : xi) ++counts[static_cast<std::size_t>(k)];
    RandomStream weights_rs = rs.child(kWeightBlock);
    law.weights = update_p(counts, std::vector<double>(model_.K, priors.dirichlet), weights_rs);
  }
  if (model_.latent == LatentKind::continuous || model_.latent == LatentKind::mixed) {
    const std::size_t K = law.locations.size();
    std::vector<std::vector<double>> members(K);
    for (std::size_t i = 0; i < n; ++i) {
      members[model_.latent == LatentKind::mixed ? static_cast<std::size_t>(xi[i]) : 0].push_back(w[i]);
    }
    // Component laws are independent given the memberships; the ordering
    // constraint on the means is imposed by redrawing the whole set.
    const RandomStream phi_block = rs.child(kPhiBlock);
    for (int attempt = 0; attempt < kOrderingAttempts; ++attempt) {
      const RandomStream attempt_rs = phi_block.child(static_cast<std::uint64_t>(attempt));
      std::vector<NormalLaw> draws(K);
      std::vector<double> means(K);
      for (std::size_t k = 0; k < K; ++k) {
        RandomStream component_rs = attempt_rs.child(k);
        draws[k] = update_phi(members[k], priors.hyper, component_rs);
        means[k] = draws[k].mean;
      }
      if (strictly_increasing(means)) {
        for (std::size_t k = 0; k < K; ++k) {
          law.locations[k] = draws[k].mean;
          law.scales[k] = draws[k].sd;
        }
        return;
      }
    }
    // Keep the previous component laws when no ordered draw was found.
  }
}

void GibbsSampler::regression_block(ChainState& state, const RandomStream& rs,
                                    const ProposalScales& scales, BlockTally& tally) const {
  const auto& priors = model_.priors;
  auto& theta = state.theta;
  const std::size_t count = log_time_.size();

  std::vector<double> lp(count);
  for (std::size_t o = 0; o < count; ++o) {
    lp[o] = linear_predictor(theta, covariate_row(o), state.latent.w[group_of_[o]]);
  }
  double current_ll = total_loglik(lp, theta.sigma);
  if (!std::isfinite(current_ll)) {
    std::ostringstream msg;
    msg << "non-finite log-likelihood at beta0=" << theta.beta0 << ", sigma=" << theta.sigma;
    throw NumericalError(msg.str());
  }
  const RandomStream block = rs.child(kRegressionBlock);
  std::vector<double> trial(count);

  // beta0
  {
    double proposed_ll = kNegInf;
    auto log_target = [&](double b) {
      const double shift = b - theta.beta0;
      for (std::size_t o = 0; o < count; ++o) trial[o] = lp[o] + shift;
      proposed_ll = total_loglik(trial, theta.sigma);
      return proposed_ll + normal_log_kernel(b, 0.0, priors.beta_sd);
    };
    RandomStream param_rs = block.child(0);
    const double current = current_ll + normal_log_kernel(theta.beta0, 0.0, priors.beta_sd);
    const MhStep step = mh_update_scalar(theta.beta0, current, log_target, scales.beta0, param_rs);
    if (step.accepted) {
      const double shift = step.value - theta.beta0;
      for (double& v : lp) v += shift;
      theta.beta0 = step.value;
      current_ll = proposed_ll;
      ++tally.beta0_accepted;
    }
  }

  // Each beta_j
  for (std::size_t j = 0; j < p_; ++j) {
    double proposed_ll = kNegInf;
    auto log_target = [&](double b) {
      const double shift = b - theta.beta[j];
      for (std::size_t o = 0; o < count; ++o) trial[o] = lp[o] + shift * covariates_[o * p_ + j];
      proposed_ll = total_loglik(trial, theta.sigma);
      return proposed_ll + normal_log_kernel(b, 0.0, priors.beta_sd);
    };
    RandomStream param_rs = block.child(1 + j);
    const double current = current_ll + normal_log_kernel(theta.beta[j], 0.0, priors.beta_sd);
    const MhStep step = mh_update_scalar(theta.beta[j], current, log_target, scales.beta[j], param_rs);
    if (step.accepted) {
      const double shift = step.value - theta.beta[j];
      for (std::size_t o = 0; o < count; ++o) lp[o] += shift * covariates_[o * p_ + j];
      theta.beta[j] = step.value;
      current_ll = proposed_ll;
      ++tally.beta_accepted[j];
    }
  }

  // log sigma
  {
    double proposed_ll = kNegInf;
    auto log_target = [&](double log_sigma) {
      proposed_ll = total_loglik(lp, std::exp(log_sigma));
      return proposed_ll + normal_log_kernel(log_sigma, priors.log_sigma_mean, priors.log_sigma_sd);
    };
    RandomStream param_rs = block.child(1 + p_);
    const double log_sigma = std::log(theta.sigma);
    const double current = current_ll + normal_log_kernel(log_sigma, priors.log_sigma_mean, priors.log_sigma_sd);
    const MhStep step = mh_update_scalar(log_sigma, current, log_target, scales.log_sigma, param_rs);
    if (step.accepted) {
      theta.sigma = std::exp(step.value);
      current_ll = proposed_ll;
      ++tally.log_sigma_accepted;
    }
  }

  // Discrete atoms: each d_k sees only the groups currently assigned to it.
  if (model_.latent == LatentKind::discrete) {
    auto& d = state.law.locations;
    const std::size_t n = group_count();
    std::vector<double> fixed_lp(count);
    for (std::size_t o = 0; o < count; ++o) fixed_lp[o] = lp[o] - state.latent.w[group_of_[o]];
    const RandomStream atoms = rs.child(kAtomBlock);
    for (std::size_t k = 0; k < model_.K; ++k) {
      const double lower = k > 0 ? d[k - 1] : kNegInf;
      const double upper = k + 1 < model_.K ? d[k + 1] : std::numeric_limits<double>::infinity();
      auto log_target = [&](double value) {
        if (!(value > lower && value < upper)) return kNegInf;
        double total = normal_log_kernel(value, 0.0, priors.atom_sd);
        for (std::size_t i = 0; i < n; ++i) {
          if (state.latent.xi[i] == static_cast<int>(k)) total += group_loglik(i, fixed_lp, value, theta.sigma);
        }
        return total;
      };
      RandomStream atom_rs = atoms.child(k);
      const MhStep step = mh_update_scalar(d[k], log_target, scales.atoms[k], atom_rs);
      if (step.accepted) {
        d[k] = step.value;
        ++tally.atom_accepted[k];
      }
    }
    for (std::size_t i = 0; i < n; ++i) state.latent.w[i] = d[static_cast<std::size_t>(state.latent.xi[i])];
  }
}

void GibbsSampler::recenter(ChainState& state) const {
  if (!model_.recenter || model_.latent == LatentKind::none) return;
  auto& law = state.law;
  double offset = 0.0;
  for (std::size_t k = 0; k < law.locations.size(); ++k) offset += law.weights[k] * law.locations[k];
  for (double& v : law.locations) v -= offset;
  for (double& v : state.latent.w) v -= offset;
  state.theta.beta0 += offset;
}

void GibbsSampler::sweep(ChainState& state, const RandomStream& sweep_stream,
                         const ProposalScales& scales, BlockTally& tally, int threads) const {
  latent_block(state, sweep_stream, scales, tally, threads);
  hyper_block(state, sweep_stream);
  regression_block(state, sweep_stream, scales, tally);
  recenter(state);
  ++tally.sweeps;
}

ChainState gibbs_sweep(ChainState state, const GroupedDataset& data, const ModelSpec& model,
                       const ProposalScales& scales, const RandomStream& sweep_stream) {
  const GibbsSampler sampler(data, model);
  auto tally = BlockTally::zero(data.covariate_count(), data.group_count(), scales.atoms.size());
  sampler.sweep(state, sweep_stream, scales, tally);
  return state;
}

// ---------------------------------------------------------------------------
// Chains

namespace {

std::vector<BlockRate> summarize_rates(const BlockTally& tally, const ModelSpec& model) {
  std::vector<BlockRate> rates;
  rates.push_back({"beta0", rate(tally.beta0_accepted, tally.sweeps)});
  for (std::size_t j = 0; j < tally.beta_accepted.size(); ++j) {
    rates.push_back({"beta[" + std::to_string(j + 1) + "]", rate(tally.beta_accepted[j], tally.sweeps)});
  }
  rates.push_back({"log_sigma", rate(tally.log_sigma_accepted, tally.sweeps)});
  if (model.latent == LatentKind::continuous || model.latent == LatentKind::mixed) {
    const std::size_t accepted =
        std::accumulate(tally.w_accepted.begin(), tally.w_accepted.end(), std::size_t{0});
    rates.push_back({"w", rate(accepted, tally.sweeps * tally.w_accepted.size())});
  }
  for (std::size_t k = 0; k < tally.atom_accepted.size(); ++k) {
    rates.push_back({"d[" + std::to_string(k + 1) + "]", rate(tally.atom_accepted[k], tally.sweeps)});
  }
  return rates;
}

}  // namespace

Trace run_chain(const ChainConfig& config, const GroupedDataset& data, const ModelSpec& model,
                std::size_t index) {
  config.validate();
  const GibbsSampler sampler(data, model);
  const std::size_t n = data.group_count();
  const std::size_t p = data.covariate_count();
  const std::size_t atoms = model.latent == LatentKind::discrete ? model.K : 0;

  Trace trace;
  trace.model = model;
  trace.chain = index;
  trace.group_count = n;
  trace.covariate_count = p;
  trace.samples.reserve(config.retained_per_chain());
  trace.sweep_log_likelihood.reserve(static_cast<std::size_t>(config.tau_max));

  const RandomStream chain_rs = RandomStream(config.seed).child(index);
  ChainState state = sampler.initial_state(chain_rs.child(0));
  ProposalScales scales = sampler.initial_scales(config);
  const RandomStream sweeps = chain_rs.child(1);
  const int adapt_until = config.resolved_adapt_until();

  auto window = BlockTally::zero(p, n, atoms);
  auto frozen = BlockTally::zero(p, n, atoms);
  for (int tau = 1; tau <= config.tau_max; ++tau) {
    BlockTally& tally = tau <= adapt_until ? window : frozen;
    try {
      sampler.sweep(state, sweeps.child(static_cast<std::uint64_t>(tau)), scales, tally, config.threads);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "chain " << index + 1 << ", sweep " << tau << ": " << e.what() << " ("
          << trace.samples.size() << " samples retained before failure)";
      throw NumericalError(msg.str());
    }
    const double loglik = sampler.log_likelihood(state);
    trace.sweep_log_likelihood.push_back(loglik);
    if (tau <= adapt_until && tau % config.adapt_window == 0) {
      scales = adapt_scales(window, scales, config.target_acceptance, config.adapt_gain);
      window = BlockTally::zero(p, n, atoms);
    }
    if (tau > config.burn_in && (tau - config.burn_in) % config.thin == 0) {
      trace.samples.push_back({state, loglik});
    }
  }
  trace.acceptance = summarize_rates(frozen.sweeps > 0 ? frozen : window, model);
  return trace;
}

std::vector<Trace> run_chains(const ChainConfig& config, const GroupedDataset& data,
                              const ModelSpec& model) {
  config.validate();
  const auto chains = static_cast<std::size_t>(config.n_chains);
  std::vector<Trace> traces(chains);
  // Chains run in parallel only when there are spare workers; within-chain
  // parallelism then stays serial so the two levels do not oversubscribe.
  if (config.threads > 1 && chains > 1) {
    ChainConfig serial = config;
    serial.threads = 1;
    parallel_for(chains, config.threads,
                 [&](std::size_t c) { traces[c] = run_chain(serial, data, model, c); });
  } else {
    for (std::size_t c = 0; c < chains; ++c) traces[c] = run_chain(config, data, model, c);
  }
  return traces;
}

Trace merge_traces(const std::vector<Trace>& traces) {
  if (traces.empty()) throw std::invalid_argument("merge_traces: no traces");
  Trace merged;
  merged.model = traces.front().model;
  merged.group_count = traces.front().group_count;
  merged.covariate_count = traces.front().covariate_count;
  merged.acceptance = traces.front().acceptance;
  for (auto& rate_entry : merged.acceptance) rate_entry.rate = 0.0;
  for (const auto& trace : traces) {
    if (trace.group_count != merged.group_count || trace.covariate_count != merged.covariate_count) {
      throw std::invalid_argument("merge_traces: traces have different shapes");
    }
    merged.samples.insert(merged.samples.end(), trace.samples.begin(), trace.samples.end());
    merged.sweep_log_likelihood.insert(merged.sweep_log_likelihood.end(),
                                       trace.sweep_log_likelihood.begin(),
                                       trace.sweep_log_likelihood.end());
    for (std::size_t b = 0; b < merged.acceptance.size() && b < trace.acceptance.size(); ++b) {
      merged.acceptance[b].rate += trace.acceptance[b].rate / static_cast<double>(traces.size());
    }
  }
  return merged;
}

}  // namespace grouplife
