#include "grouplife/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace grouplife {

namespace {

void require_samples(const Trace& trace, const char* what) {
  if (trace.samples.empty()) throw std::invalid_argument(std::string(what) + ": empty trace");
}

double deviance(const GroupedDataset& data, ErrorKind kind, const RegressionParams& theta,
                std::span<const double> w) {
  double loglik = 0.0;
  for (std::size_t i = 0; i < data.group_count(); ++i) {
    loglik += group_log_likelihood(theta, kind, data.groups()[i].observations, w.empty() ? 0.0 : w[i]);
  }
  return -2.0 * loglik;
}

}  // namespace

std::vector<double> posterior_mean_w(const Trace& trace) {
  require_samples(trace, "posterior_mean_w");
  std::vector<double> means(trace.group_count, 0.0);
  if (trace.model.latent == LatentKind::none) return means;
  for (const auto& sample : trace.samples) {
    for (std::size_t i = 0; i < means.size(); ++i) means[i] += sample.state.latent.w[i];
  }
  for (double& m : means) m /= static_cast<double>(trace.samples.size());
  return means;
}

DicResult dic(const Trace& trace, const GroupedDataset& data) {
  require_samples(trace, "dic");
  if (data.group_count() != trace.group_count) throw std::invalid_argument("dic: dataset does not match trace");
  const auto kind = trace.model.error;
  const auto count = static_cast<double>(trace.samples.size());

  double mean_deviance = 0.0;
  RegressionParams mean_theta{0.0, std::vector<double>(trace.covariate_count, 0.0), 0.0};
  for (const auto& sample : trace.samples) {
    const auto& s = sample.state;
    mean_deviance += deviance(data, kind, s.theta, s.latent.w) / count;
    mean_theta.beta0 += s.theta.beta0 / count;
    for (std::size_t j = 0; j < mean_theta.beta.size(); ++j) mean_theta.beta[j] += s.theta.beta[j] / count;
    mean_theta.sigma += s.theta.sigma / count;
  }

  std::vector<double> w_hat;
  if (trace.model.latent == LatentKind::discrete) {
    const std::size_t K = trace.model.K;
    std::vector<double> atom_means(K, 0.0);
    for (const auto& sample : trace.samples) {
      for (std::size_t k = 0; k < K; ++k) atom_means[k] += sample.state.law.locations[k] / count;
    }
    w_hat.resize(trace.group_count);
    for (std::size_t i = 0; i < trace.group_count; ++i) {
      std::vector<std::size_t> visits(K, 0);
      for (const auto& sample : trace.samples) ++visits[static_cast<std::size_t>(sample.state.latent.xi[i])];
      const auto mode = static_cast<std::size_t>(
          std::distance(visits.begin(), std::max_element(visits.begin(), visits.end())));
      w_hat[i] = atom_means[mode];
    }
  } else if (trace.model.latent != LatentKind::none) {
    w_hat = posterior_mean_w(trace);
  }

  DicResult result;
  result.mean_deviance = mean_deviance;
  result.deviance_at_mean = deviance(data, kind, mean_theta, w_hat);
  if (!std::isfinite(result.deviance_at_mean)) {
    throw std::domain_error("dic: non-finite deviance at the posterior means");
  }
  result.p_d = result.mean_deviance - result.deviance_at_mean;
  result.dic = 2.0 * result.mean_deviance - result.deviance_at_mean;
  return result;
}

double posterior_mean_error(const Trace& trace, std::span<const double> true_w) {
  if (true_w.size() != trace.group_count) {
    throw std::invalid_argument("posterior_mean_error: true_w length does not match group count");
  }
  const auto means = posterior_mean_w(trace);
  double total = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) total += std::abs(means[i] - true_w[i]);
  return total / static_cast<double>(means.size());
}

double group_intercept_error(const Trace& trace, std::span<const double> true_w, double true_beta0) {
  if (true_w.size() != trace.group_count) {
    throw std::invalid_argument("group_intercept_error: true_w length does not match group count");
  }
  require_samples(trace, "group_intercept_error");
  std::vector<double> means(trace.group_count, 0.0);
  const auto count = static_cast<double>(trace.samples.size());
  for (const auto& sample : trace.samples) {
    for (std::size_t i = 0; i < means.size(); ++i) {
      const double w = trace.model.latent == LatentKind::none ? 0.0 : sample.state.latent.w[i];
      means[i] += (sample.state.theta.beta0 + w) / count;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) total += std::abs(means[i] - (true_beta0 + true_w[i]));
  return total / static_cast<double>(means.size());
}

double KaplanMeierCurve::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(std::distance(times.begin(), it)) - 1];
}

KaplanMeierCurve kaplan_meier(std::span<const std::pair<double, bool>> observations) {
  if (observations.empty()) throw std::invalid_argument("kaplan_meier: no observations");
  std::map<double, std::pair<std::size_t, std::size_t>> by_time;  // time -> (events, removed)
  for (const auto& [time, event] : observations) {
    if (!(time > 0.0)) throw std::invalid_argument("kaplan_meier: times must be positive");
    auto& entry = by_time[time];
    entry.first += event ? 1 : 0;
    entry.second += 1;
  }
  KaplanMeierCurve curve;
  std::size_t at_risk = observations.size();
  double survival = 1.0;
  for (const auto& [time, counts] : by_time) {
    const auto [events, removed] = counts;
    if (events > 0) {
      survival *= static_cast<double>(at_risk - events) / static_cast<double>(at_risk);
    }
    curve.times.push_back(time);
    curve.survival.push_back(survival);
    at_risk -= removed;
  }
  return curve;
}

KaplanMeierCurve kaplan_meier(const GroupedDataset& data) {
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(data.observation_count());
  for (const auto& group : data.groups()) {
    for (const auto& obs : group.observations) pooled.emplace_back(obs.time, obs.event);
  }
  return kaplan_meier(pooled);
}

double empirical_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("empirical_quantile: no values");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FitReport summarize_trace(const Trace& trace, double level) {
  require_samples(trace, "summarize_trace");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("summarize_trace: level must be in (0, 1)");
  const auto names = trace.column_names();
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& sample : trace.samples) {
    const auto values = trace.row(sample);
    for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
  }
  FitReport report;
  report.level = level;
  report.sample_count = trace.samples.size();
  report.acceptance = trace.acceptance;
  const double tail = 0.5 * (1.0 - level);
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] == "loglik" || names[c].starts_with("xi[")) continue;
    auto& values = columns[c];
    ParameterSummary summary;
    summary.name = names[c];
    double total = 0.0;
    for (double v : values) total += v;
    summary.mean = total / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    summary.lower = empirical_quantile(values, tail);
    summary.upper = empirical_quantile(values, 1.0 - tail);
    // A constant column can drift from its own mean by one rounding step.
    summary.mean = std::clamp(summary.mean, values.front(), values.back());
    report.parameters.push_back(std::move(summary));
  }
  return report;
}

std::vector<double> predicted_reliability_curve(const Trace& trace, ErrorKind kind,
                                                std::span<const double> x_new,
                                                std::span<const double> t_grid, int latent_draws,
                                                std::uint64_t seed) {
  require_samples(trace, "predicted_reliability_curve");
  if (latent_draws < 1) throw std::invalid_argument("predicted_reliability_curve: latent_draws must be positive");
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    if (!(t_grid[g] > 0.0)) throw std::invalid_argument("predicted_reliability_curve: grid times must be positive");
    if (g > 0 && t_grid[g] < t_grid[g - 1]) throw std::invalid_argument("predicted_reliability_curve: grid must be sorted");
  }
  std::vector<double> curve(t_grid.size(), 0.0);
  const RandomStream root(seed);
  const auto count = static_cast<double>(trace.samples.size());
  std::vector<double> w_values;
  std::vector<double> w_weights;
  for (std::size_t s = 0; s < trace.samples.size(); ++s) {
    const auto& state = trace.samples[s].state;
    const auto& law = state.law;
    w_values.clear();
    w_weights.clear();
    switch (trace.model.latent) {
      case LatentKind::none:
        w_values.push_back(0.0);
        w_weights.push_back(1.0);
        break;
      case LatentKind::discrete:
        w_values = law.locations;
        w_weights = law.weights;
        break;
      case LatentKind::continuous:
      case LatentKind::mixed: {
        RandomStream rs = root.child(s);
        const Categorical component(law.weights);
        for (int r = 0; r < latent_draws; ++r) {
          const std::size_t k = component.draw(rs);
          w_values.push_back(law.locations[k] + law.scales[k] * rs.standard_normal());
          w_weights.push_back(1.0 / latent_draws);
        }
        break;
      }
    }
    for (std::size_t r = 0; r < w_values.size(); ++r) {
      const double lp = linear_predictor(state.theta, x_new, w_values[r]);
      for (std::size_t g = 0; g < t_grid.size(); ++g) {
        curve[g] += w_weights[r] * reliability_at(kind, t_grid[g], lp, state.theta.sigma) / count;
      }
    }
  }
  for (std::size_t g = 0; g < curve.size(); ++g) {
    curve[g] = std::clamp(curve[g], 0.0, 1.0);
    if (g > 0) curve[g] = std::min(curve[g], curve[g - 1]);
  }
  return curve;
}

}  // namespace grouplife
