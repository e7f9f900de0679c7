#pragma once

#include <cmath>

#include "grouplife/random.hpp"

namespace grouplife {

struct MhStep {
  double value;
  bool accepted;
};

/// One symmetric random-walk Metropolis-Hastings step.
///
/// `log_target` must be finite at `current`; `current_log_target` is its
/// cached value there. Proposals with a non-finite target are rejected.
template <class LogTarget>
MhStep mh_update_scalar(double current, double current_log_target, LogTarget&& log_target,
                        double proposal_scale, RandomStream& rs) {
  const double proposal = current + proposal_scale * rs.standard_normal();
  const double log_u = std::log(rs.uniform());
  const double proposed_log_target = log_target(proposal);
  if (std::isfinite(proposed_log_target) && log_u < proposed_log_target - current_log_target) {
    return {proposal, true};
  }
  return {current, false};
}

template <class LogTarget>
MhStep mh_update_scalar(double current, LogTarget&& log_target, double proposal_scale,
                        RandomStream& rs) {
  const double current_log_target = log_target(current);
  return mh_update_scalar(current, current_log_target, log_target, proposal_scale, rs);
}

/// Multiplicative scale adaptation: scale * exp(gain * (observed - target)).
inline double adapt_scale(double scale, double observed_rate, double target_rate,
                          double gain = 0.5) {
  return scale * std::exp(gain * (observed_rate - target_rate));
}

}  // namespace grouplife
