#include "grouplife/latent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace grouplife {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_simplex(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(what) + ": probabilities must sum to 1");
  }
}

void check_concentration(std::span<const double> prior, std::size_t K, const char* what) {
  if (prior.size() != K) throw std::invalid_argument(std::string(what) + ": prior length != K");
  for (double a : prior) {
    if (!(a > 0.0)) throw std::invalid_argument(std::string(what) + ": prior must be positive");
  }
}

double normal_log_density(double x, NormalLaw law) { return Normal(law.mean, law.sd).log_density(x); }

/// Probabilities proportional to weights[k] * exp(log_values[k]). The largest
/// log value is subtracted before exponentiating, so adding a constant to
/// every log value leaves the result unchanged.
std::vector<double> weighted_posterior(std::span<const double> log_values, std::span<const double> weights,
                                       const char* failure) {
  double top = kNegInf;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0 && log_values[k] > top) top = log_values[k];
  }
  if (!std::isfinite(top)) throw std::domain_error(failure);
  std::vector<double> posterior(weights.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) posterior[k] = weights[k] * std::exp(log_values[k] - top);
    total += posterior[k];
  }
  for (double& v : posterior) v /= total;
  return posterior;
}

}  // namespace

std::string_view to_string(LatentKind kind) {
  switch (kind) {
    case LatentKind::none: return "none";
    case LatentKind::discrete: return "gslh-d";
    case LatentKind::continuous: return "gslh-c";
    case LatentKind::mixed: return "gslh-m";
  }
  return "none";
}

LatentKind parse_latent_kind(std::string_view text) {
  if (text == "none" || text == "baseline") return LatentKind::none;
  if (text == "gslh-d" || text == "discrete") return LatentKind::discrete;
  if (text == "gslh-c" || text == "continuous") return LatentKind::continuous;
  if (text == "gslh-m" || text == "mixed") return LatentKind::mixed;
  throw std::invalid_argument("unknown latent structure '" + std::string(text) +
                              "' (expected none, gslh-d, gslh-c or gslh-m)");
}

void NigHyperprior::validate() const {
  if (!std::isfinite(m0)) throw std::invalid_argument("hyperprior m0 must be finite");
  if (!(k0 > 0.0 && a0 > 0.0 && b0 > 0.0)) {
    throw std::invalid_argument("hyperprior k0, a0, b0 must be positive");
  }
}

GslhD::GslhD(std::vector<double> atoms, std::vector<double> probabilities,
             std::vector<double> prior)
    : d(std::move(atoms)), p(std::move(probabilities)), dirichlet_prior(std::move(prior)) {
  if (d.empty()) throw std::invalid_argument("gslh-d: K must be at least 1");
  if (p.size() != d.size()) throw std::invalid_argument("gslh-d: p length != K");
  check_simplex(p, "gslh-d");
  check_concentration(dirichlet_prior, d.size(), "gslh-d");
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (!(d[k] > d[k - 1])) throw std::invalid_argument("gslh-d: atoms must be strictly increasing");
  }
}

GslhC::GslhC(double mu, double sigma, NigHyperprior prior)
    : mu_w(mu), sigma_w(sigma), hyperprior(prior) {
  if (!(sigma_w > 0.0)) throw std::invalid_argument("gslh-c: sigma_w must be positive");
  hyperprior.validate();
}

GslhM::GslhM(std::vector<double> weights, std::vector<NormalLaw> components,
             std::vector<double> prior, NigHyperprior hyper)
    : q(std::move(weights)),
      phi(std::move(components)),
      dirichlet_prior(std::move(prior)),
      hyperprior(hyper) {
  if (q.empty()) throw std::invalid_argument("gslh-m: K must be at least 1");
  if (phi.size() != q.size()) throw std::invalid_argument("gslh-m: component count != K");
  check_simplex(q, "gslh-m");
  check_concentration(dirichlet_prior, q.size(), "gslh-m");
  hyperprior.validate();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!(phi[k].sd > 0.0)) throw std::invalid_argument("gslh-m: component sd must be positive");
    if (k > 0 && !(phi[k].mean > phi[k - 1].mean)) {
      throw std::invalid_argument("gslh-m: component means must be strictly increasing");
    }
  }
}

std::vector<double> discrete_posterior(std::span<const double> group_loglik,
                                       std::span<const double> p) {
  if (group_loglik.size() != p.size()) {
    throw std::invalid_argument("discrete_posterior: likelihood and prior lengths differ");
  }
  return weighted_posterior(group_loglik, p, "discrete latent update: every atom has zero posterior weight");
}

std::size_t sample_w_discrete(std::span<const double> group_loglik, std::span<const double> p,
                              RandomStream& rs) {
  return Categorical(discrete_posterior(group_loglik, p)).draw(rs);
}

std::vector<double> update_p(std::span<const std::size_t> counts, std::span<const double> prior,
                             RandomStream& rs) {
  if (counts.size() != prior.size()) {
    throw std::invalid_argument("update_p: counts and prior lengths differ");
  }
  std::vector<double> posterior(prior.begin(), prior.end());
  for (std::size_t k = 0; k < counts.size(); ++k) posterior[k] += static_cast<double>(counts[k]);
  return Dirichlet(std::move(posterior)).draw(rs);
}

MhStep sample_w_continuous(double current_w, std::span<const Observation> group,
                           const RegressionParams& params, ErrorKind kind, NormalLaw phi,
                           double proposal_scale, RandomStream& rs) {
  if (!(proposal_scale > 0.0)) throw std::invalid_argument("proposal scale must be positive");
  std::vector<double> fixed_lp(group.size());
  std::vector<double> log_times(group.size());
  for (std::size_t j = 0; j < group.size(); ++j) {
    fixed_lp[j] = linear_predictor(params, group[j].covariates, 0.0);
    log_times[j] = std::log(group[j].time);
  }
  auto log_target = [&](double w) {
    double total = normal_log_density(w, phi);
    for (std::size_t j = 0; j < group.size(); ++j) {
      total += log_likelihood_term(kind, fixed_lp[j] + w, params.sigma, log_times[j],
                                   group[j].event);
    }
    return total;
  };
  return mh_update_scalar(current_w, log_target, proposal_scale, rs);
}

NormalLaw draw_phi_prior(const NigHyperprior& prior, RandomStream& rs) {
  const double variance = 1.0 / Gamma(prior.a0, prior.b0).draw(rs);
  const double mean = prior.m0 + std::sqrt(variance / prior.k0) * rs.standard_normal();
  return {mean, std::sqrt(variance)};
}

NormalLaw update_phi(std::span<const double> w_values, const NigHyperprior& prior,
                     RandomStream& rs) {
  const auto n = static_cast<double>(w_values.size());
  if (w_values.empty()) return draw_phi_prior(prior, rs);
  double mean = 0.0;
  for (double w : w_values) mean += w;
  mean /= n;
  double squares = 0.0;
  for (double w : w_values) squares += (w - mean) * (w - mean);

  NigHyperprior posterior;
  posterior.k0 = prior.k0 + n;
  posterior.m0 = (prior.k0 * prior.m0 + n * mean) / posterior.k0;
  posterior.a0 = prior.a0 + 0.5 * n;
  posterior.b0 = prior.b0 + 0.5 * squares +
                 0.5 * prior.k0 * n * (mean - prior.m0) * (mean - prior.m0) / posterior.k0;
  return draw_phi_prior(posterior, rs);
}

std::vector<double> membership_posterior(double w, std::span<const double> q,
                                         std::span<const NormalLaw> phi) {
  if (q.size() != phi.size()) {
    throw std::invalid_argument("membership_posterior: weight and component counts differ");
  }
  std::vector<double> log_density(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) log_density[k] = normal_log_density(w, phi[k]);
  return weighted_posterior(log_density, q, "membership update: every component has zero density");
}

std::size_t sample_membership(double w, std::span<const double> q,
                              std::span<const NormalLaw> phi, RandomStream& rs) {
  return Categorical(membership_posterior(w, q, phi)).draw(rs);
}

double mixture_marginal_density(const RegressionParams& params, ErrorKind kind,
                                std::span<const double> x, std::span<const double> d,
                                std::span<const double> p, double t) {
  if (d.size() != p.size()) throw std::invalid_argument("mixture density: d and p lengths differ");
  if (!(t > 0.0)) return 0.0;
  const double base = linear_predictor(params, x, 0.0);
  double density = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double location = base + d[k];
    if (kind == ErrorKind::lognormal) {
      density += p[k] * std::exp(LogNormal(location, params.sigma).log_density(t));
    } else {
      const Weibull component(std::exp(-location / params.sigma), 1.0 / params.sigma);
      density += p[k] * std::exp(component.log_density(t));
    }
  }
  return density;
}

}  // namespace grouplife
