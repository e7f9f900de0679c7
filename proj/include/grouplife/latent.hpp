#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "grouplife/aft.hpp"
#include "grouplife/mcmc.hpp"
#include "grouplife/random.hpp"

namespace grouplife {

/// Structure of the group-shared latent effect W_i.
///   none       - baseline model, W_i = 0
///   discrete   - W_i takes one of K atoms d_k with probabilities p
///   continuous - W_i ~ Normal(mu_w, sigma_w^2)
///   mixed      - W_i ~ Normal(mu_k, sigma_k^2) with probability q_k
enum class LatentKind { none, discrete, continuous, mixed };

std::string_view to_string(LatentKind kind);
LatentKind parse_latent_kind(std::string_view text);

/// Normal-inverse-gamma prior: sigma^2 ~ IG(a0, b0), mu | sigma^2 ~ N(m0, sigma^2 / k0).
struct NigHyperprior {
  double m0 = 0.0;
  double k0 = 0.01;
  double a0 = 2.0;
  double b0 = 1.0;

  void validate() const;
};

struct NormalLaw {
  double mean = 0.0;
  double sd = 1.0;
};

struct GslhD {
  std::vector<double> d;  // atoms, strictly increasing
  std::vector<double> p;
  std::vector<double> dirichlet_prior;

  GslhD(std::vector<double> atoms, std::vector<double> probabilities,
        std::vector<double> prior);
  [[nodiscard]] std::size_t K() const { return d.size(); }
};

struct GslhC {
  double mu_w = 0.0;
  double sigma_w = 1.0;
  NigHyperprior hyperprior;

  GslhC(double mu, double sigma, NigHyperprior prior);
};

struct GslhM {
  std::vector<double> q;
  std::vector<NormalLaw> phi;  // component means strictly increasing
  std::vector<double> dirichlet_prior;
  NigHyperprior hyperprior;

  GslhM(std::vector<double> weights, std::vector<NormalLaw> components,
        std::vector<double> prior, NigHyperprior hyper);
  [[nodiscard]] std::size_t K() const { return q.size(); }
};

/// Current latent values. `xi` holds 0-based memberships (discrete: atom
/// index; mixed: component index); it is empty for none/continuous.
struct LatentState {
  std::vector<double> w;
  std::vector<int> xi;

  friend bool operator==(const LatentState&, const LatentState&) = default;
};

// ---------------------------------------------------------------------------
// Conditional updates

/// Posterior probabilities proportional to p_k * exp(loglik_k), via log-sum-exp.
std::vector<double> discrete_posterior(std::span<const double> group_loglik,
                                       std::span<const double> p);

/// Exact categorical Gibbs draw of the atom index for one group.
std::size_t sample_w_discrete(std::span<const double> group_loglik, std::span<const double> p,
                              RandomStream& rs);

/// Draw from Dirichlet(prior + counts).
std::vector<double> update_p(std::span<const std::size_t> counts, std::span<const double> prior,
                             RandomStream& rs);
inline std::vector<double> update_q(std::span<const std::size_t> counts,
                                    std::span<const double> prior, RandomStream& rs) {
  return update_p(counts, prior, rs);
}

/// Random-walk MH step for W_i targeting prod_j L_ij(W) * Normal(W | phi).
MhStep sample_w_continuous(double current_w, std::span<const Observation> group,
                           const RegressionParams& params, ErrorKind kind, NormalLaw phi,
                           double proposal_scale, RandomStream& rs);

/// Same kernel as sample_w_continuous with the prior replaced by the
/// group's current mixture component.
inline MhStep sample_w_mixed(double current_w, std::span<const Observation> group,
                             const RegressionParams& params, ErrorKind kind,
                             NormalLaw component, double proposal_scale, RandomStream& rs) {
  return sample_w_continuous(current_w, group, params, kind, component, proposal_scale, rs);
}

/// Exact conjugate draw of (mean, sd) given the W values assigned to one law.
NormalLaw update_phi(std::span<const double> w_values, const NigHyperprior& prior,
                     RandomStream& rs);

/// Draw (mean, sd) from the hyperprior itself.
NormalLaw draw_phi_prior(const NigHyperprior& prior, RandomStream& rs);

/// Posterior membership probabilities proportional to q_k * N(w; phi_k).
std::vector<double> membership_posterior(double w, std::span<const double> q,
                                         std::span<const NormalLaw> phi);

std::size_t sample_membership(double w, std::span<const double> q,
                              std::span<const NormalLaw> phi, RandomStream& rs);

/// Marginal lifetime density of the discrete-latent model, written as a
/// finite mixture of AFT densities with component locations beta0 + beta.x + d_k
/// and common scale sigma.
double mixture_marginal_density(const RegressionParams& params, ErrorKind kind,
                                std::span<const double> x, std::span<const double> d,
                                std::span<const double> p, double t);

}  // namespace grouplife
