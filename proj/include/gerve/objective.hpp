#pragma once

#include "gerve/mixture.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gerve {

struct EntropyConfig {
  std::size_t n_entropy_samples = 100;  // B_e, drawn per component
  std::uint64_t seed = 0;

  void validate() const;
};

/// Gradient blocks in (mean, covariance, weight) coordinates. Weight gradients are with
/// respect to pi_1..pi_{K-1} with pi_K = 1 - sum of the others.
struct GradientBundle {
  std::vector<Vector> g;      // data term, d/d mu_k
  std::vector<Matrix> H;      // data term, d/d Sigma_k
  Vector f;                   // data term, d/d pi_k
  std::vector<Matrix> eta;    // entropy, d/d Sigma_k
  std::vector<Vector> gamma;  // entropy, d/d mu_k
  Vector phi;                 // entropy, d/d pi_k
};

struct EntropyEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// (1/N) sum_i q(X_i).
double data_term(const MixtureState& state, const PointMatrix& samples);

/// Monte-Carlo estimate of -int_S q log q with B_e draws per component.
///
/// With `anchor` set, draws come from the anchor's components and are reweighted by the
/// component density ratio, so estimates at nearby states share random numbers exactly
/// and are smooth in the parameters. Without an anchor the state is its own anchor.
EntropyEstimate entropy_mc_estimate(const MixtureState& state, const Domain& domain,
                                    const EntropyConfig& ecfg,
                                    const MixtureState* anchor = nullptr);
double entropy_mc(const MixtureState& state, const Domain& domain, const EntropyConfig& ecfg,
                  const MixtureState* anchor = nullptr);

/// data_term(samples) + omega * entropy_mc(...).
double empirical_objective(const MixtureState& state, const PointMatrix& samples, double omega,
                           const Domain& domain, const EntropyConfig& ecfg,
                           const MixtureState* anchor = nullptr);

/// Mini-batch data-term gradients (g, H, f); the entropy blocks are left empty.
GradientBundle data_gradients(const MixtureState& state, const PointMatrix& batch);

/// Monte-Carlo entropy gradients (eta, gamma, phi); the data blocks are left empty.
/// They are the exact derivative of entropy_mc at the anchor, hence unbiased for the
/// gradient of the entropy on S. `standard_errors`, if given, receives per-entry SEs.
GradientBundle entropy_gradients(const MixtureState& state, const Domain& domain,
                                 const EntropyConfig& ecfg,
                                 GradientBundle* standard_errors = nullptr);

}  // namespace gerve
