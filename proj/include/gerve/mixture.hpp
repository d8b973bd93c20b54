#pragma once

#include "gerve/types.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gerve {

/// One Gaussian component stored in natural form: mean and precision S = Sigma^-1.
struct GaussianComponent {
  Vector mean;
  Matrix precision;

  [[nodiscard]] Eigen::Index dim() const { return mean.size(); }
  [[nodiscard]] Matrix covariance() const;

  static GaussianComponent from_covariance(const Vector& mean, const Matrix& covariance);
};

/// Mixture parameter: K-1 free logits v_k = log(pi_k / pi_K) (v_K is pinned to 0) and
/// K components.
struct MixtureState {
  Vector logits;
  std::vector<GaussianComponent> components;

  [[nodiscard]] std::size_t size() const { return components.size(); }
  [[nodiscard]] Eigen::Index dim() const;
  [[nodiscard]] Vector weights() const;

  // Builds a state from explicit weights (normalised internally).
  static MixtureState from_weights(const Vector& weights,
                                   std::vector<GaussianComponent> components);
};

/// Axis-aligned box on which the entropy is taken and where data live.
struct Domain {
  Vector lower;
  Vector upper;

  [[nodiscard]] Eigen::Index dim() const { return lower.size(); }
  [[nodiscard]] bool contains(const double* x) const;
  [[nodiscard]] bool contains(const Vector& x) const { return contains(x.data()); }
  [[nodiscard]] double volume() const;
  void validate() const;

  static Domain cube(Eigen::Index d, double lo, double hi);
};

/// The compact parameter set: |mu|_inf <= mu_max, sigma2_min I <= Sigma <= sigma2_max I,
/// |v_k| <= v_max.
struct ParameterBounds {
  double mu_max = 10.0;
  double sigma2_min = 1e-4;
  double sigma2_max = 10.0;
  double v_max = 6.0;

  void validate() const;
  // Smallest logit bound that still lets K-1 components reach weight `weight_floor`.
  static double min_logit_bound(std::size_t K, double weight_floor);
  // validate() plus the logit-bound requirement for a given prune floor.
  void validate_for(std::size_t K, double weight_floor) const;
};

Vector weights_from_logits(const Vector& logits);
Vector logits_from_weights(const Vector& weights);

double component_log_density(const GaussianComponent& comp, const Vector& x);
double component_density(const GaussianComponent& comp, const Vector& x);
double mixture_log_density(const MixtureState& state, const Vector& x);
double mixture_density(const MixtureState& state, const Vector& x);

/// Posterior component probabilities, accumulated in log space.
/// Throws DegeneratePoint if the total density is zero or not finite.
Vector responsibilities(const MixtureState& state, const Vector& x);

/// Clamps the covariance spectrum of a precision matrix into [sigma2_min, sigma2_max].
/// Non-positive precision eigenvalues map to sigma2_max. Returns the input unchanged
/// (bitwise) when it is already feasible. `repaired` is set when the input was not PD.
Matrix clamp_precision_spectrum(const Matrix& precision, const ParameterBounds& bounds,
                                bool* repaired = nullptr);

/// Projection onto the compact set. Idempotent; feasible states are returned unchanged.
MixtureState project_to_bounds(const MixtureState& state, const ParameterBounds& bounds);
bool is_feasible(const MixtureState& state, const ParameterBounds& bounds);

/// Permutation sorting components lexicographically by (mean, row-major precision);
/// ties keep original order.
std::vector<std::size_t> canonical_permutation(const MixtureState& state);
MixtureState canonical_order(const MixtureState& state);
MixtureState permute_components(const MixtureState& state,
                                const std::vector<std::size_t>& order);

/// Probability mass a component places outside the domain. Exact for diagonal
/// precision, Monte Carlo with `n_mc` draws otherwise.
double outside_mass(const GaussianComponent& comp, const Domain& domain,
                    std::size_t n_mc = 100000, std::uint64_t seed = 0);
double outside_mass_mc(const GaussianComponent& comp, const Domain& domain,
                       std::size_t n_mc, std::uint64_t seed);

/// Throws InvalidInput when a state breaks its invariants.
void validate_state(const MixtureState& state);

/// Cached per-component quantities for hot loops: log normaliser and the Cholesky
/// factor of the covariance (for sampling).
class PreparedMixture {
 public:
  explicit PreparedMixture(const MixtureState& state);

  [[nodiscard]] std::size_t size() const { return means_.size(); }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] const Vector& log_weights() const { return log_weights_; }
  [[nodiscard]] const Vector& weights() const { return weights_; }

  // log N(x; mu_k, S_k^-1)
  [[nodiscard]] double log_component(std::size_t k, const double* x) const;
  // Fills out[k] = log pi_k + log N_k(x) and returns log q(x) (log-sum-exp).
  double log_joint(const double* x, double* out) const;
  [[nodiscard]] double log_mixture(const double* x) const;

  [[nodiscard]] const Vector& mean(std::size_t k) const { return means_[k]; }
  [[nodiscard]] const Matrix& precision(std::size_t k) const { return precisions_[k]; }
  [[nodiscard]] const Matrix& cov_cholesky(std::size_t k) const { return cov_chol_[k]; }

 private:
  Eigen::Index dim_ = 0;
  Vector weights_;
  Vector log_weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> precisions_;
  std::vector<Matrix> cov_chol_;
  std::vector<double> log_norm_;
};

}  // namespace gerve
