#include "gerve/mixture.hpp"

#include "gerve/random.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace gerve {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
// Eigenvalues within this relative distance of a bound count as feasible.
constexpr double kSpectrumTol = 1e-9;

void check_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (expected " +
                       std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

double log_det_spd(const Matrix& s, const char* what) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput(std::string(what) + ": precision is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double log_sum_exp(const double* v, std::size_t n) {
  double m = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

// P(lo < X < hi) for X ~ N(mu, sd^2), evaluated to avoid cancellation in the tails.
double normal_interval(double mu, double sd, double lo, double hi) {
  const double a = (lo - mu) / sd;
  const double b = (hi - mu) / sd;
  constexpr double r2 = 0.70710678118654752440;
  if (a >= 0.0) return 0.5 * (std::erfc(a * r2) - std::erfc(b * r2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * r2) - std::erfc(-a * r2));
  return 1.0 - 0.5 * std::erfc(-a * r2) - 0.5 * std::erfc(b * r2);
}

}  // namespace

Matrix GaussianComponent::covariance() const {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("GaussianComponent: precision is not positive definite");
  }
  Matrix cov = llt.solve(Matrix::Identity(precision.rows(), precision.cols()));
  return 0.5 * (cov + cov.transpose());
}

GaussianComponent GaussianComponent::from_covariance(const Vector& mean,
                                                     const Matrix& covariance) {
  check_dim(mean.size(), covariance.rows(), "from_covariance");
  check_dim(mean.size(), covariance.cols(), "from_covariance");
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("from_covariance: covariance is not positive definite");
  }
  Matrix prec = llt.solve(Matrix::Identity(mean.size(), mean.size()));
  return {mean, 0.5 * (prec + prec.transpose())};
}

Eigen::Index MixtureState::dim() const {
  return components.empty() ? 0 : components.front().dim();
}

Vector MixtureState::weights() const { return weights_from_logits(logits); }

MixtureState MixtureState::from_weights(const Vector& weights,
                                        std::vector<GaussianComponent> components) {
  if (static_cast<std::size_t>(weights.size()) != components.size()) {
    throw InvalidInput("from_weights: weight count does not match component count");
  }
  MixtureState s{logits_from_weights(weights), std::move(components)};
  validate_state(s);
  return s;
}

bool Domain::contains(const double* x) const {
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (x[j] < lower[j] || x[j] > upper[j]) return false;
  }
  return true;
}

double Domain::volume() const { return (upper - lower).prod(); }

void Domain::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidInput("Domain: lower/upper must be nonempty and of equal length");
  }
  if (!lower.allFinite() || !upper.allFinite()) throw InvalidInput("Domain: non-finite bound");
  if (!(lower.array() < upper.array()).all()) {
    throw InvalidInput("Domain: lower must be strictly below upper");
  }
}

Domain Domain::cube(Eigen::Index d, double lo, double hi) {
  Domain dom{Vector::Constant(d, lo), Vector::Constant(d, hi)};
  dom.validate();
  return dom;
}

void ParameterBounds::validate() const {
  if (!(mu_max > 0.0) || !(v_max > 0.0) || !(sigma2_min > 0.0) ||
      !(sigma2_min < sigma2_max) || !std::isfinite(mu_max) || !std::isfinite(sigma2_max) ||
      !std::isfinite(v_max)) {
    throw InvalidInput("ParameterBounds: require 0 < sigma2_min < sigma2_max and positive "
                       "finite mu_max, v_max");
  }
}

double ParameterBounds::min_logit_bound(std::size_t K, double weight_floor) {
  if (!(weight_floor > 0.0 && weight_floor < 1.0)) {
    throw InvalidInput("min_logit_bound: weight floor must lie in (0,1)");
  }
  const double arg = 1.0 / weight_floor - static_cast<double>(K - 1);
  return arg > 1.0 ? 0.5 * std::log(arg) : 0.0;
}

void ParameterBounds::validate_for(std::size_t K, double weight_floor) const {
  validate();
  if (v_max < min_logit_bound(K, weight_floor)) {
    throw InvalidInput("ParameterBounds: v_max too small for the configured prune floor");
  }
}

Vector weights_from_logits(const Vector& logits) {
  if (!logits.allFinite()) throw InvalidInput("weights_from_logits: non-finite logit");
  const Eigen::Index K = logits.size() + 1;
  Vector full(K);
  full.head(K - 1) = logits;
  full[K - 1] = 0.0;
  const double m = full.maxCoeff();
  Vector w = (full.array() - m).exp();
  return w / w.sum();
}

Vector logits_from_weights(const Vector& weights) {
  if (weights.size() == 0) throw InvalidInput("logits_from_weights: empty weight vector");
  if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
    throw InvalidInput("logits_from_weights: weights must be positive and finite");
  }
  const Eigen::Index K = weights.size();
  const double lk = std::log(weights[K - 1]);
  Vector v(K - 1);
  for (Eigen::Index k = 0; k + 1 < K; ++k) v[k] = std::log(weights[k]) - lk;
  return v;
}

double component_log_density(const GaussianComponent& comp, const Vector& x) {
  check_dim(comp.dim(), x.size(), "component_density");
  check_dim(comp.dim(), comp.precision.rows(), "component_density");
  const Vector r = x - comp.mean;
  const double quad = r.dot(comp.precision * r);
  const double d = static_cast<double>(comp.dim());
  return -0.5 * d * kLog2Pi + 0.5 * log_det_spd(comp.precision, "component_density") -
         0.5 * quad;
}

double component_density(const GaussianComponent& comp, const Vector& x) {
  return std::exp(component_log_density(comp, x));
}

double mixture_log_density(const MixtureState& state, const Vector& x) {
  if (state.components.empty()) throw InvalidInput("mixture_density: empty mixture");
  check_dim(state.dim(), x.size(), "mixture_density");
  PreparedMixture pm(state);
  return pm.log_mixture(x.data());
}

double mixture_density(const MixtureState& state, const Vector& x) {
  return std::exp(mixture_log_density(state, x));
}

Vector responsibilities(const MixtureState& state, const Vector& x) {
  if (state.components.empty()) throw InvalidInput("responsibilities: empty mixture");
  check_dim(state.dim(), x.size(), "responsibilities");
  PreparedMixture pm(state);
  Vector lj(static_cast<Eigen::Index>(pm.size()));
  const double lq = pm.log_joint(x.data(), lj.data());
  if (!std::isfinite(lq)) {
    throw DegeneratePoint("responsibilities: mixture density is zero or not finite at x");
  }
  Vector r = (lj.array() - lq).exp();
  return r / r.sum();
}

Matrix clamp_precision_spectrum(const Matrix& precision, const ParameterBounds& bounds,
                                bool* repaired) {
  const double lam_lo = 1.0 / bounds.sigma2_max;
  const double lam_hi = 1.0 / bounds.sigma2_min;
  const Matrix sym = 0.5 * (precision + precision.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericFailure("clamp_precision_spectrum: eigendecomposition failed");
  }
  const Vector& lam = es.eigenvalues();
  bool feasible = lam.allFinite();
  bool nonpd = false;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!(lam[i] > 0.0)) nonpd = true;
    if (lam[i] < lam_lo * (1.0 - kSpectrumTol) || lam[i] > lam_hi * (1.0 + kSpectrumTol)) {
      feasible = false;
    }
  }
  if (repaired != nullptr) *repaired = nonpd;
  if (feasible && !nonpd) return precision;
  if (!lam.allFinite()) throw NumericFailure("clamp_precision_spectrum: non-finite precision");
  Vector clamped(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    clamped[i] = lam[i] > 0.0 ? std::clamp(lam[i], lam_lo, lam_hi) : lam_lo;
  }
  const Matrix& V = es.eigenvectors();
  Matrix out = V * clamped.asDiagonal() * V.transpose();
  return 0.5 * (out + out.transpose());
}

MixtureState project_to_bounds(const MixtureState& state, const ParameterBounds& bounds) {
  MixtureState out = state;
  for (Eigen::Index k = 0; k < out.logits.size(); ++k) {
    out.logits[k] = std::clamp(out.logits[k], -bounds.v_max, bounds.v_max);
  }
  for (auto& c : out.components) {
    for (Eigen::Index j = 0; j < c.mean.size(); ++j) {
      c.mean[j] = std::clamp(c.mean[j], -bounds.mu_max, bounds.mu_max);
    }
    c.precision = clamp_precision_spectrum(c.precision, bounds);
  }
  return out;
}

bool is_feasible(const MixtureState& state, const ParameterBounds& bounds) {
  if ((state.logits.array().abs() > bounds.v_max).any()) return false;
  for (const auto& c : state.components) {
    if ((c.mean.array().abs() > bounds.mu_max).any()) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.precision, Eigen::EigenvaluesOnly);
    const Vector& lam = es.eigenvalues();
    if (lam.minCoeff() < (1.0 / bounds.sigma2_max) * (1.0 - kSpectrumTol)) return false;
    if (lam.maxCoeff() > (1.0 / bounds.sigma2_min) * (1.0 + kSpectrumTol)) return false;
  }
  return true;
}

std::vector<std::size_t> canonical_permutation(const MixtureState& state) {
  const std::size_t K = state.size();
  std::vector<std::vector<double>> keys(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = state.components[k];
    auto& key = keys[k];
    key.assign(c.mean.data(), c.mean.data() + c.mean.size());
    for (Eigen::Index i = 0; i < c.precision.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.precision.cols(); ++j) key.push_back(c.precision(i, j));
    }
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(keys[a].begin(), keys[a].end(), keys[b].begin(),
                                        keys[b].end());
  });
  return order;
}

MixtureState permute_components(const MixtureState& state,
                                const std::vector<std::size_t>& order) {
  const std::size_t K = state.size();
  if (order.size() != K) throw InvalidInput("permute_components: permutation size mismatch");
  Vector full(static_cast<Eigen::Index>(K));
  full.head(static_cast<Eigen::Index>(K - 1)) = state.logits;
  full[static_cast<Eigen::Index>(K - 1)] = 0.0;
  const double pivot = full[static_cast<Eigen::Index>(order[K - 1])];
  MixtureState out;
  out.logits.resize(static_cast<Eigen::Index>(K - 1));
  out.components.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    out.components.push_back(state.components[order[k]]);
    if (k + 1 < K) out.logits[static_cast<Eigen::Index>(k)] =
        full[static_cast<Eigen::Index>(order[k])] - pivot;
  }
  return out;
}

MixtureState canonical_order(const MixtureState& state) {
  const auto order = canonical_permutation(state);
  bool identity = true;
  for (std::size_t k = 0; k < order.size(); ++k) identity = identity && order[k] == k;
  if (identity) return state;
  return permute_components(state, order);
}

double outside_mass(const GaussianComponent& comp, const Domain& domain, std::size_t n_mc,
                    std::uint64_t seed) {
  check_dim(comp.dim(), domain.dim(), "outside_mass");
  const Matrix& S = comp.precision;
  const bool diagonal = (S - Matrix(S.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (!diagonal) return outside_mass_mc(comp, domain, n_mc, seed);
  double inside = 1.0;
  for (Eigen::Index j = 0; j < comp.dim(); ++j) {
    if (!(S(j, j) > 0.0)) throw InvalidInput("outside_mass: non-positive precision");
    inside *= normal_interval(comp.mean[j], 1.0 / std::sqrt(S(j, j)), domain.lower[j],
                              domain.upper[j]);
  }
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

double outside_mass_mc(const GaussianComponent& comp, const Domain& domain, std::size_t n_mc,
                       std::uint64_t seed) {
  check_dim(comp.dim(), domain.dim(), "outside_mass");
  if (n_mc == 0) throw InvalidInput("outside_mass: n_mc must be positive");
  const Eigen::Index d = comp.dim();
  Eigen::LLT<Matrix> llt(comp.covariance());
  const Matrix L = llt.matrixL();
  Rng rng(derive_seed(seed, stream::kOutsideMass));
  std::normal_distribution<double> nd;
  Vector eps(d);
  Vector x(d);
  std::size_t outside = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) eps[j] = nd(rng);
    x.noalias() = comp.mean + L * eps;
    if (!domain.contains(x)) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(n_mc);
}

void validate_state(const MixtureState& state) {
  const std::size_t K = state.size();
  if (K == 0) throw InvalidInput("MixtureState: at least one component required");
  if (static_cast<std::size_t>(state.logits.size()) != K - 1) {
    throw InvalidInput("MixtureState: logits must have length K-1");
  }
  if (!state.logits.allFinite()) throw InvalidInput("MixtureState: non-finite logit");
  const Eigen::Index d = state.components.front().dim();
  if (d == 0) throw InvalidInput("MixtureState: zero-dimensional component");
  for (const auto& c : state.components) {
    check_dim(d, c.mean.size(), "MixtureState");
    check_dim(d, c.precision.rows(), "MixtureState");
    check_dim(d, c.precision.cols(), "MixtureState");
    if (!c.mean.allFinite() || !c.precision.allFinite()) {
      throw InvalidInput("MixtureState: non-finite component parameter");
    }
    const double asym = (c.precision - c.precision.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, c.precision.cwiseAbs().maxCoeff())) {
      throw InvalidInput("MixtureState: precision is not symmetric");
    }
    log_det_spd(c.precision, "MixtureState");
  }
}

PreparedMixture::PreparedMixture(const MixtureState& state) {
  validate_state(state);
  dim_ = state.dim();
  weights_ = state.weights();
  log_weights_ = weights_.array().log();
  const std::size_t K = state.size();
  means_.reserve(K);
  precisions_.reserve(K);
  cov_chol_.reserve(K);
  log_norm_.reserve(K);
  for (const auto& c : state.components) {
    means_.push_back(c.mean);
    precisions_.push_back(c.precision);
    Eigen::LLT<Matrix> llt(c.precision);
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    log_norm_.push_back(-0.5 * static_cast<double>(dim_) * kLog2Pi + 0.5 * logdet);
    Eigen::LLT<Matrix> cl(llt.solve(Matrix::Identity(dim_, dim_)));
    cov_chol_.push_back(cl.matrixL());
  }
}

double PreparedMixture::log_component(std::size_t k, const double* x) const {
  const Vector& mu = means_[k];
  const Matrix& S = precisions_[k];
  double quad = 0.0;
  if (dim_ == 1) {
    const double r = x[0] - mu[0];
    quad = S(0, 0) * r * r;
  } else if (dim_ == 2) {
    const double r0 = x[0] - mu[0];
    const double r1 = x[1] - mu[1];
    quad = S(0, 0) * r0 * r0 + 2.0 * S(0, 1) * r0 * r1 + S(1, 1) * r1 * r1;
  } else {
    Eigen::Map<const Vector> xv(x, dim_);
    const Vector r = xv - mu;
    quad = r.dot(S * r);
  }
  return log_norm_[k] - 0.5 * quad;
}

double PreparedMixture::log_joint(const double* x, double* out) const {
  const std::size_t K = size();
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = log_weights_[static_cast<Eigen::Index>(k)] + log_component(k, x);
  }
  return log_sum_exp(out, K);
}

double PreparedMixture::log_mixture(const double* x) const {
  const std::size_t K = size();
  if (K == 1) return log_component(0, x);
  double buf[64];
  std::vector<double> heap;
  double* out = buf;
  if (K > 64) {
    heap.resize(K);
    out = heap.data();
  }
  return log_joint(x, out);
}

}  // namespace gerve
