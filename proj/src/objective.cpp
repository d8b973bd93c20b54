#include "gerve/objective.hpp"

#include "gerve/random.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>

namespace gerve {

namespace {

const double kLogFloor = std::log(DBL_MIN);

void check_samples(const MixtureState& state, const PointMatrix& x, const char* what) {
  if (x.rows() == 0) throw InvalidInput(std::string(what) + ": empty sample set");
  if (x.cols() != state.dim()) {
    throw InvalidInput(std::string(what) + ": sample dimension does not match the mixture");
  }
}

// Fills z with a draw from component k of the prepared mixture.
void draw(const PreparedMixture& pm, std::size_t k, Rng& rng,
          std::normal_distribution<double>& nd, double* eps, double* z) {
  const Eigen::Index d = pm.dim();
  const Vector& mu = pm.mean(k);
  const Matrix& L = pm.cov_cholesky(k);
  for (Eigen::Index i = 0; i < d; ++i) eps[i] = nd(rng);
  for (Eigen::Index i = 0; i < d; ++i) {
    double v = mu[i];
    for (Eigen::Index j = 0; j <= i; ++j) v += L(i, j) * eps[j];
    z[i] = v;
  }
}

Rng entropy_rng(const EntropyConfig& ecfg, std::size_t m) {
  return Rng(derive_seed(ecfg.seed, stream::kEntropy, m));
}

}  // namespace

void EntropyConfig::validate() const {
  if (n_entropy_samples < 1) throw InvalidInput("EntropyConfig: n_entropy_samples must be >= 1");
}

double data_term(const MixtureState& state, const PointMatrix& samples) {
  check_samples(state, samples, "data_term");
  PreparedMixture pm(state);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    acc += std::exp(pm.log_mixture(samples.row(i).data()));
  }
  return acc / static_cast<double>(samples.rows());
}

EntropyEstimate entropy_mc_estimate(const MixtureState& state, const Domain& domain,
                                    const EntropyConfig& ecfg, const MixtureState* anchor) {
  ecfg.validate();
  const MixtureState& base = anchor != nullptr ? *anchor : state;
  if (base.size() != state.size() || base.dim() != state.dim()) {
    throw InvalidInput("entropy_mc: anchor shape does not match the state");
  }
  if (domain.dim() != state.dim()) throw InvalidInput("entropy_mc: domain dimension mismatch");
  PreparedMixture pm(state);
  PreparedMixture pa(base);
  const std::size_t K = pm.size();
  const std::size_t B = ecfg.n_entropy_samples;
  const Eigen::Index d = pm.dim();
  std::vector<double> eps(d);
  double value = 0.0;
  double var = 0.0;
  std::vector<double> zs(B * static_cast<std::size_t>(d)), base_l(B);
  for (std::size_t m = 0; m < K; ++m) {
    Rng rng = entropy_rng(ecfg, m);
    std::normal_distribution<double> nd;
    double base_sum = 0.0;
    for (std::size_t j = 0; j < B; ++j) {
      double* zj = &zs[j * static_cast<std::size_t>(d)];
      draw(pa, m, rng, nd, eps.data(), zj);
      base_l[j] = domain.contains(zj) ? std::max(pa.log_mixture(zj), kLogFloor) : 0.0;
      base_sum += base_l[j];
    }
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::size_t j = 0; j < B; ++j) {
      const double* zj = &zs[j * static_cast<std::size_t>(d)];
      double t = 0.0;
      if (anchor == nullptr) {
        t = base_l[j];
      } else {
        // Likelihood ratio with a leave-one-out baseline; the correction has mean zero.
        const double b = B > 1 ? (base_sum - base_l[j]) / static_cast<double>(B - 1) : 0.0;
        const double lr = std::exp(pm.log_component(m, zj) - pa.log_component(m, zj));
        const double lq = domain.contains(zj) ? std::max(pm.log_mixture(zj), kLogFloor) : 0.0;
        t = lr * lq - (lr - 1.0) * b;
      }
      sum += t;
      sumsq += t * t;
    }
    const double pi = pm.weights()[static_cast<Eigen::Index>(m)];
    const double mean = sum / static_cast<double>(B);
    value -= pi * mean;
    if (B > 1) {
      const double v = std::max(0.0, (sumsq - sum * mean) / static_cast<double>(B - 1));
      var += pi * pi * v / static_cast<double>(B);
    }
  }
  return {value, std::sqrt(var)};
}

double entropy_mc(const MixtureState& state, const Domain& domain, const EntropyConfig& ecfg,
                  const MixtureState* anchor) {
  return entropy_mc_estimate(state, domain, ecfg, anchor).value;
}

double empirical_objective(const MixtureState& state, const PointMatrix& samples, double omega,
                           const Domain& domain, const EntropyConfig& ecfg,
                           const MixtureState* anchor) {
  if (!(omega >= 0.0)) throw InvalidInput("empirical_objective: omega must be non-negative");
  const double data = data_term(state, samples);
  if (omega == 0.0) return data;
  return data + omega * entropy_mc(state, domain, ecfg, anchor);
}

GradientBundle data_gradients(const MixtureState& state, const PointMatrix& batch) {
  check_samples(state, batch, "data_gradients");
  PreparedMixture pm(state);
  const std::size_t K = pm.size();
  const Eigen::Index d = pm.dim();
  const Eigen::Index B = batch.rows();
  const Vector& w = pm.weights();

  GradientBundle out;
  out.g.assign(K, Vector::Zero(d));
  out.H.assign(K, Matrix::Zero(d, d));
  out.f = Vector::Zero(static_cast<Eigen::Index>(K - 1));

  std::vector<Vector> sum_r(K, Vector::Zero(d));  // sum_i q_k r_i
  std::vector<Matrix> sum_rr(K, Matrix::Zero(d, d));
  std::vector<double> sum_q(K, 0.0);
  Vector r(d);
  for (Eigen::Index i = 0; i < B; ++i) {
    const double* x = batch.row(i).data();
    for (std::size_t k = 0; k < K; ++k) {
      const double qk = std::exp(pm.log_component(k, x));
      if (qk == 0.0) continue;
      const Vector& mu = pm.mean(k);
      for (Eigen::Index a = 0; a < d; ++a) r[a] = x[a] - mu[a];
      sum_q[k] += qk;
      sum_r[k].noalias() += qk * r;
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a; b < d; ++b) sum_rr[k](a, b) += qk * r[a] * r[b];
      }
    }
  }
  const double inv_b = 1.0 / static_cast<double>(B);
  for (std::size_t k = 0; k < K; ++k) {
    const double pi = w[static_cast<Eigen::Index>(k)];
    const Matrix& S = pm.precision(k);
    Matrix rr = sum_rr[k].selfadjointView<Eigen::Upper>();
    out.g[k] = pi * inv_b * (S * sum_r[k]);
    Matrix h = 0.5 * pi * inv_b * (S * rr * S - sum_q[k] * S);
    out.H[k] = 0.5 * (h + h.transpose());
  }
  for (std::size_t k = 0; k + 1 < K; ++k) {
    out.f[static_cast<Eigen::Index>(k)] = inv_b * (sum_q[k] - sum_q[K - 1]);
  }
  return out;
}

GradientBundle entropy_gradients(const MixtureState& state, const Domain& domain,
                                 const EntropyConfig& ecfg, GradientBundle* standard_errors) {
  ecfg.validate();
  if (domain.dim() != state.dim()) {
    throw InvalidInput("entropy_gradients: domain dimension mismatch");
  }
  PreparedMixture pm(state);
  const std::size_t K = pm.size();
  const Eigen::Index d = pm.dim();
  const std::size_t B = ecfg.n_entropy_samples;
  const Vector& w = pm.weights();

  // Flat layout per component: gamma (d), eta upper triangle row-major (d*d slots used
  // as a full square for simplicity), then phi (K-1).
  const std::size_t block = static_cast<std::size_t>(d + d * d);
  const std::size_t P = K * block + (K - 1);
  std::vector<double> total(P, 0.0), total_var(P, 0.0);
  std::vector<double> sum(P), sumsq(P), term(P);
  const bool want_se = standard_errors != nullptr;

  std::vector<double> eps(d), z(d), logn(K), ratio(K);
  std::vector<double> sr(static_cast<std::size_t>(d) * K);
  std::vector<double> zs(B * static_cast<std::size_t>(d)), logs(B * K), log_q(B);
  std::vector<char> inside(B);
  for (std::size_t m = 0; m < K; ++m) {
    Rng rng = entropy_rng(ecfg, m);
    std::normal_distribution<double> nd;
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sumsq.begin(), sumsq.end(), 0.0);
    const double inv_pm = 1.0 / w[static_cast<Eigen::Index>(m)];
    double l_sum = 0.0;
    for (std::size_t j = 0; j < B; ++j) {
      double* zj = &zs[j * static_cast<std::size_t>(d)];
      draw(pm, m, rng, nd, eps.data(), zj);
      const double lq = pm.log_joint(zj, &logs[j * K]);
      log_q[j] = lq;
      inside[j] = domain.contains(zj);
      l_sum += inside[j] ? std::max(lq, kLogFloor) : 0.0;
    }
    for (std::size_t j = 0; j < B; ++j) {
      std::copy_n(&zs[j * static_cast<std::size_t>(d)], d, z.begin());
      std::copy_n(&logs[j * K], K, logn.begin());
      std::fill(term.begin(), term.end(), 0.0);
      const double lq = log_q[j];
      for (std::size_t k = 0; k < K; ++k) logn[k] -= pm.log_weights()[static_cast<Eigen::Index>(k)];
      const bool finite = std::isfinite(lq);
      const double L = inside[j] ? std::max(lq, kLogFloor) : 0.0;
      const double base = B > 1 ? (l_sum - L) / static_cast<double>(B - 1) : 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        ratio[k] = (inside[j] && finite) ? std::exp(logn[k] - lq) : 0.0;  // q_k / q
      }
      for (std::size_t k = 0; k < K; ++k) {
        const double resp = w[static_cast<Eigen::Index>(k)] * ratio[k];
        const double coef = (m == k ? L - base : 0.0) + resp;
        if (coef == 0.0) continue;
        const Vector& mu = pm.mean(k);
        const Matrix& S = pm.precision(k);
        double* s = &sr[k * static_cast<std::size_t>(d)];
        for (Eigen::Index a = 0; a < d; ++a) {
          double v = 0.0;
          for (Eigen::Index b = 0; b < d; ++b) v += S(a, b) * (z[b] - mu[b]);
          s[a] = v;
        }
        double* t = &term[k * block];
        for (Eigen::Index a = 0; a < d; ++a) t[a] = -coef * s[a];
        double* te = t + d;
        for (Eigen::Index a = 0; a < d; ++a) {
          for (Eigen::Index b = a; b < d; ++b) {
            te[a * d + b] = -coef * 0.5 * (s[a] * s[b] - S(a, b));
          }
        }
      }
      double* tp = &term[K * block];
      for (std::size_t k = 0; k + 1 < K; ++k) {
        double v = -(ratio[k] - ratio[K - 1]);
        if (m == k) v -= L * inv_pm;
        if (m == K - 1) v += L * inv_pm;
        tp[k] = v;
      }
      for (std::size_t p = 0; p < P; ++p) sum[p] += term[p];
      if (want_se) {
        for (std::size_t p = 0; p < P; ++p) sumsq[p] += term[p] * term[p];
      }
    }
    const double pi = w[static_cast<Eigen::Index>(m)];
    const double nb = static_cast<double>(B);
    for (std::size_t p = 0; p < P; ++p) {
      const double mean = sum[p] / nb;
      total[p] += pi * mean;
      if (want_se && B > 1) {
        const double v = std::max(0.0, (sumsq[p] - sum[p] * mean) / (nb - 1.0));
        total_var[p] += pi * pi * v / nb;
      }
    }
  }

  auto unpack = [&](const std::vector<double>& flat, bool is_se) {
    GradientBundle gb;
    gb.gamma.assign(K, Vector::Zero(d));
    gb.eta.assign(K, Matrix::Zero(d, d));
    gb.phi = Vector::Zero(static_cast<Eigen::Index>(K - 1));
    for (std::size_t k = 0; k < K; ++k) {
      const double* t = &flat[k * block];
      for (Eigen::Index a = 0; a < d; ++a) gb.gamma[k][a] = is_se ? std::sqrt(t[a]) : t[a];
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = a; b < d; ++b) {
          const double v = t[d + a * d + b];
          gb.eta[k](a, b) = gb.eta[k](b, a) = is_se ? std::sqrt(v) : v;
        }
      }
    }
    for (std::size_t k = 0; k + 1 < K; ++k) {
      const double v = flat[K * block + k];
      gb.phi[static_cast<Eigen::Index>(k)] = is_se ? std::sqrt(v) : v;
    }
    return gb;
  };
  if (want_se) *standard_errors = unpack(total_var, true);
  return unpack(total, false);
}

}  // namespace gerve
