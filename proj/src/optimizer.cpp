#include "gerve/optimizer.hpp"

#include "gerve/random.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

namespace gerve {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void apply_structure(Matrix& S, CovarianceStructure structure) {
  if (structure == CovarianceStructure::diagonal || structure == CovarianceStructure::isotropic) {
    const Vector diag = S.diagonal();
    S.setZero();
    if (structure == CovarianceStructure::isotropic) {
      S.diagonal().setConstant(diag.mean());
    } else {
      S.diagonal() = diag;
    }
  }
}

// log N(x; mu, s^-1 I) without the per-point allocation.
double iso_log_density(const double* x, const Vector& mu, double s) {
  const Eigen::Index d = mu.size();
  double q = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double r = x[j] - mu[j];
    q += r * r;
  }
  return 0.5 * static_cast<double>(d) * (std::log(s) - kLog2Pi) - 0.5 * s * q;
}

void sample_batch(const PointMatrix& samples, std::size_t B, Rng& rng, PointMatrix& batch) {
  const auto N = static_cast<std::size_t>(samples.rows());
  if (B >= N) {
    batch = samples;
    return;
  }
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  batch.resize(static_cast<Eigen::Index>(B), samples.cols());
  for (std::size_t b = 0; b < B; ++b) {
    batch.row(static_cast<Eigen::Index>(b)) = samples.row(static_cast<Eigen::Index>(pick(rng)));
  }
}

double eigmax_cov(const Matrix& precision) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(precision, Eigen::EigenvaluesOnly);
  return 1.0 / es.eigenvalues().minCoeff();
}

Snapshot make_snapshot(std::size_t t, const MixtureState& state, double omega, double rho,
                       const PointMatrix& batch, const Domain& domain,
                       const EntropyConfig& ecfg) {
  Snapshot s;
  s.iter = t;
  s.omega = omega;
  s.rho = rho;
  for (const auto& c : state.components) {
    s.means.push_back(c.mean);
    s.eigmax_sigma.push_back(eigmax_cov(c.precision));
  }
  s.objective = empirical_objective(state, batch, omega, domain, ecfg);
  return s;
}

bool converged(const MixtureState& prev, const MixtureState& next, const EarlyStop& es) {
  for (std::size_t k = 0; k < prev.size(); ++k) {
    const auto& a = prev.components[k];
    const auto& b = next.components[k];
    if (!((b.mean - a.mean).norm() < es.mean_tol)) return false;
    if (!((b.precision - a.precision).norm() / a.precision.norm() < es.prec_rel_tol)) {
      return false;
    }
  }
  return true;
}

}  // namespace

double Schedule::omega(std::size_t t) const {
  const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
  switch (temperature) {
    case TemperatureKind::constant:
      return omega1;
    case TemperatureKind::power:
      return omega1 / std::pow(tt, beta);
    case TemperatureKind::power_floor:
      return omega1 / std::pow(tt, beta) + omega_floor;
  }
  return omega1;
}

double Schedule::rho(std::size_t t) const {
  const double tt = static_cast<double>(std::max<std::size_t>(t, 1));
  switch (stepsize) {
    case StepKind::robbins_monro:
      return rho1 / std::pow(tt, alpha);
    case StepKind::temperature_coupled: {
      const double w = omega(t);
      return w > 0.0 ? rho1 * std::pow(omega1 / w, gamma) : rho1;
    }
    case StepKind::adaptive_meanshift:
      return rho1;
  }
  return rho1;
}

Schedule Schedule::frozen_at(double omega0) const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw InvalidInput("Schedule: frozen temperature must be positive");
  }
  Schedule s = *this;
  if (stepsize == StepKind::temperature_coupled) {
    s.stepsize = StepKind::robbins_monro;
    s.rho1 = rho1 * std::pow(omega1 / omega0, gamma);
    s.alpha = 0.0;
  }
  s.temperature = TemperatureKind::constant;
  s.omega1 = omega0;
  s.omega_floor = 0.0;
  return s;
}

void Schedule::validate() const {
  if (!(omega1 >= 0.0) || !(omega_floor >= 0.0) || !(beta >= 0.0)) {
    throw InvalidInput("Schedule: temperatures must be non-negative with beta >= 0");
  }
  if (!(rho1 >= 0.0) || !(alpha >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("Schedule: step size must be non-negative with alpha >= 0");
  }
  if (stepsize == StepKind::temperature_coupled && omega1 == 0.0) {
    throw InvalidInput("Schedule: temperature-coupled step needs omega1 > 0");
  }
}

void FitConfig::validate() const {
  if (T < 1) throw InvalidInput("FitConfig: T must be >= 1");
  if (B < 1) throw InvalidInput("FitConfig: B must be >= 1");
  bounds.validate();
  schedule.validate();
  ecfg.validate();
  if (domain) domain->validate();
  if (early_stop.enabled && (early_stop.check_every < 1 || early_stop.consecutive < 1)) {
    throw InvalidInput("FitConfig: early-stop check_every and consecutive must be >= 1");
  }
  if (!(init.sigma2_init > 0.0)) throw InvalidInput("FitConfig: sigma2_init must be positive");
  if (init.box_lower.size() != init.box_upper.size()) {
    throw InvalidInput("FitConfig: init box bounds must have equal length");
  }
}

MixtureState step_mixture(const MixtureState& state, const PointMatrix& batch, double omega,
                          double rho, const Domain& domain, const EntropyConfig& ecfg,
                          const ParameterBounds& bounds, CovarianceStructure structure,
                          StepDiagnostics* diag) {
  if (batch.rows() == 0) throw InvalidInput("step_mixture: empty batch");
  if (!(omega >= 0.0) || !(rho >= 0.0)) {
    throw InvalidInput("step_mixture: omega and rho must be non-negative");
  }
  GradientBundle gd = data_gradients(state, batch);
  GradientBundle ge;
  const bool use_entropy = omega > 0.0;
  if (use_entropy) ge = entropy_gradients(state, domain, ecfg);

  const Vector w = state.weights();
  const std::size_t K = state.size();
  MixtureState next = state;
  bool clamped = false;
  for (std::size_t k = 0; k < K; ++k) {
    const double pi = w[static_cast<Eigen::Index>(k)];
    auto& c = next.components[k];
    if (structure != CovarianceStructure::fixed) {
      Matrix dir = gd.H[k];
      if (use_entropy) dir += omega * ge.eta[k];
      Matrix S = c.precision - (2.0 * rho / pi) * dir;
      S = 0.5 * (S + S.transpose());
      apply_structure(S, structure);
      bool repaired = false;
      c.precision = clamp_precision_spectrum(S, bounds, &repaired);
      clamped = clamped || repaired;
    }
    Vector g = gd.g[k];
    if (use_entropy) g += omega * ge.gamma[k];
    Eigen::LLT<Matrix> llt(c.precision);
    c.mean += (rho / pi) * llt.solve(g);
  }
  for (Eigen::Index k = 0; k < next.logits.size(); ++k) {
    double f = gd.f[k];
    if (use_entropy) f += omega * ge.phi[k];
    next.logits[k] += rho * f;
  }
  next = project_to_bounds(next, bounds);
  if (structure == CovarianceStructure::diagonal || structure == CovarianceStructure::isotropic) {
    for (auto& c : next.components) apply_structure(c.precision, structure);
  }
  if (diag != nullptr) diag->clamped = clamped;
  return next;
}

Vector step_fixed_cov(const Vector& mean, const PointMatrix& batch, double s, double rho) {
  if (!(s > 0.0)) throw InvalidInput("step_fixed_cov: precision must be positive");
  if (batch.rows() == 0) throw InvalidInput("step_fixed_cov: empty batch");
  if (batch.cols() != mean.size()) throw InvalidInput("step_fixed_cov: dimension mismatch");
  const Eigen::Index d = mean.size();
  Vector acc = Vector::Zero(d);
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const double* x = batch.row(i).data();
    const double q = std::exp(iso_log_density(x, mean, s));
    for (Eigen::Index j = 0; j < d; ++j) acc[j] += (x[j] - mean[j]) * q;
  }
  return mean + (rho / static_cast<double>(batch.rows())) * acc;
}

double adaptive_step(const Vector& mean, const PointMatrix& batch, double s) {
  if (!(s > 0.0)) throw InvalidInput("adaptive_step: precision must be positive");
  double total = 0.0;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    total += std::exp(iso_log_density(batch.row(i).data(), mean, s));
  }
  if (!(total > 0.0)) throw StalledPoint("adaptive_step: all kernel weights underflow");
  return static_cast<double>(batch.rows()) / total;
}

Vector mean_shift_step(const Vector& mean, const PointMatrix& samples, double h) {
  if (!(h > 0.0)) throw InvalidInput("mean_shift_step: bandwidth must be positive");
  if (samples.rows() == 0) throw InvalidInput("mean_shift_step: no samples");
  if (samples.cols() != mean.size()) throw InvalidInput("mean_shift_step: dimension mismatch");
  const Eigen::Index d = mean.size();
  Vector num = Vector::Zero(d);
  double den = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double* x = samples.row(i).data();
    double q = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) q += (x[j] - mean[j]) * (x[j] - mean[j]);
    const double k = std::exp(-0.5 * q / h);
    den += k;
    for (Eigen::Index j = 0; j < d; ++j) num[j] += k * x[j];
  }
  if (!(den > 0.0)) throw StalledPoint("mean_shift_step: all kernel weights underflow");
  return num / den;
}

Domain default_domain(const PointMatrix& samples) {
  if (samples.rows() == 0) throw InvalidInput("default_domain: empty sample set");
  Vector lo = samples.colwise().minCoeff().transpose();
  Vector hi = samples.colwise().maxCoeff().transpose();
  Vector pad = 0.1 * (hi - lo);
  for (Eigen::Index j = 0; j < pad.size(); ++j) {
    if (pad[j] <= 0.0) pad[j] = 1.0;
  }
  return Domain{lo - pad, hi + pad};
}

namespace {

// Lloyd iterations; a centre that loses all its points stays where it is.
void lloyd(const PointMatrix& samples, std::vector<Vector>& centres, std::size_t iters) {
  const Eigen::Index N = samples.rows();
  const Eigen::Index d = samples.cols();
  const std::size_t K = centres.size();
  std::vector<std::size_t> label(static_cast<std::size_t>(N), K);
  for (std::size_t it = 0; it < iters; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < N; ++i) {
      std::size_t best = 0;
      double best_d2 = INFINITY;
      for (std::size_t k = 0; k < K; ++k) {
        const double v = (samples.row(i).transpose() - centres[k]).squaredNorm();
        if (v < best_d2) {
          best_d2 = v;
          best = k;
        }
      }
      auto& l = label[static_cast<std::size_t>(i)];
      if (l != best) {
        l = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Vector> sum(K, Vector::Zero(d));
    std::vector<std::size_t> count(K, 0);
    for (Eigen::Index i = 0; i < N; ++i) {
      const std::size_t l = label[static_cast<std::size_t>(i)];
      sum[l] += samples.row(i).transpose();
      ++count[l];
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (count[k] > 0) centres[k] = sum[k] / static_cast<double>(count[k]);
    }
  }
}

}  // namespace

MixtureState initial_state(const PointMatrix& samples, std::size_t K, const FitConfig& cfg) {
  if (K < 1) throw InvalidInput("initial_state: K must be >= 1");
  if (samples.rows() == 0) throw InvalidInput("initial_state: empty sample set");
  const Eigen::Index d = samples.cols();
  Rng rng(derive_seed(cfg.seed, stream::kInit));
  std::vector<Vector> means;
  means.reserve(K);
  if (cfg.init.kind == InitKind::uniform_box) {
    Vector lo, hi;
    if (cfg.init.box_lower.size() > 0) {
      if (cfg.init.box_lower.size() != d) throw InvalidInput("initial_state: init box dimension");
      lo = cfg.init.box_lower;
      hi = cfg.init.box_upper;
    } else {
      lo = samples.colwise().minCoeff().transpose();
      hi = samples.colwise().maxCoeff().transpose();
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t k = 0; k < K; ++k) {
      Vector m(d);
      for (Eigen::Index j = 0; j < d; ++j) m[j] = lo[j] + (hi[j] - lo[j]) * u(rng);
      means.push_back(m);
    }
  } else {
    const Eigen::Index N = samples.rows();
    std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
    means.push_back(samples.row(pick(rng)).transpose());
    std::vector<double> d2(static_cast<std::size_t>(N), INFINITY);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (means.size() < K) {
      const Vector& last = means.back();
      double total = 0.0;
      for (Eigen::Index i = 0; i < N; ++i) {
        const double v = (samples.row(i).transpose() - last).squaredNorm();
        auto& cur = d2[static_cast<std::size_t>(i)];
        cur = std::min(cur, v);
        total += cur;
      }
      Eigen::Index chosen = 0;
      if (total > 0.0) {
        double target = u(rng) * total;
        chosen = N - 1;
        for (Eigen::Index i = 0; i < N; ++i) {
          target -= d2[static_cast<std::size_t>(i)];
          if (target < 0.0) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = pick(rng);
      }
      means.push_back(samples.row(chosen).transpose());
    }
    lloyd(samples, means, cfg.init.lloyd_iters);
  }
  std::vector<GaussianComponent> comps;
  comps.reserve(K);
  const Matrix S = Matrix::Identity(d, d) / cfg.init.sigma2_init;
  for (auto& m : means) comps.push_back({m, S});
  return MixtureState{Vector::Zero(static_cast<Eigen::Index>(K - 1)), std::move(comps)};
}

FitResult fit(const PointMatrix& samples, std::size_t K, const FitConfig& cfg) {
  cfg.validate();
  return fit(samples, initial_state(samples, K, cfg), cfg);
}

FitResult fit(const PointMatrix& samples, const MixtureState& init, const FitConfig& cfg) {
  cfg.validate();
  if (samples.rows() == 0) throw InvalidInput("fit: empty sample set");
  if (!samples.allFinite()) throw InvalidInput("fit: non-finite sample");
  validate_state(init);
  if (init.dim() != samples.cols()) throw InvalidInput("fit: init dimension mismatch");
  const Domain domain = cfg.domain ? *cfg.domain : default_domain(samples);
  if (domain.dim() != samples.cols()) throw InvalidInput("fit: domain dimension mismatch");

  FitResult res;
  MixtureState state = project_to_bounds(init, cfg.bounds);
  Rng batch_rng(derive_seed(cfg.seed, stream::kBatch));
  PointMatrix batch;
  std::size_t streak = 0;
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    sample_batch(samples, cfg.B, batch_rng, batch);
    const double omega = cfg.schedule.omega(t);
    double rho = cfg.schedule.rho(t);
    if (cfg.schedule.stepsize == StepKind::adaptive_meanshift) {
      PreparedMixture pm(state);
      double total = 0.0;
      for (Eigen::Index i = 0; i < batch.rows(); ++i) {
        total += std::exp(pm.log_mixture(batch.row(i).data()));
      }
      if (!(total > 0.0)) throw StalledPoint("fit: mixture density vanishes on the batch");
      rho = static_cast<double>(batch.rows()) / total;
    }
    EntropyConfig ecfg = cfg.ecfg;
    ecfg.seed = derive_seed(cfg.seed ^ cfg.ecfg.seed, stream::kEntropy, t);
    StepDiagnostics diag;
    MixtureState next =
        step_mixture(state, batch, omega, rho, domain, ecfg, cfg.bounds, cfg.covariance, &diag);
    if (diag.clamped) ++res.clamp_count;
    for (const auto& c : next.components) {
      if (!c.mean.allFinite() || !c.precision.allFinite()) {
        throw NumericFailure("fit: non-finite iterate at t=" + std::to_string(t));
      }
    }
    if (cfg.trajectory_every > 0 && t % cfg.trajectory_every == 0) {
      res.trajectory.push_back(make_snapshot(t, next, omega, rho, batch, domain, ecfg));
      if (!std::isfinite(res.trajectory.back().objective)) {
        throw NumericFailure("fit: non-finite objective at t=" + std::to_string(t));
      }
    }
    res.iterations_run = t;
    bool stop = false;
    if (cfg.early_stop.enabled && t % cfg.early_stop.check_every == 0) {
      streak = converged(state, next, cfg.early_stop) ? streak + 1 : 0;
      stop = streak >= cfg.early_stop.consecutive;
    }
    state = std::move(next);
    if (stop) {
      res.stop_reason = StopReason::early_stop;
      break;
    }
  }
  res.final_state = std::move(state);
  return res;
}

FixedCovResult fit_fixed_cov(const PointMatrix& samples, const Vector& init_mean, double s,
                             const FixedCovConfig& cfg) {
  if (samples.rows() == 0) throw InvalidInput("fit_fixed_cov: empty sample set");
  if (samples.cols() != init_mean.size()) throw InvalidInput("fit_fixed_cov: dimension mismatch");
  if (!(s > 0.0)) throw InvalidInput("fit_fixed_cov: precision must be positive");
  if (cfg.T < 1) throw InvalidInput("fit_fixed_cov: T must be >= 1");
  cfg.schedule.validate();
  FixedCovResult res;
  res.mean = init_mean;
  res.trajectory.push_back(init_mean);
  Rng rng(derive_seed(cfg.seed, stream::kBatch));
  const std::size_t B =
      cfg.B == 0 ? static_cast<std::size_t>(samples.rows()) : cfg.B;
  PointMatrix batch;
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    sample_batch(samples, B, rng, batch);
    const double rho = cfg.schedule.stepsize == StepKind::adaptive_meanshift
                           ? adaptive_step(res.mean, batch, s)
                           : cfg.schedule.rho(t);
    Vector next = step_fixed_cov(res.mean, batch, s, rho);
    const double moved = (next - res.mean).norm();
    res.mean = std::move(next);
    res.trajectory.push_back(res.mean);
    res.iterations_run = t;
    if (moved < cfg.tol) break;
  }
  return res;
}

std::string to_string(TemperatureKind k) {
  switch (k) {
    case TemperatureKind::constant: return "constant";
    case TemperatureKind::power: return "power";
    case TemperatureKind::power_floor: return "power-floor";
  }
  return "constant";
}

std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::robbins_monro: return "robbins-monro";
    case StepKind::temperature_coupled: return "temperature-coupled";
    case StepKind::adaptive_meanshift: return "adaptive-meanshift";
  }
  return "robbins-monro";
}

std::string to_string(CovarianceStructure c) {
  switch (c) {
    case CovarianceStructure::fixed: return "fixed";
    case CovarianceStructure::isotropic: return "isotropic";
    case CovarianceStructure::diagonal: return "diagonal";
    case CovarianceStructure::full: return "full";
  }
  return "full";
}

std::string to_string(InitKind k) {
  return k == InitKind::kmeans_pp ? "kmeans++" : "uniform-box";
}

std::string to_string(StopReason r) {
  return r == StopReason::early_stop ? "early-stop" : "max-iter";
}

TemperatureKind temperature_kind_from_string(const std::string& s) {
  if (s == "constant") return TemperatureKind::constant;
  if (s == "power") return TemperatureKind::power;
  if (s == "power-floor") return TemperatureKind::power_floor;
  throw InvalidInput("unknown temperature schedule: " + s);
}

StepKind step_kind_from_string(const std::string& s) {
  if (s == "robbins-monro") return StepKind::robbins_monro;
  if (s == "temperature-coupled") return StepKind::temperature_coupled;
  if (s == "adaptive-meanshift") return StepKind::adaptive_meanshift;
  throw InvalidInput("unknown step-size schedule: " + s);
}

CovarianceStructure covariance_structure_from_string(const std::string& s) {
  if (s == "fixed") return CovarianceStructure::fixed;
  if (s == "isotropic") return CovarianceStructure::isotropic;
  if (s == "diagonal") return CovarianceStructure::diagonal;
  if (s == "full") return CovarianceStructure::full;
  throw InvalidInput("unknown covariance structure: " + s);
}

InitKind init_kind_from_string(const std::string& s) {
  if (s == "uniform-box") return InitKind::uniform_box;
  if (s == "kmeans++") return InitKind::kmeans_pp;
  throw InvalidInput("unknown init kind: " + s);
}

}  // namespace gerve
