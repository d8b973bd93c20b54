#include "gerve/bench.hpp"

#include "gerve/assignment.hpp"
#include "gerve/parallel.hpp"
#include "gerve/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <tuple>

namespace gerve {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Empirical quantile with linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& s, double p) {
  if (s.size() == 1) return s.front();
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

std::vector<Vector> component_means(const MixtureState& s) {
  std::vector<Vector> out;
  for (const auto& c : s.components) out.push_back(c.mean);
  return out;
}

}  // namespace

void MixtureSpec::validate() const {
  if (means.empty()) throw InvalidInput("MixtureSpec: no components");
  if (static_cast<std::size_t>(weights.size()) != means.size() ||
      covariances.size() != means.size()) {
    throw InvalidInput("MixtureSpec: weights/means/covariances length mismatch");
  }
  if ((weights.array() <= 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
    throw InvalidInput("MixtureSpec: weights must be positive and sum to 1");
  }
  const Eigen::Index d = means.front().size();
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != d || covariances[k].rows() != d || covariances[k].cols() != d) {
      throw InvalidInput("MixtureSpec: inconsistent dimensions");
    }
    Eigen::LLT<Matrix> llt(covariances[k]);
    if (llt.info() != Eigen::Success) throw InvalidInput("MixtureSpec: covariance not SPD");
  }
}

MixtureSpec MixtureSpec::triangle(double sigma2) {
  const double c = std::cos(M_PI / 6.0);
  MixtureSpec s;
  s.weights = Vector::Constant(3, 1.0 / 3.0);
  s.means = {Vector(Eigen::Vector2d(0.0, 1.0)), Vector(Eigen::Vector2d(c, -0.5)),
             Vector(Eigen::Vector2d(-c, -0.5))};
  s.covariances.assign(3, sigma2 * Matrix::Identity(2, 2));
  return s;
}

MixtureSpec MixtureSpec::two_blob(double sigma2) {
  MixtureSpec s;
  s.weights = Vector::Constant(2, 0.5);
  s.means = {Vector(Eigen::Vector2d(-1.0, 0.0)), Vector(Eigen::Vector2d(1.0, 0.0))};
  s.covariances.assign(2, sigma2 * Matrix::Identity(2, 2));
  return s;
}

MixtureSpec MixtureSpec::single(const Vector& mean, const Matrix& covariance) {
  MixtureSpec s;
  s.weights = Vector::Ones(1);
  s.means = {mean};
  s.covariances = {covariance};
  return s;
}

PointMatrix gen_mixture_sample(const MixtureSpec& spec, std::size_t N, std::uint64_t seed) {
  spec.validate();
  if (N < 1) throw InvalidInput("gen_mixture_sample: N must be >= 1");
  const Eigen::Index d = spec.dim();
  std::vector<Matrix> chol;
  for (const auto& c : spec.covariances) chol.push_back(Eigen::LLT<Matrix>(c).matrixL());
  std::vector<double> w(spec.weights.data(), spec.weights.data() + spec.weights.size());
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::normal_distribution<double> nd;
  Rng rng(derive_seed(seed, stream::kData));
  PointMatrix X(static_cast<Eigen::Index>(N), d);
  Vector eps(d);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t k = pick(rng);
    for (Eigen::Index j = 0; j < d; ++j) eps[j] = nd(rng);
    X.row(static_cast<Eigen::Index>(i)) = (spec.means[k] + chol[k] * eps).transpose();
  }
  return X;
}

int mode_recovery(const std::vector<Vector>& estimates, const std::vector<Vector>& truth,
                  double eps) {
  if (estimates.empty()) return 0;
  int count = 0;
  for (const auto& u : truth) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : estimates) best = std::min(best, (e - u).norm());
    if (best < eps) ++count;
  }
  return count;
}

double hungarian_sum(const std::vector<Vector>& estimates, const std::vector<Vector>& truth,
                     bool* flagged) {
  if (flagged != nullptr) *flagged = estimates.size() < truth.size();
  if (estimates.empty() || truth.empty()) return 0.0;
  Matrix cost(static_cast<Eigen::Index>(truth.size()),
              static_cast<Eigen::Index>(estimates.size()));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t k = 0; k < estimates.size(); ++k) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          (estimates[k] - truth[i]).norm();
    }
  }
  return hungarian(cost).cost;
}

double nearest_neighbor_sum(const std::vector<Vector>& estimates,
                            const std::vector<Vector>& truth) {
  if (truth.empty()) throw InvalidInput("nearest_neighbor_sum: empty truth");
  double total = 0.0;
  for (const auto& e : estimates) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : truth) best = std::min(best, (e - u).norm());
    total += best;
  }
  return total;
}

std::string to_string(Method m) { return m == Method::mean_shift ? "mean-shift" : "gerve"; }

Method method_from_string(const std::string& s) {
  if (s == "gerve") return Method::gerve;
  if (s == "mean-shift") return Method::mean_shift;
  throw InvalidInput("unknown method: " + s);
}

std::string HyperParams::label(Method m) const {
  char buf[160];
  if (m == Method::mean_shift) {
    std::snprintf(buf, sizeof buf, "h=%.17g", bandwidth);
  } else {
    std::snprintf(buf, sizeof buf, "sigma2_1=%.17g;omega1=%.17g;beta=%.17g;rho1=%.17g;gamma=%.17g",
                  sigma2_init, omega1, beta, rho1, gamma);
  }
  return buf;
}

void BenchConfig::validate() const {
  spec.validate();
  if (methods.empty() || N_grid.empty() || K_grid.empty()) {
    throw InvalidInput("BenchConfig: methods, N grid and K grid must be nonempty");
  }
  if (n_rep < 1) throw InvalidInput("BenchConfig: n_rep must be >= 1");
  for (auto m : methods) {
    if (m == Method::gerve && gerve_grid.empty()) throw InvalidInput("BenchConfig: empty GERVE grid");
    if (m == Method::mean_shift && mean_shift_grid.empty()) {
      throw InvalidInput("BenchConfig: empty mean-shift grid");
    }
  }
  if (!(eps > 0.0)) throw InvalidInput("BenchConfig: eps must be positive");
  for (auto n : N_grid) {
    if (n < 1) throw InvalidInput("BenchConfig: N must be >= 1");
  }
  for (auto k : K_grid) {
    if (k < 1) throw InvalidInput("BenchConfig: K must be >= 1");
  }
}

MetricSummary mean_t_ci(const std::vector<double>& values, const std::string& metric) {
  MetricSummary s{metric, "mean", 0.0, 0.0, 0.0, values.size()};
  if (values.empty()) return s;
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  s.center = s.lo = s.hi = m;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  boost::math::students_t dist(static_cast<double>(values.size() - 1));
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  const double half = q * sd / std::sqrt(static_cast<double>(values.size()));
  s.lo = m - half;
  s.hi = m + half;
  return s;
}

MetricSummary median_bootstrap_ci(const std::vector<double>& values, const std::string& metric,
                                  std::size_t n_resamples, std::uint64_t seed) {
  MetricSummary s{metric, "median", 0.0, 0.0, 0.0, values.size()};
  if (values.empty()) return s;
  s.center = s.lo = s.hi = median_of(values);
  if (values.size() < 2 || n_resamples == 0) return s;
  Rng rng(derive_seed(seed, stream::kResample));
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> meds(n_resamples), draw(values.size());
  for (std::size_t b = 0; b < n_resamples; ++b) {
    for (auto& x : draw) x = values[pick(rng)];
    meds[b] = median_of(draw);
  }
  std::sort(meds.begin(), meds.end());
  s.lo = quantile_sorted(meds, 0.025);
  s.hi = quantile_sorted(meds, 0.975);
  return s;
}

std::vector<Vector> mean_shift_modes(const PointMatrix& samples, std::size_t K, double bandwidth,
                                     std::size_t T, std::size_t B, double collapse_radius,
                                     std::uint64_t seed) {
  if (!(bandwidth > 0.0)) throw InvalidInput("mean_shift_modes: bandwidth must be positive");
  const Eigen::Index N = samples.rows();
  Rng rng(derive_seed(seed, stream::kInit));
  std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
  std::vector<Vector> finals;
  FixedCovConfig fc;
  fc.T = T;
  fc.B = B;
  fc.schedule.stepsize = StepKind::adaptive_meanshift;
  for (std::size_t k = 0; k < K; ++k) {
    const Vector init = samples.row(pick(rng)).transpose();
    fc.seed = derive_seed(seed, stream::kBatch, k);
    try {
      finals.push_back(fit_fixed_cov(samples, init, 1.0 / bandwidth, fc).mean);
    } catch (const StalledPoint&) {
      finals.push_back(init);
    }
  }
  std::vector<Vector> kept;
  for (const auto& f : finals) {
    bool dup = false;
    for (const auto& k : kept) dup = dup || (f - k).norm() < collapse_radius;
    if (!dup) kept.push_back(f);
  }
  return kept;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  struct Job {
    Method method;
    std::size_t n_idx, K, hyper, rep;
  };
  std::vector<Job> jobs;
  for (auto m : cfg.methods) {
    const auto& grid = m == Method::gerve ? cfg.gerve_grid : cfg.mean_shift_grid;
    for (std::size_t ni = 0; ni < cfg.N_grid.size(); ++ni) {
      for (auto K : cfg.K_grid) {
        for (std::size_t h = 0; h < grid.size(); ++h) {
          for (std::size_t r = 0; r < cfg.n_rep; ++r) jobs.push_back({m, ni, K, h, r});
        }
      }
    }
  }

  BenchResult res;
  res.records.resize(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::size_t N = cfg.N_grid[job.n_idx];
    BenchRecord& rec = res.records[j];
    rec.method = job.method;
    rec.N = N;
    rec.K = job.K;
    rec.hyper_index = job.hyper;
    rec.rep = job.rep;
    // Same data for every method and setting at a given (N, rep).
    const PointMatrix X =
        gen_mixture_sample(cfg.spec, N, derive_seed(cfg.seed, stream::kData, job.n_idx * 1000003 + job.rep));
    const std::uint64_t fit_seed = derive_seed(cfg.seed, stream::kCell, j);
    try {
      std::vector<Vector> est;
      if (job.method == Method::gerve) {
        const HyperParams& hp = cfg.gerve_grid[job.hyper];
        FitConfig fc = cfg.fit;
        fc.schedule.temperature = TemperatureKind::power;
        fc.schedule.omega1 = hp.omega1;
        fc.schedule.beta = hp.beta;
        fc.schedule.stepsize = StepKind::temperature_coupled;
        fc.schedule.rho1 = hp.rho1;
        fc.schedule.gamma = hp.gamma;
        fc.init.sigma2_init = hp.sigma2_init;
        fc.seed = fit_seed;
        fc.trajectory_every = 0;
        est = component_means(fit(X, job.K, fc).final_state);
      } else {
        const HyperParams& hp = cfg.mean_shift_grid[job.hyper];
        est = mean_shift_modes(X, job.K, hp.bandwidth, cfg.mean_shift_T, cfg.mean_shift_B,
                               cfg.eps, fit_seed);
      }
      rec.mr = mode_recovery(est, cfg.spec.means, cfg.eps);
      rec.hm = hungarian_sum(est, cfg.spec.means, &rec.hm_flagged);
      rec.nn = nearest_neighbor_sum(est, cfg.spec.means);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });

  // Aggregate per cell in job order.
  std::map<std::tuple<int, std::size_t, std::size_t, std::size_t>, std::size_t> cell_of;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto key = std::make_tuple(static_cast<int>(jobs[j].method), jobs[j].n_idx, jobs[j].K,
                                     jobs[j].hyper);
    auto it = cell_of.find(key);
    if (it == cell_of.end()) {
      it = cell_of.emplace(key, members.size()).first;
      members.emplace_back();
      CellSummary cs;
      cs.method = jobs[j].method;
      cs.N = cfg.N_grid[jobs[j].n_idx];
      cs.K = jobs[j].K;
      cs.hyper_index = jobs[j].hyper;
      const auto& grid = cs.method == Method::gerve ? cfg.gerve_grid : cfg.mean_shift_grid;
      cs.hyper_label = grid[cs.hyper_index].label(cs.method);
      res.cells.push_back(cs);
    }
    members[it->second].push_back(j);
  }
  for (std::size_t c = 0; c < res.cells.size(); ++c) {
    std::vector<double> mr, hm, nn;
    for (auto j : members[c]) {
      const auto& r = res.records[j];
      if (r.failed) {
        ++res.cells[c].failures;
        continue;
      }
      mr.push_back(r.mr);
      hm.push_back(r.hm);
      nn.push_back(r.nn);
    }
    res.cells[c].metrics = {
        mean_t_ci(mr, "MR"),
        median_bootstrap_ci(hm, "HM", cfg.n_ci_resamples, derive_seed(cfg.seed, stream::kCell, c)),
        mean_t_ci(nn, "NN")};
  }

  // Best setting per (method, N, K) and metric: MR maximised, HM and NN minimised.
  for (std::size_t mi = 0; mi < 3; ++mi) {
    std::map<std::tuple<int, std::size_t, std::size_t>, std::size_t> best_of;
    for (std::size_t c = 0; c < res.cells.size(); ++c) {
      const auto& cs = res.cells[c];
      if (cs.metrics[mi].n == 0) continue;
      const auto key = std::make_tuple(static_cast<int>(cs.method), cs.N, cs.K);
      auto it = best_of.find(key);
      if (it == best_of.end()) {
        best_of.emplace(key, c);
        continue;
      }
      const double cur = res.cells[it->second].metrics[mi].center;
      const double cand = cs.metrics[mi].center;
      if (mi == 0 ? cand > cur : cand < cur) it->second = c;
    }
    for (const auto& [key, c] : best_of) {
      const auto& cs = res.cells[c];
      res.best.push_back({cs.method, cs.N, cs.K, cs.metrics[mi].metric, cs.hyper_index,
                          cs.metrics[mi]});
    }
  }
  return res;
}

}  // namespace gerve
