#pragma once

#include "gerve/modes.hpp"
#include "gerve/optimizer.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gerve {

struct MixtureSpec {
  Vector weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;

  void validate() const;
  [[nodiscard]] Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }

  /// Equal-weight isotropic mixture on the nodes of an equilateral triangle.
  static MixtureSpec triangle(double sigma2);
  /// Two equal-weight isotropic blobs at (-1, 0) and (1, 0).
  static MixtureSpec two_blob(double sigma2);
  static MixtureSpec single(const Vector& mean, const Matrix& covariance);
};

PointMatrix gen_mixture_sample(const MixtureSpec& spec, std::size_t N, std::uint64_t seed);

/// Number of truth points with an estimate strictly closer than eps.
int mode_recovery(const std::vector<Vector>& estimates, const std::vector<Vector>& truth,
                  double eps);
/// Minimum total distance over injections truth -> estimates. With fewer estimates than
/// truth points the assignment runs over the smaller side and `flagged` is set.
double hungarian_sum(const std::vector<Vector>& estimates, const std::vector<Vector>& truth,
                     bool* flagged = nullptr);
/// sum over estimates of the distance to the nearest truth point.
double nearest_neighbor_sum(const std::vector<Vector>& estimates,
                            const std::vector<Vector>& truth);

enum class Method { gerve, mean_shift };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// One hyperparameter setting. GERVE reads sigma2_init/omega1/beta/rho1/gamma;
/// mean-shift reads bandwidth.
struct HyperParams {
  double sigma2_init = 0.2;
  double omega1 = 10.0;
  double beta = 1.3;
  double rho1 = 0.03;
  double gamma = 0.3;
  double bandwidth = 0.05;

  [[nodiscard]] std::string label(Method m) const;
};

struct BenchConfig {
  MixtureSpec spec;
  std::vector<Method> methods{Method::gerve};
  std::vector<std::size_t> N_grid;
  std::vector<std::size_t> K_grid;
  std::vector<HyperParams> gerve_grid;
  std::vector<HyperParams> mean_shift_grid;
  std::size_t n_rep = 20;
  std::uint64_t seed = 0;
  double eps = 0.05;
  FitConfig fit;             // T, B, bounds, entropy settings; schedule comes from the grid
  std::size_t mean_shift_T = 200;
  std::size_t mean_shift_B = 1000;
  std::size_t threads = 1;
  std::size_t n_ci_resamples = 5000;

  void validate() const;
};

struct BenchRecord {
  Method method = Method::gerve;
  std::size_t N = 0;
  std::size_t K = 0;
  std::size_t hyper_index = 0;
  std::size_t rep = 0;
  double mr = 0.0;
  double hm = 0.0;
  double nn = 0.0;
  bool hm_flagged = false;
  bool failed = false;
  std::string error;
};

struct MetricSummary {
  std::string metric;  // "MR", "HM" or "NN"
  std::string statistic;  // "mean" or "median"
  double center = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

struct CellSummary {
  Method method = Method::gerve;
  std::size_t N = 0;
  std::size_t K = 0;
  std::size_t hyper_index = 0;
  std::string hyper_label;
  std::vector<MetricSummary> metrics;
  std::size_t failures = 0;
};

struct BestSelection {
  Method method = Method::gerve;
  std::size_t N = 0;
  std::size_t K = 0;
  std::string metric;
  std::size_t hyper_index = 0;
  MetricSummary summary;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<CellSummary> cells;
  std::vector<BestSelection> best;
};

/// Mean with a two-sided 95% Student-t interval.
MetricSummary mean_t_ci(const std::vector<double>& values, const std::string& metric);
/// Median with a 95% bootstrap-percentile interval from `n_resamples` resamples.
MetricSummary median_bootstrap_ci(const std::vector<double>& values, const std::string& metric,
                                  std::size_t n_resamples, std::uint64_t seed);

/// Mean-shift baseline: fixed-covariance GERVE with the normalising step from each of K
/// initial points, duplicates within `collapse_radius` collapsed.
std::vector<Vector> mean_shift_modes(const PointMatrix& samples, std::size_t K, double bandwidth,
                                     std::size_t T, std::size_t B, double collapse_radius,
                                     std::uint64_t seed);

BenchResult run_benchmark(const BenchConfig& cfg);

}  // namespace gerve
