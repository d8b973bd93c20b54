#pragma once

#include "gerve/mixture.hpp"
#include "gerve/objective.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gerve {

enum class TemperatureKind { constant, power, power_floor };
enum class StepKind { robbins_monro, temperature_coupled, adaptive_meanshift };
enum class CovarianceStructure { fixed, isotropic, diagonal, full };

/// Annealing temperatures omega_t and step sizes rho_t (t starts at 1).
struct Schedule {
  TemperatureKind temperature = TemperatureKind::constant;
  double omega1 = 1.0;
  double beta = 1.0;
  double omega_floor = 0.0;

  StepKind stepsize = StepKind::robbins_monro;
  double rho1 = 0.01;
  double alpha = 0.0;  // robbins-monro exponent
  double gamma = 0.0;  // temperature-coupling exponent

  [[nodiscard]] double omega(std::size_t t) const;
  // Step size for non-adaptive kinds. Adaptive step sizes depend on the batch and are
  // computed by the caller.
  [[nodiscard]] double rho(std::size_t t) const;
  /// Constant temperature omega0. A temperature-coupled step becomes the constant
  /// step the coupled schedule takes at omega0.
  [[nodiscard]] Schedule frozen_at(double omega0) const;
  void validate() const;
};

struct EarlyStop {
  bool enabled = false;
  std::size_t check_every = 10;
  double mean_tol = 1e-2;
  double prec_rel_tol = 1e-1;
  std::size_t consecutive = 3;
};

enum class InitKind { uniform_box, kmeans_pp };

/// Initial state: means drawn uniformly in a box (default: data bounding box) or by
/// k-means++ seeding (optionally refined by Lloyd iterations), covariances
/// sigma2_init * I, equal weights.
struct InitConfig {
  InitKind kind = InitKind::uniform_box;
  Vector box_lower;  // empty: data bounding box
  Vector box_upper;
  double sigma2_init = 1.0;
  std::size_t lloyd_iters = 0;  // k-means++ only
};

struct FitConfig {
  std::size_t T = 1000;
  std::size_t B = 1000;
  ParameterBounds bounds;
  Schedule schedule;
  EntropyConfig ecfg;
  // Entropy domain. Empty: the data bounding box widened by 10% per side.
  std::optional<Domain> domain;
  EarlyStop early_stop;
  CovarianceStructure covariance = CovarianceStructure::full;
  InitConfig init;
  std::uint64_t seed = 0;
  std::size_t trajectory_every = 0;  // 0 disables snapshots

  void validate() const;
};

struct Snapshot {
  std::size_t iter = 0;
  std::vector<Vector> means;
  std::vector<double> eigmax_sigma;
  double omega = 0.0;
  double rho = 0.0;
  double objective = 0.0;  // batch data term + omega * entropy estimate
};

enum class StopReason { max_iter, early_stop };

struct FitResult {
  MixtureState final_state;
  std::size_t iterations_run = 0;
  std::vector<Snapshot> trajectory;
  StopReason stop_reason = StopReason::max_iter;
  std::size_t clamp_count = 0;  // steps where a non-PD precision had to be repaired
};

struct StepDiagnostics {
  bool clamped = false;
};

/// One natural-gradient step. Precision is updated first; the mean step uses the
/// updated covariance. The result is projected onto `bounds`.
MixtureState step_mixture(const MixtureState& state, const PointMatrix& batch, double omega,
                          double rho, const Domain& domain, const EntropyConfig& ecfg,
                          const ParameterBounds& bounds,
                          CovarianceStructure structure = CovarianceStructure::full,
                          StepDiagnostics* diag = nullptr);

/// mu + (rho/B) sum_i (X_i - mu) N(X_i; mu, s^-1 I).
Vector step_fixed_cov(const Vector& mean, const PointMatrix& batch, double s, double rho);
/// The normalising step size B / sum_i N(X_i; mu, s^-1 I).
double adaptive_step(const Vector& mean, const PointMatrix& batch, double s);
/// Gaussian-kernel weighted mean with bandwidth h (kernel variance).
Vector mean_shift_step(const Vector& mean, const PointMatrix& samples, double h);

Domain default_domain(const PointMatrix& samples);
MixtureState initial_state(const PointMatrix& samples, std::size_t K, const FitConfig& cfg);

FitResult fit(const PointMatrix& samples, std::size_t K, const FitConfig& cfg);
FitResult fit(const PointMatrix& samples, const MixtureState& init, const FitConfig& cfg);

struct FixedCovConfig {
  std::size_t T = 500;
  std::size_t B = 0;  // 0 or >= N: full batch
  Schedule schedule;  // stepsize adaptive_meanshift gives the mean-shift iteration
  double tol = 0.0;   // stop once a step moves less than this
  std::uint64_t seed = 0;
};

struct FixedCovResult {
  Vector mean;
  std::size_t iterations_run = 0;
  std::vector<Vector> trajectory;  // iterate after each step, starting with init
};

FixedCovResult fit_fixed_cov(const PointMatrix& samples, const Vector& init_mean, double s,
                             const FixedCovConfig& cfg);

std::string to_string(TemperatureKind k);
std::string to_string(StepKind k);
std::string to_string(CovarianceStructure c);
std::string to_string(InitKind k);
std::string to_string(StopReason r);
TemperatureKind temperature_kind_from_string(const std::string& s);
StepKind step_kind_from_string(const std::string& s);
CovarianceStructure covariance_structure_from_string(const std::string& s);
InitKind init_kind_from_string(const std::string& s);

}  // namespace gerve
