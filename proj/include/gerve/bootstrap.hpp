#pragma once

#include "gerve/modes.hpp"
#include "gerve/optimizer.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gerve {

/// Per-axis affine map x -> scale * (x - offset), used to report ellipses in metric units.
struct AxisAffine {
  Vector offset;
  Vector scale;

  [[nodiscard]] Vector apply(const Vector& x) const;
};

struct BootstrapConfig {
  std::size_t L = 100;
  double omega0 = 1.0;
  double eta = 0.35;
  double tau_min = 0.08;
  double tau_max = 0.22;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Refit on the original sample instead of a resample (testing hook).
  bool resample = true;
  std::optional<AxisAffine> metric;

  void validate() const;
};

struct Ellipse {
  Vector center;
  double a = 0.0;  // semi-major
  double b = 0.0;  // semi-minor
  double angle_deg = 0.0;
  Matrix covariance;  // empirical covariance of the matched centres
};

struct BootstrapReport {
  std::vector<ResolvedMode> baseline;
  // matches[k][j]: j-th matched replicate centre for baseline mode k (data units).
  std::vector<std::vector<Vector>> matches;
  Vector stability;
  std::vector<std::optional<Ellipse>> ellipses;
  std::vector<std::string> ellipse_status;  // "ok" or the reason no ellipse was formed
  std::vector<std::size_t> replicate_mode_counts;
  std::size_t L = 0;
  std::string diagnostic;
};

/// z-scoring frame from the baseline centres: per-axis mean and std. A single centre
/// (or no spread at all) gives std 1; otherwise each axis std is floored at
/// kMaxAnisotropy times the largest one.
struct ZFrame {
  static constexpr double kMaxAnisotropy = 0.5;
  Vector mean;
  Vector std;

  [[nodiscard]] Vector apply(const Vector& x) const;
  static ZFrame from_centres(const std::vector<Vector>& centres);
};

/// tau_k = clamp(eta * nn_k, tau_min, tau_max); a lone centre gets tau_max.
std::vector<double> adaptive_gates(const std::vector<Vector>& centres, double eta,
                                   double tau_min, double tau_max);

/// Hungarian assignment on Euclidean distances, then gate rejection. Entry k holds the
/// index of the replicate centre matched to baseline k, if any.
std::vector<std::optional<std::size_t>> match_modes(const std::vector<Vector>& baseline,
                                                    const std::vector<Vector>& replicate,
                                                    const std::vector<double>& gates);

/// s_k = matched_counts[k] / L.
Vector stability_scores(const std::vector<std::size_t>& matched_counts, std::size_t L);

/// 2-D ellipse at level 1 - alpha from the empirical covariance of `points`, centred at
/// `center` (default: the point mean).
Ellipse confidence_ellipse(const std::vector<Vector>& points, double alpha,
                           const std::optional<Vector>& center = std::nullopt);

/// chi-square quantile with 2 degrees of freedom at level 1 - alpha.
double chi2_2dof_quantile(double alpha);

BootstrapReport bootstrap_uq(const PointMatrix& samples, std::size_t K, const FitConfig& fit_cfg,
                             const PruneMergeConfig& pm, const BootstrapConfig& bcfg);

}  // namespace gerve
