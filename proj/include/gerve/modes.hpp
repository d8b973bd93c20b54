#pragma once

#include "gerve/mixture.hpp"
#include "gerve/optimizer.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gerve {

struct ResolvedMode {
  Vector center;
  double weight = 0.0;
  Matrix covariance;
  std::vector<std::size_t> source_components;  // indices into the fitted state
};

struct PruneMergeConfig {
  double weight_floor = 1e-3;
  // Spread pruning: drop components with eig_max(Sigma) > sigma2_min + beta (sigma2_1 -
  // sigma2_min). Disabled when unset.
  std::optional<double> spread_beta = 0.018;
  double merge_radius = 0.005;

  void validate() const;
};

/// Quantities the spread rule needs: the initial variance sigma2_1 and the lower bound.
struct PruneContext {
  double sigma2_init = 1.0;
  double sigma2_min = 1e-4;
};

/// Removes light or spread-out components and renormalises. The heaviest component
/// always survives. Returns the input unchanged when nothing is removed.
MixtureState prune(const MixtureState& state, const PruneMergeConfig& cfg,
                   const PruneContext& ctx);
std::vector<std::size_t> prune_indices(const MixtureState& state, const PruneMergeConfig& cfg,
                                       const PruneContext& ctx);

/// Single-linkage merge of components whose means lie within `radius` (closed ball),
/// repeated until no two merged centres are within `radius`. Merged components carry the
/// summed weight, the weighted mean and the moment-matched covariance.
MixtureState merge(const MixtureState& state, double radius);
/// Groups of original indices produced by merge(), in output order.
std::vector<std::vector<std::size_t>> merge_groups(const MixtureState& state, double radius);

/// prune, merge, canonical order, then sort by weight (descending, stable).
std::vector<ResolvedMode> resolve_modes(const MixtureState& state, const PruneMergeConfig& cfg,
                                        const PruneContext& ctx);

struct ElbowRow {
  double omega = 0.0;
  std::size_t count_after_prune = 0;
  std::size_t count_after_merge = 0;
};

struct ElbowResult {
  std::vector<ElbowRow> rows;  // in grid order
  double omega_star = 0.0;
  std::size_t star_index = 0;
};

/// Fits at each constant omega (cold start, per-cell seed derived from cfg.seed) and
/// selects the largest omega attaining the maximum merged count.
ElbowResult elbow_scan(const PointMatrix& samples, const std::vector<double>& omega_grid,
                       std::size_t K, const FitConfig& cfg, const PruneMergeConfig& pm,
                       std::size_t threads = 1);

/// argmax responsibility per point, lowest index on ties, -1 where the density vanishes.
std::vector<int> assign_clusters(const MixtureState& state, const PointMatrix& samples);

}  // namespace gerve
