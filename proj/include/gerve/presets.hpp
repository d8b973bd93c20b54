#pragma once

#include "gerve/bench.hpp"
#include "gerve/bootstrap.hpp"
#include "gerve/modes.hpp"
#include "gerve/optimizer.hpp"

#include <string>
#include <vector>

namespace gerve {

/// A complete, named run configuration.
struct Preset {
  std::string name;
  std::size_t K = 3;
  FitConfig fit;
  PruneMergeConfig prune;
  BootstrapConfig bootstrap;
  std::vector<double> omega_grid;  // elbow scan, descending
};

/// Overcomplete clustering of the triangle mixture: means start in [-2,0]^2 with
/// covariance 2I, omega_t = 50/t^1.1 + 0.004, rho_t = 1e-4 (50/omega_t)^0.7.
Preset triangle_cluster_preset(std::size_t K = 7);

/// Mode estimation on the triangle mixture (T = 4000, B = 1000, power-law annealing).
Preset triangle_modes_preset(std::size_t K = 3);

/// Hotspot workflow on normalised coordinates: K = 20, k-means++ init, constant
/// omega = 1, rho_t = 0.01 t^-0.1, spread pruning. Early-stopping tolerances are set
/// but the rule is off.
Preset hotspot_preset();

/// Two separated blobs; small overcomplete mixture, bootstrap at omega0 = 0.3.
Preset two_blob_preset();

std::vector<std::string> preset_names();
Preset preset_by_name(const std::string& name);

/// Benchmark configuration for the triangle consistency study.
BenchConfig triangle_bench_config(const std::vector<std::size_t>& N_grid,
                                  const std::vector<std::size_t>& K_grid, std::size_t n_rep);

/// The GERVE and mean-shift hyperparameter grids used for grid search.
std::vector<HyperParams> full_gerve_grid();
std::vector<HyperParams> full_mean_shift_grid();

}  // namespace gerve
