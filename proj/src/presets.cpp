#include "gerve/presets.hpp"

namespace gerve {

Preset triangle_cluster_preset(std::size_t K) {
  Preset p;
  p.name = "triangle-cluster";
  p.K = K;
  FitConfig& f = p.fit;
  f.T = 40000;
  f.B = 1000;
  f.schedule.temperature = TemperatureKind::power_floor;
  f.schedule.omega1 = 50.0;
  f.schedule.beta = 1.1;
  f.schedule.omega_floor = 0.004;
  f.schedule.stepsize = StepKind::temperature_coupled;
  f.schedule.rho1 = 1e-4;
  f.schedule.gamma = 0.7;
  f.bounds.mu_max = 3.0;
  f.bounds.sigma2_min = 0.05;
  f.bounds.sigma2_max = 4.0;
  f.bounds.v_max = 6.0;
  f.init.kind = InitKind::uniform_box;
  f.init.box_lower = Vector::Constant(2, -2.0);
  f.init.box_upper = Vector::Constant(2, 0.0);
  f.init.sigma2_init = 2.0;
  p.prune.weight_floor = 1e-3;
  p.prune.spread_beta.reset();
  p.prune.merge_radius = 0.1;
  p.bootstrap.omega0 = 0.004;
  p.omega_grid = {1.0, 0.3, 0.1, 0.03, 0.01, 0.004};
  return p;
}

Preset triangle_modes_preset(std::size_t K) {
  Preset p;
  p.name = "triangle-modes";
  p.K = K;
  FitConfig& f = p.fit;
  f.T = 4000;
  f.B = 1000;
  f.schedule.temperature = TemperatureKind::power;
  f.schedule.omega1 = 50.0;
  f.schedule.beta = 1.1;
  f.schedule.stepsize = StepKind::temperature_coupled;
  f.schedule.rho1 = 0.03;
  f.schedule.gamma = 0.3;
  f.bounds.mu_max = 3.0;
  f.bounds.sigma2_min = 0.05;
  f.bounds.sigma2_max = 4.0;
  f.bounds.v_max = 6.0;
  f.init.sigma2_init = 0.2;
  p.prune.weight_floor = 1e-3;
  p.prune.spread_beta.reset();
  p.prune.merge_radius = 0.05;
  p.omega_grid = {10.0, 3.0, 1.0, 0.3, 0.1};
  return p;
}

Preset hotspot_preset() {
  Preset p;
  p.name = "hotspot";
  p.K = 20;
  FitConfig& f = p.fit;
  f.T = 3000;
  f.B = 1000;
  f.schedule.temperature = TemperatureKind::constant;
  f.schedule.omega1 = 1.0;
  f.schedule.stepsize = StepKind::robbins_monro;
  f.schedule.rho1 = 0.01;
  f.schedule.alpha = 0.1;
  f.ecfg.n_entropy_samples = 100;
  f.bounds.mu_max = 2.05;
  f.bounds.sigma2_min = 1e-5;
  f.bounds.sigma2_max = 1e-2;
  f.bounds.v_max = 6.0;
  f.domain = Domain::cube(2, -2.05, 2.05);
  f.early_stop.enabled = false;
  f.early_stop.check_every = 10;
  f.early_stop.mean_tol = 1e-2;
  f.early_stop.prec_rel_tol = 1e-1;
  f.early_stop.consecutive = 3;
  f.init.kind = InitKind::kmeans_pp;
  f.init.sigma2_init = 5e-3;
  p.prune.weight_floor = 1e-3;
  p.prune.spread_beta = 0.018;
  p.prune.merge_radius = 0.005;
  p.bootstrap.L = 500;
  p.bootstrap.omega0 = 1.0;
  p.omega_grid = {10.0, 3.0, 1.0, 0.3, 0.1};
  return p;
}

Preset two_blob_preset() {
  Preset p;
  p.name = "two-blob";
  p.K = 4;
  FitConfig& f = p.fit;
  f.T = 2000;
  f.B = 1000;
  f.schedule.temperature = TemperatureKind::power;
  f.schedule.omega1 = 10.0;
  f.schedule.beta = 1.1;
  f.schedule.stepsize = StepKind::temperature_coupled;
  f.schedule.rho1 = 0.03;
  f.schedule.gamma = 0.3;
  f.bounds.mu_max = 3.0;
  f.bounds.sigma2_min = 0.005;
  f.bounds.sigma2_max = 4.0;
  f.bounds.v_max = 6.0;
  f.init.sigma2_init = 0.2;
  p.prune.weight_floor = 1e-3;
  p.prune.spread_beta = 0.018;
  p.prune.merge_radius = 0.2;
  p.bootstrap.omega0 = 0.3;
  p.omega_grid = {3.0, 1.0, 0.3, 0.1};
  return p;
}

std::vector<std::string> preset_names() {
  return {"triangle-cluster", "triangle-modes", "hotspot", "two-blob"};
}

Preset preset_by_name(const std::string& name) {
  if (name == "triangle-cluster") return triangle_cluster_preset();
  if (name == "triangle-modes") return triangle_modes_preset();
  if (name == "hotspot") return hotspot_preset();
  if (name == "two-blob") return two_blob_preset();
  throw InvalidInput("unknown preset: " + name);
}

std::vector<HyperParams> full_gerve_grid() {
  std::vector<HyperParams> grid;
  for (double s2 : {0.1, 0.2}) {
    for (double w1 : {10.0, 50.0}) {
      for (double b : {1.1, 1.3, 1.5}) {
        for (double r : {0.01, 0.03, 0.1}) {
          for (double g : {0.2, 0.3, 0.4}) {
            HyperParams h;
            h.sigma2_init = s2;
            h.omega1 = w1;
            h.beta = b;
            h.rho1 = r;
            h.gamma = g;
            grid.push_back(h);
          }
        }
      }
    }
  }
  return grid;
}

std::vector<HyperParams> full_mean_shift_grid() {
  std::vector<HyperParams> grid;
  for (double h : {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    HyperParams hp;
    hp.bandwidth = h;
    grid.push_back(hp);
  }
  return grid;
}

BenchConfig triangle_bench_config(const std::vector<std::size_t>& N_grid,
                                  const std::vector<std::size_t>& K_grid, std::size_t n_rep) {
  const Preset p = triangle_modes_preset();
  BenchConfig c;
  c.spec = MixtureSpec::triangle(0.1);
  c.methods = {Method::gerve};
  c.N_grid = N_grid;
  c.K_grid = K_grid;
  HyperParams hp;
  hp.sigma2_init = p.fit.init.sigma2_init;
  hp.omega1 = p.fit.schedule.omega1;
  hp.beta = p.fit.schedule.beta;
  hp.rho1 = p.fit.schedule.rho1;
  hp.gamma = p.fit.schedule.gamma;
  c.gerve_grid = {hp};
  HyperParams ms;
  ms.bandwidth = 0.05;
  c.mean_shift_grid = {ms};
  c.n_rep = n_rep;
  c.eps = 0.05;
  c.fit = p.fit;
  return c;
}

}  // namespace gerve
