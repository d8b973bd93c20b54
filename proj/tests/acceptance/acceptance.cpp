// Acceptance runner. Prints one PASS/FAIL line per criterion and exits nonzero on any
// failure. Pass criterion numbers as arguments to run a subset.

#include "../unit/helpers.hpp"

#include "gerve/assignment.hpp"
#include "gerve/bench.hpp"
#include "gerve/bootstrap.hpp"
#include "gerve/cli.hpp"
#include "gerve/io.hpp"
#include "gerve/modes.hpp"
#include "gerve/objective.hpp"
#include "gerve/optimizer.hpp"
#include "gerve/presets.hpp"
#include "gerve/random.hpp"
#include "gerve/serialize.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gerve;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- C1

Outcome c1_mean_shift() {
  Rng rng(101);
  std::uniform_real_distribution<double> uh(0.1, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = std::array{1, 2, 5}[trial % 3];
    const PointMatrix x = test::random_points(500, d, rng, 1.5);
    const PointMatrix m0 = test::random_points(1, d, rng);
    const Vector mu = m0.row(0).transpose();
    const double h = uh(rng);
    const double rho = adaptive_step(mu, x, 1.0 / h);
    const Vector a = step_fixed_cov(mu, x, 1.0 / h, rho);
    const Vector b = mean_shift_step(mu, x, h);
    worst = std::max(worst, (a - b).norm() / std::max(1.0, b.norm()));
  }
  return {worst <= 1e-12, fmt("max relative difference %.3g over 50 triples", worst)};
}

// ---------------------------------------------------------------- C2

Outcome c2_entropy_oracle() {
  Rng rng(202);
  bool ok = true;
  double worst_z = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const Matrix cov = test::random_spd(d, rng, 0.3, 2.0);
    const Vector mu = test::random_points(1, d, rng).row(0).transpose();
    const MixtureState s{Vector(0), {GaussianComponent::from_covariance(mu, cov)}};
    const double half = 12.0 * std::sqrt(cov.diagonal().maxCoeff());
    const Domain dom{(mu.array() - half).matrix(), (mu.array() + half).matrix()};
    const EntropyConfig e{100000, static_cast<std::uint64_t>(10 + d)};

    const EntropyEstimate h = entropy_mc_estimate(s, dom, e);
    const double exact = 0.5 * std::log((2.0 * M_PI * M_E * cov).determinant());
    const double zh = std::abs(h.value - exact) / h.standard_error;
    worst_z = std::max(worst_z, zh);
    ok = ok && zh <= 3.0;

    GradientBundle se;
    const GradientBundle g = entropy_gradients(s, dom, e, &se);
    const Matrix target = 0.5 * cov.inverse();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double z = std::abs(g.eta[0](i, j) - target(i, j)) / se.eta[0](i, j);
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 3.0;
      }
    }
  }
  return {ok, fmt("largest deviation %.2f SE (entropy and covariance gradient, d = 1..3)",
                  worst_z)};
}

// ---------------------------------------------------------------- C3

Outcome c3_finite_differences() {
  Rng rng(303);
  double worst_data = 0.0, worst_full = 0.0;
  const double omega = 0.5;
  int n_dir = 0;
  for (int st = 0; st < 4; ++st) {
    const int d = 1 + st % 2;
    const MixtureState s = test::random_state(3, d, rng);
    const PointMatrix x = test::random_points(300, d, rng, 1.5);
    const Domain dom = Domain::cube(d, -4.0, 4.0);
    const EntropyConfig e{100000, static_cast<std::uint64_t>(40 + st)};
    const GradientBundle gd = data_gradients(s, x);
    const GradientBundle ge = entropy_gradients(s, dom, e);
    for (int k = 0; k < 5; ++k, ++n_dir) {
      const test::Direction dir = test::random_direction(s, rng);
      const double h = 1e-5;
      const MixtureState sp = test::perturb(s, dir, h);
      const MixtureState sm = test::perturb(s, dir, -h);

      const double an_data = test::project(gd, dir, false);
      const double fd_data = (data_term(sp, x) - data_term(sm, x)) / (2.0 * h);
      worst_data = std::max(worst_data, std::abs(fd_data - an_data) / std::abs(an_data));

      const double an = an_data + omega * test::project(ge, dir, true);
      const double fd = (empirical_objective(sp, x, omega, dom, e, &s) -
                         empirical_objective(sm, x, omega, dom, e, &s)) /
                        (2.0 * h);
      worst_full = std::max(worst_full, std::abs(fd - an) / std::abs(an));
    }
  }
  return {worst_data <= 1e-5 && worst_full <= 1e-2,
          fmt("%d directions: data-term rel. error %.2g, full objective rel. error %.2g",
              n_dir, worst_data, worst_full)};
}

// ---------------------------------------------------------------- C4

double brute_assignment(const Matrix& c) {
  if (c.rows() > c.cols()) return brute_assignment(c.transpose());
  // rows <= cols: each row takes a distinct column.
  std::vector<int> cols(static_cast<std::size_t>(c.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = INFINITY;
  do {
    double v = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) v += c(i, cols[static_cast<std::size_t>(i)]);
    best = std::min(best, v);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

Outcome c4_hungarian() {
  Rng rng(404);
  std::uniform_int_distribution<int> dim(1, 7), entry(0, 50);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = dim(rng), n = dim(rng);
    Matrix c(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) c(i, j) = entry(rng);
    }
    const Assignment a = hungarian(c);
    double used = 0.0;
    std::set<int> seen;
    int matched = 0;
    for (int i = 0; i < m; ++i) {
      const int j = a.row_to_col[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      used += c(i, j);
      seen.insert(j);
      ++matched;
    }
    const bool valid = matched == std::min(m, n) && static_cast<int>(seen.size()) == matched;
    if (!valid || a.cost != brute_assignment(c) || used != a.cost) ++mismatches;
  }
  return {mismatches == 0, fmt("%d/200 matrices disagree with brute force", mismatches)};
}

// ---------------------------------------------------------------- C5

Outcome c5_triangle_trend() {
  BenchConfig c = triangle_bench_config({1024, 4096, 16384}, {3}, 20);
  c.seed = 505;
  const BenchResult r = run_benchmark(c);
  std::vector<double> med;
  double mr_last = 0.0;
  std::string detail = "median HM:";
  int failures = 0;
  for (std::size_t N : c.N_grid) {
    std::vector<double> hm, mr;
    for (const auto& rec : r.records) {
      if (rec.N != N) continue;
      if (rec.failed) ++failures;
      hm.push_back(rec.hm);
      mr.push_back(rec.mr);
    }
    med.push_back(median(hm));
    mr_last = std::accumulate(mr.begin(), mr.end(), 0.0) / static_cast<double>(mr.size());
    detail += fmt(" N=%zu %.4f", N, med.back());
  }
  const bool decreasing = med[0] > med[1] && med[1] > med[2];
  detail += fmt("; mean MR at N=16384 %.2f; failed fits %d", mr_last, failures);
  return {decreasing && mr_last >= 2.5, detail};
}

// ---------------------------------------------------------------- C6

Outcome c6_overspecified() {
  const MixtureSpec spec = MixtureSpec::triangle(0.25);
  int three = 0;
  std::string counts;
  for (int r = 0; r < 20; ++r) {
    Preset p = triangle_cluster_preset(7);
    const PointMatrix x = gen_mixture_sample(spec, 6000, derive_seed(606, stream::kData, r));
    p.fit.seed = derive_seed(606, stream::kCell, r);
    const FitResult f = fit(x, p.K, p.fit);
    const auto modes = resolve_modes(f.final_state, p.prune,
                                     PruneContext{p.fit.init.sigma2_init, p.fit.bounds.sigma2_min});
    three += modes.size() == 3;
    counts += std::to_string(modes.size());
  }
  return {three >= 16, fmt("%d/20 runs resolve 3 modes (counts %s)", three, counts.c_str())};
}

// ---------------------------------------------------------------- C7

Outcome c7_bootstrap_calibration() {
  const MixtureSpec pop = MixtureSpec::single(Vector::Zero(2), Matrix::Identity(2, 2));
  FitConfig f;
  f.T = 60;
  f.B = 2000;
  f.schedule.temperature = TemperatureKind::constant;
  f.schedule.omega1 = 0.5 / (2.0 * M_PI * 2.25);
  f.schedule.stepsize = StepKind::robbins_monro;
  f.schedule.rho1 = 10.0;
  f.schedule.alpha = 0.0;
  f.ecfg.n_entropy_samples = 1000;
  f.bounds.sigma2_min = 1e-3;
  f.init.sigma2_init = 0.5;
  PruneMergeConfig pm;
  pm.spread_beta.reset();
  BootstrapConfig b;
  b.L = 200;
  b.omega0 = f.schedule.omega1;

  const double crit = chi2_2dof_quantile(0.05);
  int covered = 0, no_ellipse = 0;
  for (int r = 0; r < 100; ++r) {
    const PointMatrix x = gen_mixture_sample(pop, 2000, derive_seed(700, stream::kData, r));
    f.seed = derive_seed(700, stream::kCell, r);
    b.seed = f.seed;
    const BootstrapReport rep = bootstrap_uq(x, 1, f, pm, b);
    if (rep.ellipses.empty() || !rep.ellipses[0]) {
      ++no_ellipse;
      continue;
    }
    const Ellipse& e = *rep.ellipses[0];
    const Vector dv = -e.center;
    covered += dv.dot(e.covariance.ldlt().solve(dv)) <= crit;
  }
  return {covered >= 85 && covered <= 100,
          fmt("%d/100 ellipses cover the true mode (%d without an ellipse)", covered,
              no_ellipse)};
}

// ---------------------------------------------------------------- C8

Outcome c8_stability_concentration() {
  MixtureSpec spec;
  const double w3 = 0.1;
  spec.weights = test::vec({(1.0 - w3) / 2.0, (1.0 - w3) / 2.0, w3});
  spec.means = {test::vec({-1.0, 0.0}), test::vec({1.0, 0.0}), test::vec({0.0, 1.0})};
  spec.covariances.assign(3, Matrix::Identity(2, 2) * 0.05);
  const PointMatrix x = gen_mixture_sample(spec, 1000, 11);

  Preset p = two_blob_preset();
  p.fit.T = 600;
  p.fit.seed = 5;
  BootstrapConfig bc = p.bootstrap;
  bc.L = 200;
  bc.omega0 = 0.1;

  const std::size_t suites = 20;
  std::vector<Vector> baseline;
  std::vector<std::vector<double>> scores;
  bool same_baseline = true;
  for (std::size_t s = 0; s < suites; ++s) {
    bc.seed = derive_seed(900, stream::kReplicate, s);
    const BootstrapReport r = bootstrap_uq(x, p.K, p.fit, p.prune, bc);
    if (s == 0) {
      for (const auto& m : r.baseline) baseline.push_back(m.center);
      scores.resize(baseline.size());
    } else if (r.baseline.size() != baseline.size()) {
      same_baseline = false;
      break;
    } else {
      for (std::size_t k = 0; k < baseline.size(); ++k) {
        same_baseline = same_baseline && r.baseline[k].center == baseline[k];
      }
    }
    for (std::size_t k = 0; k < baseline.size(); ++k) scores[k].push_back(r.stability[static_cast<Eigen::Index>(k)]);
  }
  if (!same_baseline || baseline.empty()) return {false, "baseline modes differ between suites"};

  // Two-sided Hoeffding at level 0.05 bounds each suite's deviation from the conditional
  // mean; the spread across suites is at most twice that.
  const double envelope = 2.0 * std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(bc.L)));
  std::size_t inside = 0;
  std::string detail;
  for (const auto& v : scores) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    inside += (*hi - *lo) <= envelope;
    detail += fmt(" [%.3f, %.3f]", *lo, *hi);
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(scores.size());
  return {frac >= 0.95, fmt("%zu/%zu modes within envelope %.4f; s ranges", inside,
                            scores.size(), envelope) +
                            detail};
}

// ---------------------------------------------------------------- CLI helpers

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gerve");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gerve_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

// ---------------------------------------------------------------- C9

std::vector<std::string> urban_data_args() {
  return {"--data",      std::string(GERVE_TEST_DATA_DIR) + "/urban_points.csv",
          "--columns",   "longitude,latitude",
          "--filter",    "longitude:-0.54:0.33",
          "--filter",    "latitude:51.28:51.70",
          "--normalise", "--window",
          "-0.54,51.28,0.33,51.70",
          "--pad-ratio", "0.001",
          "--preset",    "hotspot"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

bool finite_matrix(const Json& m) {
  for (const auto& row : m) {
    for (const auto& v : row) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) return false;
    }
  }
  return true;
}

Outcome c9_hotspot_smoke() {
  const fs::path root = scratch("hotspot");
  write_file(root / "cfg.json", R"({"fit": {"T": 2000}})");
  const std::string cfg = (root / "cfg.json").string();
  std::vector<std::string> problems;

  const fs::path e1 = root / "elbow1", e2 = root / "elbow2";
  const CliRun r1 = cli(concat({"--config", cfg, "--seed", "1", "--out", e1.string(), "elbow"},
                               urban_data_args()));
  const CliRun r2 = cli(concat({"--config", cfg, "--seed", "1", "--threads", "2", "--out",
                                e2.string(), "elbow"},
                               urban_data_args()));
  if (r1.code != 0 || r2.code != 0) return {false, "elbow failed: " + r1.err + r2.err};
  const Json ej = Json::parse(slurp(e1 / "elbow.json"));
  if (slurp(e1 / "elbow.json") != slurp(e2 / "elbow.json")) {
    problems.push_back("elbow differs between 1 and 2 threads");
  }
  std::size_t max_count = 0;
  for (const auto& row : ej["rows"]) {
    const std::size_t cp = row["count_after_prune"], cm = row["count_after_merge"];
    if (cm > cp || cp > 20 || cm == 0) problems.push_back("elbow row counts out of range");
    max_count = std::max(max_count, cm);
  }
  const std::size_t star = ej["star_index"];
  std::size_t first_max = 0;
  while (ej["rows"][first_max]["count_after_merge"].get<std::size_t>() != max_count) ++first_max;
  if (star != first_max) problems.push_back("star is not the first maximiser");
  const double omega_star = ej["omega_star"];
  if (omega_star != ej["rows"][star]["omega"].get<double>()) {
    problems.push_back("omega_star does not match its row");
  }

  const fs::path bdir = root / "bootstrap";
  const std::string w = format_double(omega_star);
  const CliRun rb = cli(concat({"--config", cfg, "--seed", "1", "--out", bdir.string(),
                                "bootstrap", "--omega0", w, "--l", "20", "--metric-lonlat"},
                               urban_data_args()));
  if (rb.code != 0) return {false, "bootstrap failed: " + rb.err};
  const Json bj = Json::parse(slurp(bdir / "bootstrap.json"));
  const std::size_t L = bj["L"];
  const std::size_t khat = bj["modes"].size();
  if (khat == 0 || khat > 20) problems.push_back("mode count out of range");
  if (bj["baseline"].size() != khat) problems.push_back("baseline and modes disagree");
  for (const auto& c : bj["replicate_mode_counts"]) {
    if (c.get<std::size_t>() > 20) problems.push_back("replicate mode count above K");
  }
  std::size_t n_ellipses = 0;
  for (const auto& m : bj["modes"]) {
    const double s = m["stability"];
    const std::size_t nm = m["n_matched"];
    if (!(s >= 0.0 && s <= 1.0)) problems.push_back("stability outside [0, 1]");
    if (std::abs(s * static_cast<double>(L) - static_cast<double>(nm)) > 1e-9) {
      problems.push_back("stability is not n_matched / L");
    }
    if (m["matched_centres"].size() != nm) problems.push_back("matched centre count");
    const std::string status = m["ellipse_status"];
    if (m["ellipse"].is_null()) {
      if (status == "ok") problems.push_back("missing ellipse with status ok");
      continue;
    }
    ++n_ellipses;
    const Json& e = m["ellipse"];
    const double a = e["a"], b = e["b"], ang = e["angle_deg"];
    if (status != "ok") problems.push_back("ellipse present with status " + status);
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(ang) && a >= b && b > 0.0)) {
      problems.push_back("ellipse axes malformed");
    }
    if (!finite_matrix(e["covariance"])) problems.push_back("ellipse covariance not finite");
    const Matrix cov{{e["covariance"][0][0].get<double>(), e["covariance"][0][1].get<double>()},
                     {e["covariance"][1][0].get<double>(), e["covariance"][1][1].get<double>()}};
    if (cov(0, 1) != cov(1, 0) || cov.determinant() < 0.0 || cov.trace() <= 0.0) {
      problems.push_back("ellipse covariance not PSD");
    }
  }

  std::string detail = fmt("omega* = %s (max count %zu); K-hat = %zu, %zu ellipses, L = %zu",
                           w.c_str(), max_count, khat, n_ellipses, L);
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

// ---------------------------------------------------------------- C10

Outcome c10_determinism() {
  const fs::path root = scratch("determinism");
  write_file(root / "small.json",
             R"({"fit": {"T": 200}, "bench": {"ci_resamples": 200}})");
  const std::string cfg = (root / "small.json").string();
  std::vector<std::string> problems;
  std::size_t files = 0;

  auto twice = [&](const std::string& name, const std::vector<std::string>& args) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const fs::path d = root / tag / name;
      fs::create_directories(d);
      const CliRun r =
          cli(concat({"--config", cfg, "--seed", "17", "--out", d.string()}, args));
      if (r.code != 0) problems.push_back(name + " exited " + std::to_string(r.code) + ": " + r.err);
      dirs.push_back(d);
    }
    std::size_t here = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const fs::path other = dirs[1] / entry.path().filename();
      ++here;
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        problems.push_back(name + "/" + entry.path().filename().string() + " differs");
      }
    }
    if (here == 0) problems.push_back(name + " wrote nothing");
    files += here;
  };

  twice("gen", {"gen", "--preset", "triangle", "--n", "1500"});
  const std::string data = (root / "a" / "gen" / "points.csv").string();
  twice("fit", {"fit", "--data", data, "--K", "4", "--trajectory-every", "50"});
  const std::string state = (root / "a" / "fit" / "state.json").string();
  twice("modes", {"modes", "--state", state});
  twice("cluster", {"cluster", "--state", state, "--data", data});
  twice("bootstrap", {"bootstrap", "--data", data, "--preset", "triangle-modes", "--l", "5",
                      "--omega0", "0.3"});
  twice("elbow", {"elbow", "--data", data, "--preset", "triangle-modes", "--K", "4", "--grid",
                  "3,1,0.3"});
  twice("bench", {"bench", "--n", "256", "--k", "3", "--reps", "2", "--methods",
                  "gerve,mean-shift"});

  std::string detail = fmt("7 subcommands, %zu output files compared", files);
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double max_seconds;  // 0: no hard limit
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "mean-shift equivalence", c1_mean_shift, 1.0},
      {2, "entropy oracle", c2_entropy_oracle, 10.0},
      {3, "gradient vs finite differences", c3_finite_differences, 30.0},
      {4, "hungarian oracle", c4_hungarian, 5.0},
      {5, "triangle consistency trend", c5_triangle_trend, 0.0},
      {6, "overspecification robustness", c6_overspecified, 0.0},
      {7, "bootstrap calibration", c7_bootstrap_calibration, 0.0},
      {8, "stability-score concentration", c8_stability_concentration, 0.0},
      {9, "hotspot pipeline smoke", c9_hotspot_smoke, 0.0},
      {10, "determinism", c10_determinism, 0.0},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.max_seconds > 0.0 && secs > c.max_seconds) {
      o.pass = false;
      o.detail += fmt("; runtime %.1f s exceeds %.0f s", secs, c.max_seconds);
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  C" << c.id << " " << c.name << " ("
              << fmt("%.1f s", secs) << "): " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed))
            << std::endl;
  return failed == 0 ? 0 : 1;
}
