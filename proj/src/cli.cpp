#include "gerve/cli.hpp"

#include "gerve/io.hpp"
#include "gerve/presets.hpp"
#include "gerve/random.hpp"
#include "gerve/serialize.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace gerve {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::size_t threads = 1;
};

struct DataOptions {
  std::string path;
  std::optional<std::vector<std::string>> columns;
  std::vector<std::string> filters;
  bool normalise = false;
  std::optional<std::vector<double>> window;  // lower..., upper...
  std::optional<double> pad_ratio;
  std::optional<std::vector<double>> pad_outer;  // lo, hi
  bool metric_lonlat = false;
};

struct RunOptions {
  std::optional<std::string> preset;
  std::optional<std::size_t> K;
  std::optional<std::size_t> T;
  std::optional<std::size_t> trajectory_every;
};

struct LoadedData {
  PointDataset ds;
  std::optional<NormalisationTransform> transform;
  Json summary;
};

class Context {
 public:
  Context(const GlobalOptions& g, std::ostream& out) : g_(g), out_(out) {
    if (!g.config_path.empty()) {
      std::ifstream in(g.config_path, std::ios::binary);
      if (!in) throw InvalidInput("cannot open config " + g.config_path);
      try {
        config_ = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config " + g.config_path + ": " + e.what());
      }
      if (!config_.is_object()) throw InvalidInput("config must be a JSON object");
      static const std::set<std::string> keys{"schema_version", "seed",  "preset", "K",
                                              "fit",            "prune", "bootstrap", "elbow",
                                              "bench",          "data",  "gen"};
      for (const auto& [k, v] : config_.items()) {
        if (!keys.count(k)) throw InvalidInput("config: unknown key '" + k + "'");
      }
      if (config_.contains("schema_version") && config_["schema_version"] != kSchemaVersion) {
        throw InvalidInput("config: unsupported schema_version");
      }
    } else {
      config_ = Json::object();
    }
    resolve_seed();
    threads_ = g.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : g.threads;
    fs::create_directories(g.out_dir);
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::size_t threads() const { return threads_; }
  [[nodiscard]] const Json& config() const { return config_; }

  Preset preset(const RunOptions& r, const std::string& fallback) const {
    std::string name = fallback;
    if (config_.contains("preset")) name = config_["preset"].get<std::string>();
    if (r.preset) name = *r.preset;
    Preset p = preset_by_name(name);
    if (config_.contains("K")) p.K = config_["K"].get<std::size_t>();
    if (config_.contains("fit")) apply_json(config_["fit"], p.fit);
    if (config_.contains("prune")) apply_json(config_["prune"], p.prune);
    if (config_.contains("bootstrap")) apply_json(config_["bootstrap"], p.bootstrap);
    if (config_.contains("elbow")) {
      const Json& e = config_["elbow"];
      for (const auto& [k, v] : e.items()) {
        if (k != "grid") throw InvalidInput("elbow: unknown key '" + k + "'");
      }
      if (e.contains("grid")) p.omega_grid = e["grid"].get<std::vector<double>>();
    }
    if (r.K) p.K = *r.K;
    if (r.T) p.fit.T = *r.T;
    if (r.trajectory_every) p.fit.trajectory_every = *r.trajectory_every;
    if (p.K < 1) throw InvalidInput("K must be >= 1");
    p.fit.seed = seed_;
    p.bootstrap.seed = seed_;
    p.bootstrap.threads = threads_;
    p.fit.validate();
    p.prune.validate();
    p.fit.bounds.validate_for(p.K, p.prune.weight_floor);
    return p;
  }

  LoadedData load(const DataOptions& opt) const {
    Json dc = config_.contains("data") ? config_["data"] : Json::object();
    for (const auto& [k, v] : dc.items()) {
      static const std::set<std::string> keys{"columns",    "filters",   "normalise",
                                              "window",     "pad_ratio", "pad_outer",
                                              "metric_lonlat"};
      if (!keys.count(k)) throw InvalidInput("data: unknown key '" + k + "'");
    }
    if (opt.path.empty()) throw InvalidInput("--data is required");
    std::vector<std::string> columns{"x", "y"};
    if (dc.contains("columns")) columns = dc["columns"].get<std::vector<std::string>>();
    if (opt.columns) columns = *opt.columns;
    std::vector<std::string> filter_text;
    if (dc.contains("filters")) filter_text = dc["filters"].get<std::vector<std::string>>();
    if (!opt.filters.empty()) filter_text = opt.filters;
    std::vector<RangeFilter> filters;
    for (const auto& f : filter_text) filters.push_back(RangeFilter::parse(f));
    const bool do_norm = opt.normalise || dc.value("normalise", false);
    std::optional<std::vector<double>> window;
    if (dc.contains("window")) window = dc["window"].get<std::vector<double>>();
    if (opt.window) window = opt.window;
    double pad_ratio = dc.value("pad_ratio", 0.0);
    if (opt.pad_ratio) pad_ratio = *opt.pad_ratio;
    std::vector<double> outer{-2.0, 2.0};
    if (dc.contains("pad_outer")) outer = dc["pad_outer"].get<std::vector<double>>();
    if (opt.pad_outer) outer = *opt.pad_outer;

    LoadedData ld;
    ld.ds = ingest_csv(opt.path, columns, filters);
    const auto d = static_cast<std::size_t>(ld.ds.dim());
    std::optional<Domain> win;
    if (window) {
      if (window->size() != 2 * d) {
        throw InvalidInput("window needs " + std::to_string(2 * d) + " values (lower..., upper...)");
      }
      Domain w{Vector(static_cast<Eigen::Index>(d)), Vector(static_cast<Eigen::Index>(d))};
      for (std::size_t j = 0; j < d; ++j) {
        w.lower[static_cast<Eigen::Index>(j)] = (*window)[j];
        w.upper[static_cast<Eigen::Index>(j)] = (*window)[d + j];
      }
      w.validate();
      win = w;
    }
    Domain inner;
    if (win) {
      inner = *win;
    } else {
      inner.lower = ld.ds.points.colwise().minCoeff().transpose();
      inner.upper = ld.ds.points.colwise().maxCoeff().transpose();
    }
    if (do_norm) {
      auto [nds, t] = normalise(ld.ds, win);
      ld.ds = std::move(nds);
      inner.lower = t.apply(inner.lower);
      inner.upper = t.apply(inner.upper);
      ld.transform = t;
    }
    if (pad_ratio > 0.0) {
      if (outer.size() != 2) throw InvalidInput("pad_outer needs two values: lo, hi");
      const Domain out = Domain::cube(static_cast<Eigen::Index>(d), outer[0], outer[1]);
      ld.ds = pad_background(ld.ds, inner, out, pad_ratio, derive_seed(seed_, stream::kPadding));
    }
    Json filters_json = Json::array();
    for (const auto& f : ld.ds.filters) filters_json.push_back(f);
    ld.summary = {{"source", ld.ds.source},
                  {"columns", columns},
                  {"filters", filters_json},
                  {"rows_read", ld.ds.rows_read},
                  {"rows_skipped", ld.ds.rows_skipped},
                  {"rows_filtered", ld.ds.rows_filtered},
                  {"n_points", ld.ds.n_original},
                  {"n_padding", ld.ds.size() - ld.ds.n_original},
                  {"normalised", do_norm}};
    if (ld.transform) {
      ld.summary["transform"] = {{"offset", to_json(ld.transform->offset)},
                                 {"scale", ld.transform->scale}};
    }
    if (opt.metric_lonlat || dc.value("metric_lonlat", false)) {
      if (!ld.transform || d != 2) {
        throw InvalidInput("metric_lonlat requires normalised 2-D (longitude, latitude) data");
      }
      ld.summary["metric"] = "equirectangular-metres";
    }
    return ld;
  }

  void write_text(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(g_.out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + p.string());
    f << content;
    outputs_.push_back(name);
  }

  void write_json(const std::string& name, const Json& j) { write_text(name, j.dump(2) + "\n"); }

  template <class Fn>
  void write_csv(const std::string& name, Fn&& fn) {
    std::ostringstream s;
    fn(s);
    write_text(name, s.str());
  }

  void finish(const std::string& command, Json details) {
    Json m;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = "gerve";
    m["version"] = kVersion;
    m["command"] = command;
    m["seed"] = seed_;
    m["seed_source"] = seed_source_;
    m["config_file"] = g_.config_path;
    m["details"] = std::move(details);
    Json outs = Json::array();
    for (const auto& o : outputs_) outs.push_back(o);
    outs.push_back("manifest.json");
    m["outputs"] = outs;
    write_json("manifest.json", m);
    for (const auto& o : outputs_) out_ << (fs::path(g_.out_dir) / o).string() << '\n';
  }

 private:
  void resolve_seed() {
    if (config_.contains("seed")) {
      seed_ = config_["seed"].get<std::uint64_t>();
      seed_source_ = "config";
      return;
    }
    if (const char* env = std::getenv("GERVE_SEED"); env != nullptr && *env != '\0') {
      try {
        std::size_t pos = 0;
        seed_ = std::stoull(env, &pos);
        if (pos != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw InvalidInput(std::string("GERVE_SEED is not an unsigned integer: ") + env);
      }
      seed_source_ = "env";
      return;
    }
    if (g_.seed) {
      seed_ = *g_.seed;
      seed_source_ = "flag";
      return;
    }
    seed_ = 0;
    seed_source_ = "default";
  }

  GlobalOptions g_;
  std::ostream& out_;
  Json config_;
  std::uint64_t seed_ = 0;
  std::string seed_source_;
  std::size_t threads_ = 1;
  std::vector<std::string> outputs_;
};

void add_data_options(CLI::App* sub, DataOptions& d) {
  sub->add_option("--data", d.path, "Input CSV with a header row")->required();
  sub->add_option("--columns", d.columns, "Coordinate columns (default x,y)")->delimiter(',');
  sub->add_option("--filter", d.filters, "Keep rows with column in [lo,hi]: name:lo:hi");
  sub->add_flag("--normalise", d.normalise, "Map the window to a centred box of area 1");
  sub->add_option("--window", d.window, "Window lower...,upper... (default: bounding box)")
      ->delimiter(',');
  sub->add_option("--pad-ratio", d.pad_ratio, "Background padding density ratio");
  sub->add_option("--pad-outer", d.pad_outer, "Padding cube lo,hi (default -2,2)")->delimiter(',');
  sub->add_flag("--metric-lonlat", d.metric_lonlat,
                "Report ellipses in metres (data are longitude, latitude)");
}

void add_run_options(CLI::App* sub, RunOptions& r) {
  sub->add_option("--preset", r.preset, "Run preset: triangle-cluster, triangle-modes, hotspot, two-blob");
  sub->add_option("--K", r.K, "Number of mixture components");
  sub->add_option("--T", r.T, "Iteration budget");
}

std::optional<AxisAffine> metric_for(const LoadedData& ld) {
  if (!ld.summary.contains("metric")) return std::nullopt;
  return metric_map(*ld.transform, ld.transform->offset[0], ld.transform->offset[1]);
}

Json original_units(const std::vector<ResolvedMode>& modes, const LoadedData& ld) {
  Json a = Json::array();
  if (!ld.transform) return a;
  for (const auto& m : modes) a.push_back(to_json(ld.transform->inverse(m.center)));
  return a;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy-regularised Gaussian mixture mode estimation and modal clustering", "gerve"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--seed", g.seed, "Root seed (config seed and GERVE_SEED take precedence)");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)");

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a synthetic mixture to CSV");
  std::string gen_spec = "triangle";
  std::optional<double> gen_sigma2;
  std::size_t gen_n = 6000;
  gen->add_option("--preset", gen_spec, "triangle, two-blob or single");
  gen->add_option("--sigma2", gen_sigma2, "Component variance (default 0.25 triangle, 0.05 two-blob)");
  gen->add_option("--n", gen_n, "Number of points");

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit a mixture; writes state, result and trajectory");
  DataOptions fit_data;
  RunOptions fit_run;
  add_data_options(fitc, fit_data);
  add_run_options(fitc, fit_run);
  fitc->add_option("--trajectory-every", fit_run.trajectory_every, "Snapshot period (0: off)");

  // modes
  auto* modesc = app.add_subcommand("modes", "Prune and merge a fitted state into resolved modes");
  std::string modes_state;
  RunOptions modes_run;
  modesc->add_option("--state", modes_state, "state.json from fit")->required();
  modesc->add_option("--preset", modes_run.preset, "Preset supplying prune/merge settings");

  // bootstrap
  auto* bootc = app.add_subcommand("bootstrap", "Bootstrap mode uncertainty at a fixed temperature");
  DataOptions boot_data;
  RunOptions boot_run;
  std::optional<std::size_t> boot_L;
  std::optional<double> boot_omega0;
  add_data_options(bootc, boot_data);
  add_run_options(bootc, boot_run);
  bootc->add_option("--l", boot_L, "Number of bootstrap replicates");
  bootc->add_option("--omega0", boot_omega0, "Fixed temperature");

  // elbow
  auto* elbowc = app.add_subcommand("elbow", "Resolved-mode counts over a temperature grid");
  DataOptions elbow_data;
  RunOptions elbow_run;
  std::optional<std::vector<double>> elbow_grid;
  add_data_options(elbowc, elbow_data);
  add_run_options(elbowc, elbow_run);
  elbowc->add_option("--grid", elbow_grid, "Temperatures, descending")->delimiter(',');

  // cluster
  auto* clusterc = app.add_subcommand("cluster", "Assign points to components by responsibility");
  DataOptions cluster_data;
  std::string cluster_state;
  add_data_options(clusterc, cluster_data);
  clusterc->add_option("--state", cluster_state, "state.json from fit")->required();

  // bench
  auto* benchc = app.add_subcommand("bench", "Mode-estimation benchmark on a synthetic mixture");
  std::optional<std::vector<std::size_t>> bench_n, bench_k;
  std::optional<std::size_t> bench_reps;
  std::optional<std::vector<std::string>> bench_methods;
  bool bench_full_grid = false;
  benchc->add_option("--n", bench_n, "Sample sizes")->delimiter(',');
  benchc->add_option("--k", bench_k, "Component counts")->delimiter(',');
  benchc->add_option("--reps", bench_reps, "Replicates per cell");
  benchc->add_option("--methods", bench_methods, "gerve, mean-shift")->delimiter(',');
  benchc->add_flag("--full-grid", bench_full_grid, "Search the full hyperparameter grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Context ctx(g, out);
    if (*gen) {
      const Json gc = ctx.config().value("gen", Json::object());
      std::string name = gc.value("preset", gen_spec);
      if (gen->count("--preset")) name = gen_spec;
      std::size_t n = gc.value("n", gen_n);
      if (gen->count("--n")) n = gen_n;
      MixtureSpec spec;
      if (gc.contains("spec")) {
        spec = mixture_spec_from_json(gc["spec"]);
      } else if (name == "triangle") {
        spec = MixtureSpec::triangle(gen_sigma2.value_or(gc.value("sigma2", 0.25)));
      } else if (name == "two-blob") {
        spec = MixtureSpec::two_blob(gen_sigma2.value_or(gc.value("sigma2", 0.05)));
      } else if (name == "single") {
        spec = MixtureSpec::single(Vector::Zero(2),
                                   gen_sigma2.value_or(gc.value("sigma2", 1.0)) * Matrix::Identity(2, 2));
      } else {
        throw InvalidInput("unknown gen preset: " + name);
      }
      const PointMatrix X = gen_mixture_sample(spec, n, ctx.seed());
      std::vector<std::string> cols;
      if (X.cols() == 2) {
        cols = {"x", "y"};
      } else {
        for (Eigen::Index j = 0; j < X.cols(); ++j) cols.push_back("x" + std::to_string(j));
      }
      ctx.write_csv("points.csv", [&](std::ostream& s) { write_points_csv(s, X, cols); });
      ctx.finish("gen", {{"spec", to_json(spec)}, {"n", n}});
    } else if (*fitc) {
      const Preset p = ctx.preset(fit_run, "triangle-modes");
      const LoadedData ld = ctx.load(fit_data);
      const FitResult r = fit(ld.ds.points, p.K, p.fit);
      ctx.write_json("state.json", to_json(r.final_state));
      ctx.write_json("fit.json", to_json(r));
      ctx.write_csv("trajectory.csv", [&](std::ostream& s) { write_trajectory_csv(s, r.trajectory); });
      ctx.finish("fit", {{"preset", p.name}, {"K", p.K}, {"fit", to_json(p.fit)}, {"data", ld.summary}});
    } else if (*modesc) {
      const Preset p = ctx.preset(modes_run, "triangle-modes");
      std::ifstream in(modes_state, std::ios::binary);
      if (!in) throw InvalidInput("cannot open " + modes_state);
      Json sj;
      try {
        sj = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(modes_state + ": " + e.what());
      }
      const MixtureState state = state_from_json(sj);
      const PruneContext pc{p.fit.init.sigma2_init, p.fit.bounds.sigma2_min};
      const auto modes = resolve_modes(state, p.prune, pc);
      ctx.write_csv("modes.csv", [&](std::ostream& s) { write_modes_csv(s, modes); });
      ctx.write_json("modes.json", to_json(modes));
      ctx.finish("modes", {{"preset", p.name}, {"prune", to_json(p.prune)}, {"n_modes", modes.size()}});
    } else if (*bootc) {
      Preset p = ctx.preset(boot_run, "two-blob");
      if (boot_L) p.bootstrap.L = *boot_L;
      if (boot_omega0) p.bootstrap.omega0 = *boot_omega0;
      const LoadedData ld = ctx.load(boot_data);
      if (auto m = metric_for(ld)) p.bootstrap.metric = m;
      p.bootstrap.validate();
      const BootstrapReport rep = bootstrap_uq(ld.ds.points, p.K, p.fit, p.prune, p.bootstrap);
      Json rj = to_json(rep);
      if (ld.transform) rj["baseline_centres_original_units"] = original_units(rep.baseline, ld);
      ctx.write_json("bootstrap.json", rj);
      ctx.write_csv("bootstrap.csv", [&](std::ostream& s) { write_bootstrap_csv(s, rep); });
      ctx.finish("bootstrap", {{"preset", p.name},
                               {"K", p.K},
                               {"fit", to_json(p.fit)},
                               {"prune", to_json(p.prune)},
                               {"bootstrap", to_json(p.bootstrap)},
                               {"data", ld.summary}});
    } else if (*elbowc) {
      Preset p = ctx.preset(elbow_run, "hotspot");
      if (elbow_grid) p.omega_grid = *elbow_grid;
      const LoadedData ld = ctx.load(elbow_data);
      const ElbowResult er =
          elbow_scan(ld.ds.points, p.omega_grid, p.K, p.fit, p.prune, ctx.threads());
      ctx.write_csv("elbow.csv", [&](std::ostream& s) { write_elbow_csv(s, er); });
      ctx.write_json("elbow.json", to_json(er));
      ctx.finish("elbow", {{"preset", p.name},
                           {"K", p.K},
                           {"fit", to_json(p.fit)},
                           {"prune", to_json(p.prune)},
                           {"data", ld.summary}});
    } else if (*clusterc) {
      std::ifstream in(cluster_state, std::ios::binary);
      if (!in) throw InvalidInput("cannot open " + cluster_state);
      Json sj;
      try {
        sj = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(cluster_state + ": " + e.what());
      }
      const MixtureState state = state_from_json(sj);
      const LoadedData ld = ctx.load(cluster_data);
      const auto labels = assign_clusters(state, ld.ds.points);
      ctx.write_csv("labels.csv", [&](std::ostream& s) { write_labels_csv(s, labels); });
      ctx.finish("cluster", {{"data", ld.summary}, {"K", state.size()}});
    } else if (*benchc) {
      BenchConfig bc = triangle_bench_config({1024, 4096, 16384}, {3, 7}, 20);
      if (ctx.config().contains("fit")) apply_json(ctx.config()["fit"], bc.fit);
      if (ctx.config().contains("bench")) apply_json(ctx.config()["bench"], bc);
      if (bench_n) bc.N_grid = *bench_n;
      if (bench_k) bc.K_grid = *bench_k;
      if (bench_reps) bc.n_rep = *bench_reps;
      if (bench_methods) {
        bc.methods.clear();
        for (const auto& m : *bench_methods) bc.methods.push_back(method_from_string(m));
      }
      if (bench_full_grid) {
        bc.gerve_grid = full_gerve_grid();
        bc.mean_shift_grid = full_mean_shift_grid();
      }
      bc.seed = ctx.seed();
      bc.threads = ctx.threads();
      const BenchResult br = run_benchmark(bc);
      ctx.write_csv("bench_long.csv", [&](std::ostream& s) { write_bench_long_csv(s, br); });
      ctx.write_csv("bench_plot.csv", [&](std::ostream& s) { write_bench_plot_csv(s, br); });
      ctx.write_json("bench_summary.json", to_json(br, bc));
      ctx.finish("bench", {{"fit", to_json(bc.fit)}, {"n_rep", bc.n_rep}});
    }
    return 0;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace gerve
