#include "gerve/serialize.hpp"

#include "gerve/io.hpp"
#include "gerve/presets.hpp"

#include <set>

namespace gerve {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw InvalidInput(what + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InvalidInput(what + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config key '") + key + "': " + e.what());
  }
}

void read_size(const Json& j, const char* key, std::size_t& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw InvalidInput(std::string("config key '") + key + "' must be a non-negative integer");
  }
  out = v.get<std::size_t>();
}

std::string join_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += csv_escape(cells[i]);
  }
  return s;
}

}  // namespace

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput("expected a JSON array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("expected a nonempty JSON matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Vector first = vector_from_json(j[0]);
  Matrix m(rows, first.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (row.size() != m.cols()) throw InvalidInput("ragged JSON matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

Json to_json(const MixtureState& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "mixture_state";
  j["K"] = s.size();
  j["d"] = s.dim();
  j["weights"] = to_json(s.weights());
  j["logits"] = to_json(s.logits);
  Json comps = Json::array();
  for (const auto& c : s.components) {
    comps.push_back({{"mean", to_json(c.mean)}, {"precision", to_json(c.precision)}});
  }
  j["components"] = comps;
  return j;
}

MixtureState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("logits") || !j.contains("components")) {
    throw InvalidInput("mixture state JSON needs 'logits' and 'components'");
  }
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion) {
    throw InvalidInput("unsupported schema_version in mixture state");
  }
  MixtureState s;
  s.logits = vector_from_json(j["logits"]);
  for (const auto& c : j["components"]) {
    if (!c.contains("mean") || !c.contains("precision")) {
      throw InvalidInput("component JSON needs 'mean' and 'precision'");
    }
    s.components.push_back({vector_from_json(c["mean"]), matrix_from_json(c["precision"])});
  }
  validate_state(s);
  return s;
}

Json to_json(const Domain& d) { return {{"lower", to_json(d.lower)}, {"upper", to_json(d.upper)}}; }

Domain domain_from_json(const Json& j) {
  check_keys(j, {"lower", "upper"}, "domain");
  Domain d{vector_from_json(j.at("lower")), vector_from_json(j.at("upper"))};
  d.validate();
  return d;
}

Json to_json(const FitConfig& c) {
  Json j;
  j["T"] = c.T;
  j["B"] = c.B;
  j["bounds"] = {{"mu_max", c.bounds.mu_max},
                 {"sigma2_min", c.bounds.sigma2_min},
                 {"sigma2_max", c.bounds.sigma2_max},
                 {"v_max", c.bounds.v_max}};
  const Schedule& s = c.schedule;
  j["schedule"] = {{"temperature", to_string(s.temperature)},
                   {"omega1", s.omega1},
                   {"beta", s.beta},
                   {"omega_floor", s.omega_floor},
                   {"stepsize", to_string(s.stepsize)},
                   {"rho1", s.rho1},
                   {"alpha", s.alpha},
                   {"gamma", s.gamma}};
  j["entropy_samples"] = c.ecfg.n_entropy_samples;
  j["entropy_seed"] = c.ecfg.seed;
  j["domain"] = c.domain ? to_json(*c.domain) : Json(nullptr);
  j["early_stop"] = {{"enabled", c.early_stop.enabled},
                     {"check_every", c.early_stop.check_every},
                     {"mean_tol", c.early_stop.mean_tol},
                     {"prec_rel_tol", c.early_stop.prec_rel_tol},
                     {"consecutive", c.early_stop.consecutive}};
  j["covariance"] = to_string(c.covariance);
  j["init"] = {{"kind", to_string(c.init.kind)},
               {"box_lower", to_json(c.init.box_lower)},
               {"box_upper", to_json(c.init.box_upper)},
               {"sigma2_init", c.init.sigma2_init},
               {"lloyd_iters", c.init.lloyd_iters}};
  j["trajectory_every"] = c.trajectory_every;
  return j;
}

void apply_json(const Json& j, FitConfig& c) {
  check_keys(j,
             {"T", "B", "bounds", "schedule", "entropy_samples", "entropy_seed", "domain",
              "early_stop", "covariance", "init", "trajectory_every"},
             "fit");
  read_size(j, "T", c.T);
  read_size(j, "B", c.B);
  if (j.contains("bounds")) {
    const Json& b = j["bounds"];
    check_keys(b, {"mu_max", "sigma2_min", "sigma2_max", "v_max"}, "fit.bounds");
    read(b, "mu_max", c.bounds.mu_max);
    read(b, "sigma2_min", c.bounds.sigma2_min);
    read(b, "sigma2_max", c.bounds.sigma2_max);
    read(b, "v_max", c.bounds.v_max);
  }
  if (j.contains("schedule")) {
    const Json& s = j["schedule"];
    check_keys(s,
               {"temperature", "omega1", "beta", "omega_floor", "stepsize", "rho1", "alpha",
                "gamma"},
               "fit.schedule");
    if (s.contains("temperature")) {
      c.schedule.temperature = temperature_kind_from_string(s["temperature"].get<std::string>());
    }
    if (s.contains("stepsize")) {
      c.schedule.stepsize = step_kind_from_string(s["stepsize"].get<std::string>());
    }
    read(s, "omega1", c.schedule.omega1);
    read(s, "beta", c.schedule.beta);
    read(s, "omega_floor", c.schedule.omega_floor);
    read(s, "rho1", c.schedule.rho1);
    read(s, "alpha", c.schedule.alpha);
    read(s, "gamma", c.schedule.gamma);
  }
  read_size(j, "entropy_samples", c.ecfg.n_entropy_samples);
  read(j, "entropy_seed", c.ecfg.seed);
  if (j.contains("domain")) {
    if (j["domain"].is_null()) {
      c.domain.reset();
    } else {
      c.domain = domain_from_json(j["domain"]);
    }
  }
  if (j.contains("early_stop")) {
    const Json& e = j["early_stop"];
    check_keys(e, {"enabled", "check_every", "mean_tol", "prec_rel_tol", "consecutive"},
               "fit.early_stop");
    read(e, "enabled", c.early_stop.enabled);
    read_size(e, "check_every", c.early_stop.check_every);
    read(e, "mean_tol", c.early_stop.mean_tol);
    read(e, "prec_rel_tol", c.early_stop.prec_rel_tol);
    read_size(e, "consecutive", c.early_stop.consecutive);
  }
  if (j.contains("covariance")) {
    c.covariance = covariance_structure_from_string(j["covariance"].get<std::string>());
  }
  if (j.contains("init")) {
    const Json& i = j["init"];
    check_keys(i, {"kind", "box_lower", "box_upper", "sigma2_init", "lloyd_iters"}, "fit.init");
    if (i.contains("kind")) c.init.kind = init_kind_from_string(i["kind"].get<std::string>());
    if (i.contains("box_lower")) c.init.box_lower = vector_from_json(i["box_lower"]);
    if (i.contains("box_upper")) c.init.box_upper = vector_from_json(i["box_upper"]);
    read(i, "sigma2_init", c.init.sigma2_init);
    read_size(i, "lloyd_iters", c.init.lloyd_iters);
  }
  read_size(j, "trajectory_every", c.trajectory_every);
  c.validate();
}

Json to_json(const PruneMergeConfig& c) {
  return {{"weight_floor", c.weight_floor},
          {"spread_beta", c.spread_beta ? Json(*c.spread_beta) : Json(nullptr)},
          {"merge_radius", c.merge_radius}};
}

void apply_json(const Json& j, PruneMergeConfig& c) {
  check_keys(j, {"weight_floor", "spread_beta", "merge_radius"}, "prune");
  read(j, "weight_floor", c.weight_floor);
  if (j.contains("spread_beta")) {
    if (j["spread_beta"].is_null()) {
      c.spread_beta.reset();
    } else {
      c.spread_beta = j["spread_beta"].get<double>();
    }
  }
  read(j, "merge_radius", c.merge_radius);
  c.validate();
}

Json to_json(const BootstrapConfig& c) {
  Json j = {{"L", c.L},           {"omega0", c.omega0},   {"eta", c.eta},
            {"tau_min", c.tau_min}, {"tau_max", c.tau_max}, {"alpha", c.alpha},
            {"resample", c.resample}};
  j["metric"] = c.metric ? Json{{"offset", to_json(c.metric->offset)},
                                {"scale", to_json(c.metric->scale)}}
                         : Json(nullptr);
  return j;
}

void apply_json(const Json& j, BootstrapConfig& c) {
  check_keys(j, {"L", "omega0", "eta", "tau_min", "tau_max", "alpha", "resample", "metric"},
             "bootstrap");
  read_size(j, "L", c.L);
  read(j, "omega0", c.omega0);
  read(j, "eta", c.eta);
  read(j, "tau_min", c.tau_min);
  read(j, "tau_max", c.tau_max);
  read(j, "alpha", c.alpha);
  read(j, "resample", c.resample);
  if (j.contains("metric")) {
    if (j["metric"].is_null()) {
      c.metric.reset();
    } else {
      check_keys(j["metric"], {"offset", "scale"}, "bootstrap.metric");
      c.metric = AxisAffine{vector_from_json(j["metric"].at("offset")),
                            vector_from_json(j["metric"].at("scale"))};
    }
  }
  c.validate();
}

Json to_json(const HyperParams& h) {
  return {{"sigma2_init", h.sigma2_init}, {"omega1", h.omega1}, {"beta", h.beta},
          {"rho1", h.rho1},               {"gamma", h.gamma},   {"bandwidth", h.bandwidth}};
}

void apply_json(const Json& j, HyperParams& h) {
  check_keys(j, {"sigma2_init", "omega1", "beta", "rho1", "gamma", "bandwidth"}, "hyperparams");
  read(j, "sigma2_init", h.sigma2_init);
  read(j, "omega1", h.omega1);
  read(j, "beta", h.beta);
  read(j, "rho1", h.rho1);
  read(j, "gamma", h.gamma);
  read(j, "bandwidth", h.bandwidth);
}

Json to_json(const MixtureSpec& s) {
  Json comps = Json::array();
  for (std::size_t k = 0; k < s.means.size(); ++k) {
    comps.push_back({{"weight", s.weights[static_cast<Eigen::Index>(k)]},
                     {"mean", to_json(s.means[k])},
                     {"covariance", to_json(s.covariances[k])}});
  }
  return {{"components", comps}};
}

MixtureSpec mixture_spec_from_json(const Json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "triangle") return MixtureSpec::triangle(0.1);
    if (name == "two-blob") return MixtureSpec::two_blob(0.05);
    throw InvalidInput("unknown mixture spec: " + name);
  }
  check_keys(j, {"components", "preset", "sigma2"}, "spec");
  if (j.contains("preset")) {
    const auto name = j["preset"].get<std::string>();
    const double s2 = j.value("sigma2", name == "triangle" ? 0.1 : 0.05);
    if (name == "triangle") return MixtureSpec::triangle(s2);
    if (name == "two-blob") return MixtureSpec::two_blob(s2);
    throw InvalidInput("unknown mixture spec preset: " + name);
  }
  MixtureSpec s;
  const Json& comps = j.at("components");
  s.weights.resize(static_cast<Eigen::Index>(comps.size()));
  for (std::size_t k = 0; k < comps.size(); ++k) {
    check_keys(comps[k], {"weight", "mean", "covariance"}, "spec.components");
    s.weights[static_cast<Eigen::Index>(k)] = comps[k].at("weight").get<double>();
    s.means.push_back(vector_from_json(comps[k].at("mean")));
    s.covariances.push_back(matrix_from_json(comps[k].at("covariance")));
  }
  s.validate();
  return s;
}

void apply_json(const Json& j, BenchConfig& c) {
  check_keys(j,
             {"spec", "methods", "N", "K", "gerve_grid", "mean_shift_grid", "n_rep", "eps",
              "mean_shift_T", "mean_shift_B", "ci_resamples", "full_grid"},
             "bench");
  if (j.contains("spec")) c.spec = mixture_spec_from_json(j["spec"]);
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j["methods"]) c.methods.push_back(method_from_string(m.get<std::string>()));
  }
  read(j, "N", c.N_grid);
  read(j, "K", c.K_grid);
  if (j.value("full_grid", false)) {
    c.gerve_grid = full_gerve_grid();
    c.mean_shift_grid = full_mean_shift_grid();
  }
  if (j.contains("gerve_grid")) {
    c.gerve_grid.clear();
    for (const auto& h : j["gerve_grid"]) {
      HyperParams hp;
      apply_json(h, hp);
      c.gerve_grid.push_back(hp);
    }
  }
  if (j.contains("mean_shift_grid")) {
    c.mean_shift_grid.clear();
    for (const auto& h : j["mean_shift_grid"]) {
      HyperParams hp;
      apply_json(h, hp);
      c.mean_shift_grid.push_back(hp);
    }
  }
  read_size(j, "n_rep", c.n_rep);
  read(j, "eps", c.eps);
  read_size(j, "mean_shift_T", c.mean_shift_T);
  read_size(j, "mean_shift_B", c.mean_shift_B);
  read_size(j, "ci_resamples", c.n_ci_resamples);
  c.validate();
}

Json to_json(const FitResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "fit_result";
  j["iterations_run"] = r.iterations_run;
  j["stop_reason"] = to_string(r.stop_reason);
  j["clamp_count"] = r.clamp_count;
  j["final_state"] = to_json(r.final_state);
  return j;
}

void write_trajectory_csv(std::ostream& out, const std::vector<Snapshot>& trajectory) {
  out << "iter,component,omega,rho,objective,eigmax_sigma";
  const Eigen::Index d =
      trajectory.empty() || trajectory.front().means.empty() ? 0 : trajectory.front().means[0].size();
  for (Eigen::Index j = 0; j < d; ++j) out << ",mu" << j;
  out << '\n';
  for (const auto& s : trajectory) {
    for (std::size_t k = 0; k < s.means.size(); ++k) {
      out << s.iter << ',' << k << ',' << format_double(s.omega) << ',' << format_double(s.rho)
          << ',' << format_double(s.objective) << ',' << format_double(s.eigmax_sigma[k]);
      for (Eigen::Index j = 0; j < s.means[k].size(); ++j) out << ',' << format_double(s.means[k][j]);
      out << '\n';
    }
  }
}

Json to_json(const std::vector<ResolvedMode>& modes) {
  Json a = Json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    Json src = Json::array();
    for (auto k : modes[i].source_components) src.push_back(k);
    a.push_back({{"id", i},
                 {"weight", modes[i].weight},
                 {"center", to_json(modes[i].center)},
                 {"covariance", to_json(modes[i].covariance)},
                 {"source_components", src}});
  }
  return {{"schema_version", kSchemaVersion}, {"type", "resolved_modes"}, {"modes", a}};
}

void write_modes_csv(std::ostream& out, const std::vector<ResolvedMode>& modes) {
  const Eigen::Index d = modes.empty() ? 0 : modes.front().center.size();
  out << "id,weight";
  for (Eigen::Index j = 0; j < d; ++j) out << ",center_" << j;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = r; c < d; ++c) out << ",cov_" << r << '_' << c;
  }
  out << '\n';
  for (std::size_t i = 0; i < modes.size(); ++i) {
    out << i << ',' << format_double(modes[i].weight);
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << format_double(modes[i].center[j]);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = r; c < d; ++c) out << ',' << format_double(modes[i].covariance(r, c));
    }
    out << '\n';
  }
}

Json to_json(const BootstrapReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "bootstrap_report";
  j["L"] = r.L;
  j["diagnostic"] = r.diagnostic;
  j["baseline"] = to_json(r.baseline)["modes"];
  Json modes = Json::array();
  for (std::size_t k = 0; k < r.baseline.size(); ++k) {
    Json m;
    m["id"] = k;
    m["stability"] = r.stability[static_cast<Eigen::Index>(k)];
    m["n_matched"] = r.matches[k].size();
    Json pts = Json::array();
    for (const auto& p : r.matches[k]) pts.push_back(to_json(p));
    m["matched_centres"] = pts;
    m["ellipse_status"] = r.ellipse_status[k];
    if (r.ellipses[k]) {
      const Ellipse& e = *r.ellipses[k];
      m["ellipse"] = {{"center", to_json(e.center)},
                      {"a", e.a},
                      {"b", e.b},
                      {"angle_deg", e.angle_deg},
                      {"covariance", to_json(e.covariance)}};
    } else {
      m["ellipse"] = nullptr;
    }
    modes.push_back(m);
  }
  j["modes"] = modes;
  Json counts = Json::array();
  for (auto c : r.replicate_mode_counts) counts.push_back(c);
  j["replicate_mode_counts"] = counts;
  return j;
}

void write_bootstrap_csv(std::ostream& out, const BootstrapReport& r) {
  const Eigen::Index d = r.baseline.empty() ? 0 : r.baseline.front().center.size();
  out << "mode_id,s";
  for (Eigen::Index j = 0; j < d; ++j) out << ",center_" << j;
  out << ",a,b,angle_deg,n_matched\n";
  for (std::size_t k = 0; k < r.baseline.size(); ++k) {
    out << k << ',' << format_double(r.stability[static_cast<Eigen::Index>(k)]);
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << format_double(r.baseline[k].center[j]);
    if (r.ellipses[k]) {
      out << ',' << format_double(r.ellipses[k]->a) << ',' << format_double(r.ellipses[k]->b) << ','
          << format_double(r.ellipses[k]->angle_deg);
    } else {
      out << ",,,";
    }
    out << ',' << r.matches[k].size() << '\n';
  }
}

Json to_json(const ElbowResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"omega", row.omega},
                    {"count_after_prune", row.count_after_prune},
                    {"count_after_merge", row.count_after_merge}});
  }
  return {{"schema_version", kSchemaVersion},
          {"type", "elbow_scan"},
          {"omega_star", r.omega_star},
          {"star_index", r.star_index},
          {"rows", rows}};
}

void write_elbow_csv(std::ostream& out, const ElbowResult& r) {
  out << "omega,count_after_prune,count_after_merge,selected\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    out << format_double(r.rows[i].omega) << ',' << r.rows[i].count_after_prune << ','
        << r.rows[i].count_after_merge << ',' << (i == r.star_index ? 1 : 0) << '\n';
  }
}

Json to_json(const BenchResult& r, const BenchConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "bench_result";
  j["spec"] = to_json(cfg.spec);
  j["eps"] = cfg.eps;
  j["n_rep"] = cfg.n_rep;
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json metrics = Json::array();
    for (const auto& m : c.metrics) {
      metrics.push_back({{"metric", m.metric},
                         {"statistic", m.statistic},
                         {"center", m.center},
                         {"lo", m.lo},
                         {"hi", m.hi},
                         {"n", m.n}});
    }
    cells.push_back({{"method", to_string(c.method)},
                     {"N", c.N},
                     {"K", c.K},
                     {"hyper_index", c.hyper_index},
                     {"hyper", c.hyper_label},
                     {"failures", c.failures},
                     {"metrics", metrics}});
  }
  j["cells"] = cells;
  Json best = Json::array();
  for (const auto& b : r.best) {
    best.push_back({{"method", to_string(b.method)},
                    {"N", b.N},
                    {"K", b.K},
                    {"metric", b.metric},
                    {"hyper_index", b.hyper_index},
                    {"center", b.summary.center},
                    {"lo", b.summary.lo},
                    {"hi", b.summary.hi}});
  }
  j["best"] = best;
  Json errors = Json::array();
  for (const auto& rec : r.records) {
    if (rec.failed) {
      errors.push_back({{"method", to_string(rec.method)},
                        {"N", rec.N},
                        {"K", rec.K},
                        {"hyper_index", rec.hyper_index},
                        {"rep", rec.rep},
                        {"error", rec.error}});
    }
  }
  j["failures"] = errors;
  return j;
}

void write_bench_long_csv(std::ostream& out, const BenchResult& r) {
  out << "method,N,K,hyper_index,rep,metric,value,flag\n";
  for (const auto& rec : r.records) {
    const std::string head = to_string(rec.method) + ',' + std::to_string(rec.N) + ',' +
                             std::to_string(rec.K) + ',' + std::to_string(rec.hyper_index) + ',' +
                             std::to_string(rec.rep) + ',';
    if (rec.failed) {
      out << head << "error,," << csv_escape(rec.error) << '\n';
      continue;
    }
    out << head << "MR," << format_double(rec.mr) << ",\n";
    out << head << "HM," << format_double(rec.hm) << ',' << (rec.hm_flagged ? "fewer-estimates" : "")
        << '\n';
    out << head << "NN," << format_double(rec.nn) << ",\n";
  }
}

void write_bench_plot_csv(std::ostream& out, const BenchResult& r) {
  out << "method,N,K,hyper_index,hyper,metric,statistic,center,lo,hi,n,best\n";
  for (const auto& c : r.cells) {
    for (const auto& m : c.metrics) {
      bool is_best = false;
      for (const auto& b : r.best) {
        is_best = is_best || (b.method == c.method && b.N == c.N && b.K == c.K &&
                              b.metric == m.metric && b.hyper_index == c.hyper_index);
      }
      out << join_row({to_string(c.method), std::to_string(c.N), std::to_string(c.K),
                       std::to_string(c.hyper_index), c.hyper_label, m.metric, m.statistic,
                       format_double(m.center), format_double(m.lo), format_double(m.hi),
                       std::to_string(m.n), is_best ? "1" : "0"})
          << '\n';
    }
  }
}

void write_labels_csv(std::ostream& out, const std::vector<int>& labels) {
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

}  // namespace gerve
