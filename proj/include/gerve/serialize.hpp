#pragma once

#include "gerve/bench.hpp"
#include "gerve/bootstrap.hpp"
#include "gerve/modes.hpp"
#include "gerve/optimizer.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace gerve {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

/// Lossless: every double round-trips bit for bit.
Json to_json(const MixtureState& s);
MixtureState state_from_json(const Json& j);

Json to_json(const Domain& d);
Domain domain_from_json(const Json& j);

Json to_json(const FitConfig& c);
Json to_json(const PruneMergeConfig& c);
Json to_json(const BootstrapConfig& c);

// Partial overrides: keys present in `j` replace the corresponding fields; unknown keys
// are rejected.
void apply_json(const Json& j, FitConfig& c);
void apply_json(const Json& j, PruneMergeConfig& c);
void apply_json(const Json& j, BootstrapConfig& c);
void apply_json(const Json& j, HyperParams& h);
void apply_json(const Json& j, BenchConfig& c);
Json to_json(const HyperParams& h);
Json to_json(const MixtureSpec& s);
MixtureSpec mixture_spec_from_json(const Json& j);

Json to_json(const FitResult& r);
void write_trajectory_csv(std::ostream& out, const std::vector<Snapshot>& trajectory);

Json to_json(const std::vector<ResolvedMode>& modes);
/// id, weight, center..., covariance upper triangle (row-major).
void write_modes_csv(std::ostream& out, const std::vector<ResolvedMode>& modes);

Json to_json(const BootstrapReport& r);
/// mode_id, s, center..., a, b, angle_deg (empty ellipse fields when none was formed).
void write_bootstrap_csv(std::ostream& out, const BootstrapReport& r);

Json to_json(const ElbowResult& r);
void write_elbow_csv(std::ostream& out, const ElbowResult& r);

Json to_json(const BenchResult& r, const BenchConfig& cfg);
/// Long format: method, N, K, hyper_index, rep, metric, value.
void write_bench_long_csv(std::ostream& out, const BenchResult& r);
/// One row per (method, N, K, hyper, metric) aggregate, plus a best-selection flag.
void write_bench_plot_csv(std::ostream& out, const BenchResult& r);

void write_labels_csv(std::ostream& out, const std::vector<int>& labels);

}  // namespace gerve
