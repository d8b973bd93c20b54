#include "gerve/assignment.hpp"
#include "gerve/bench.hpp"
#include "gerve/bootstrap.hpp"
#include "gerve/cli.hpp"
#include "gerve/modes.hpp"
#include "gerve/optimizer.hpp"
#include "gerve/presets.hpp"
#include "gerve/serialize.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace gerve;

namespace {

// Structured values cross the boundary as JSON text; the Python package decodes them.
Preset make_preset(const std::string& name, std::optional<std::size_t> K,
                   const std::string& overrides) {
  Preset p = preset_by_name(name);
  if (K) p.K = *K;
  if (!overrides.empty()) {
    const Json j = Json::parse(overrides);
    if (j.contains("fit")) apply_json(j["fit"], p.fit);
    if (j.contains("prune")) apply_json(j["prune"], p.prune);
    if (j.contains("bootstrap")) apply_json(j["bootstrap"], p.bootstrap);
  }
  return p;
}

std::vector<Vector> rows(const PointMatrix& m) {
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
  return out;
}

}  // namespace

PYBIND11_MODULE(_gerve, m) {
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_RuntimeError);

  m.def("preset_names", &preset_names);

  m.def(
      "gen_mixture_sample",
      [](const std::string& spec, std::size_t n, std::uint64_t seed) {
        return gen_mixture_sample(mixture_spec_from_json(Json::parse(spec)), n, seed);
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));

  m.def(
      "fit",
      [](const PointMatrix& x, const std::string& preset, std::optional<std::size_t> K,
         std::uint64_t seed, const std::string& overrides) {
        Preset p = make_preset(preset, K, overrides);
        p.fit.seed = seed;
        FitResult r;
        {
          py::gil_scoped_release release;
          r = fit(x, p.K, p.fit);
        }
        Json j = to_json(r);
        j["state"] = to_json(r.final_state);
        return j.dump();
      },
      py::arg("x"), py::arg("preset"), py::arg("K"), py::arg("seed"), py::arg("overrides"));

  m.def(
      "resolve_modes",
      [](const std::string& state, const std::string& preset, const std::string& overrides) {
        const Preset p = make_preset(preset, std::nullopt, overrides);
        const PruneContext pc{p.fit.init.sigma2_init, p.fit.bounds.sigma2_min};
        return to_json(resolve_modes(state_from_json(Json::parse(state)), p.prune, pc)).dump();
      },
      py::arg("state"), py::arg("preset"), py::arg("overrides"));

  m.def(
      "assign_clusters",
      [](const std::string& state, const PointMatrix& x) {
        return assign_clusters(state_from_json(Json::parse(state)), x);
      },
      py::arg("state"), py::arg("x"));

  m.def(
      "bootstrap",
      [](const PointMatrix& x, const std::string& preset, std::optional<std::size_t> K,
         std::uint64_t seed, const std::string& overrides) {
        Preset p = make_preset(preset, K, overrides);
        p.fit.seed = seed;
        p.bootstrap.seed = seed;
        BootstrapReport r;
        {
          py::gil_scoped_release release;
          r = bootstrap_uq(x, p.K, p.fit, p.prune, p.bootstrap);
        }
        return to_json(r).dump();
      },
      py::arg("x"), py::arg("preset"), py::arg("K"), py::arg("seed"), py::arg("overrides"));

  m.def(
      "elbow",
      [](const PointMatrix& x, std::optional<std::vector<double>> grid, const std::string& preset,
         std::optional<std::size_t> K, std::uint64_t seed, const std::string& overrides) {
        Preset p = make_preset(preset, K, overrides);
        p.fit.seed = seed;
        ElbowResult r;
        {
          py::gil_scoped_release release;
          r = elbow_scan(x, grid.value_or(p.omega_grid), p.K, p.fit, p.prune);
        }
        return to_json(r).dump();
      },
      py::arg("x"), py::arg("grid"), py::arg("preset"), py::arg("K"), py::arg("seed"),
      py::arg("overrides"));

  m.def("mean_shift_step", &mean_shift_step, py::arg("mean"), py::arg("samples"), py::arg("h"));

  m.def(
      "hungarian",
      [](const Matrix& cost) {
        const Assignment a = hungarian(cost);
        return py::make_tuple(a.row_to_col, a.cost);
      },
      py::arg("cost"));

  m.def(
      "mode_recovery",
      [](const PointMatrix& est, const PointMatrix& truth, double eps) {
        return mode_recovery(rows(est), rows(truth), eps);
      },
      py::arg("estimates"), py::arg("truth"), py::arg("eps"));
  m.def(
      "hungarian_sum",
      [](const PointMatrix& est, const PointMatrix& truth) {
        return hungarian_sum(rows(est), rows(truth));
      },
      py::arg("estimates"), py::arg("truth"));
  m.def(
      "nearest_neighbor_sum",
      [](const PointMatrix& est, const PointMatrix& truth) {
        return nearest_neighbor_sum(rows(est), rows(truth));
      },
      py::arg("estimates"), py::arg("truth"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "gerve");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
