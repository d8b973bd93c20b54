#include "gerve/bootstrap.hpp"

#include "gerve/assignment.hpp"
#include "gerve/parallel.hpp"
#include "gerve/random.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gerve {

namespace {

constexpr double kRadToDeg = 57.295779513082320876798154814105;

struct ReplicateOutcome {
  std::vector<std::optional<Vector>> matched;  // per baseline mode, data units
  std::size_t mode_count = 0;
};

FitConfig at_fixed_temperature(const FitConfig& cfg, double omega0) {
  FitConfig c = cfg;
  c.schedule = cfg.schedule.frozen_at(omega0);
  c.trajectory_every = 0;
  return c;
}

}  // namespace

Vector AxisAffine::apply(const Vector& x) const {
  if (offset.size() != x.size() || scale.size() != x.size()) {
    throw InvalidInput("AxisAffine: dimension mismatch");
  }
  return scale.cwiseProduct(x - offset);
}

void BootstrapConfig::validate() const {
  if (L < 1) throw InvalidInput("BootstrapConfig: L must be >= 1");
  if (!(omega0 > 0.0)) throw InvalidInput("BootstrapConfig: omega0 must be positive");
  if (!(eta > 0.0 && eta < 0.5)) throw InvalidInput("BootstrapConfig: eta must lie in (0, 0.5)");
  if (!(tau_min > 0.0) || !(tau_min <= tau_max)) {
    throw InvalidInput("BootstrapConfig: require 0 < tau_min <= tau_max");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("BootstrapConfig: alpha must lie in (0,1)");
}

Vector ZFrame::apply(const Vector& x) const { return (x - mean).cwiseQuotient(std); }

ZFrame ZFrame::from_centres(const std::vector<Vector>& centres) {
  if (centres.empty()) throw InvalidInput("ZFrame: no centres");
  const Eigen::Index d = centres.front().size();
  ZFrame z{Vector::Zero(d), Vector::Ones(d)};
  for (const auto& c : centres) z.mean += c;
  z.mean /= static_cast<double>(centres.size());
  if (centres.size() < 2) return z;
  Vector var = Vector::Zero(d);
  for (const auto& c : centres) var += (c - z.mean).cwiseAbs2();
  var /= static_cast<double>(centres.size() - 1);
  const double top = std::sqrt(var.maxCoeff());
  if (!(top > 0.0)) return z;
  // Axes along which the centres barely spread would otherwise dominate every distance.
  for (Eigen::Index j = 0; j < d; ++j) {
    z.std[j] = std::max(std::sqrt(var[j]), ZFrame::kMaxAnisotropy * top);
  }
  return z;
}

std::vector<double> adaptive_gates(const std::vector<Vector>& centres, double eta,
                                   double tau_min, double tau_max) {
  if (centres.empty()) throw InvalidInput("adaptive_gates: no centres");
  if (!(tau_min <= tau_max)) throw InvalidInput("adaptive_gates: tau_min > tau_max");
  std::vector<double> gates(centres.size(), tau_max);
  for (std::size_t k = 0; k < centres.size(); ++k) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centres.size(); ++j) {
      if (j != k) nn = std::min(nn, (centres[k] - centres[j]).norm());
    }
    if (std::isfinite(nn)) gates[k] = std::clamp(eta * nn, tau_min, tau_max);
  }
  return gates;
}

std::vector<std::optional<std::size_t>> match_modes(const std::vector<Vector>& baseline,
                                                    const std::vector<Vector>& replicate,
                                                    const std::vector<double>& gates) {
  if (gates.size() != baseline.size()) throw InvalidInput("match_modes: gate count mismatch");
  std::vector<std::optional<std::size_t>> out(baseline.size());
  if (baseline.empty() || replicate.empty()) return out;
  Matrix dist(static_cast<Eigen::Index>(baseline.size()),
              static_cast<Eigen::Index>(replicate.size()));
  for (std::size_t k = 0; k < baseline.size(); ++k) {
    for (std::size_t j = 0; j < replicate.size(); ++j) {
      dist(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          (baseline[k] - replicate[j]).norm();
    }
  }
  const Assignment asg = hungarian(dist);
  for (std::size_t k = 0; k < baseline.size(); ++k) {
    const int j = asg.row_to_col[k];
    if (j < 0) continue;
    if (dist(static_cast<Eigen::Index>(k), j) <= gates[k]) out[k] = static_cast<std::size_t>(j);
  }
  return out;
}

Vector stability_scores(const std::vector<std::size_t>& matched_counts, std::size_t L) {
  if (L < 1) throw InvalidInput("stability_scores: L must be >= 1");
  Vector s(static_cast<Eigen::Index>(matched_counts.size()));
  for (std::size_t k = 0; k < matched_counts.size(); ++k) {
    if (matched_counts[k] > L) throw InvalidInput("stability_scores: count exceeds L");
    s[static_cast<Eigen::Index>(k)] =
        static_cast<double>(matched_counts[k]) / static_cast<double>(L);
  }
  return s;
}

double chi2_2dof_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("chi2 quantile: alpha must lie in (0,1)");
  return -2.0 * std::log(alpha);
}

Ellipse confidence_ellipse(const std::vector<Vector>& points, double alpha,
                           const std::optional<Vector>& center) {
  if (points.size() < 3) {
    throw InsufficientMatches("confidence_ellipse: need at least 3 matched centres, got " +
                              std::to_string(points.size()));
  }
  for (const auto& p : points) {
    if (p.size() != 2) throw InvalidInput("confidence_ellipse: points must be 2-D");
  }
  Vector mean = Vector::Zero(2);
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Matrix V = Matrix::Zero(2, 2);
  for (const auto& p : points) V += (p - mean) * (p - mean).transpose();
  V /= static_cast<double>(points.size() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(V);
  const double e1 = es.eigenvalues()[1];
  const double e2 = es.eigenvalues()[0];
  if (!(e1 > 0.0) || !(e2 > 1e-12 * e1)) {
    throw DegenerateEllipse("confidence_ellipse: matched centres are rank deficient");
  }
  Vector v1 = es.eigenvectors().col(1);
  if (v1[1] < 0.0 || (v1[1] == 0.0 && v1[0] < 0.0)) v1 = -v1;
  const double q = chi2_2dof_quantile(alpha);
  Ellipse el;
  el.center = center ? *center : mean;
  el.a = std::sqrt(q * e1);
  el.b = std::sqrt(q * e2);
  el.angle_deg = std::atan2(v1[0], v1[1]) * kRadToDeg;
  el.covariance = V;
  return el;
}

BootstrapReport bootstrap_uq(const PointMatrix& samples, std::size_t K, const FitConfig& fit_cfg,
                             const PruneMergeConfig& pm, const BootstrapConfig& bcfg) {
  bcfg.validate();
  pm.validate();
  if (samples.rows() < 2) throw InvalidInput("bootstrap_uq: need at least 2 samples");
  const FitConfig base_cfg = at_fixed_temperature(fit_cfg, bcfg.omega0);
  const PruneContext ctx{fit_cfg.init.sigma2_init, fit_cfg.bounds.sigma2_min};

  BootstrapReport rep;
  rep.L = bcfg.L;
  const FitResult base_fit = fit(samples, K, base_cfg);
  rep.baseline = resolve_modes(base_fit.final_state, pm, ctx);
  const std::size_t Kb = rep.baseline.size();
  rep.matches.assign(Kb, {});
  rep.stability = Vector::Zero(static_cast<Eigen::Index>(Kb));
  rep.ellipses.assign(Kb, std::nullopt);
  rep.ellipse_status.assign(Kb, "");
  if (Kb == 0) {
    rep.diagnostic = "baseline fit produced no modes";
    return rep;
  }

  std::vector<Vector> base_centres;
  for (const auto& m : rep.baseline) base_centres.push_back(m.center);
  const ZFrame frame = ZFrame::from_centres(base_centres);
  std::vector<Vector> base_z;
  for (const auto& c : base_centres) base_z.push_back(frame.apply(c));
  const auto gates = adaptive_gates(base_z, bcfg.eta, bcfg.tau_min, bcfg.tau_max);

  const Eigen::Index N = samples.rows();
  std::vector<ReplicateOutcome> outcomes(bcfg.L);
  parallel_for(bcfg.L, bcfg.threads, [&](std::size_t l) {
    FitConfig c = base_cfg;
    PointMatrix resampled;
    const PointMatrix* data = &samples;
    if (bcfg.resample) {
      Rng rng(derive_seed(bcfg.seed, stream::kResample, l));
      std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
      resampled.resize(N, samples.cols());
      for (Eigen::Index i = 0; i < N; ++i) resampled.row(i) = samples.row(pick(rng));
      data = &resampled;
      c.seed = derive_seed(bcfg.seed, stream::kReplicate, l);
    }
    const FitResult fr = fit(*data, K, c);
    const auto modes = resolve_modes(fr.final_state, pm, ctx);
    std::vector<Vector> z;
    for (const auto& m : modes) z.push_back(frame.apply(m.center));
    const auto matched = match_modes(base_z, z, gates);
    ReplicateOutcome& out = outcomes[l];
    out.mode_count = modes.size();
    out.matched.resize(Kb);
    for (std::size_t k = 0; k < Kb; ++k) {
      if (matched[k]) out.matched[k] = modes[*matched[k]].center;
    }
  });

  std::vector<std::size_t> counts(Kb, 0);
  for (const auto& o : outcomes) {
    rep.replicate_mode_counts.push_back(o.mode_count);
    for (std::size_t k = 0; k < Kb; ++k) {
      if (o.matched[k]) {
        rep.matches[k].push_back(*o.matched[k]);
        ++counts[k];
      }
    }
  }
  rep.stability = stability_scores(counts, bcfg.L);

  for (std::size_t k = 0; k < Kb; ++k) {
    if (samples.cols() != 2) {
      rep.ellipse_status[k] = "not-2d";
      continue;
    }
    std::vector<Vector> pts;
    for (const auto& p : rep.matches[k]) pts.push_back(bcfg.metric ? bcfg.metric->apply(p) : p);
    const Vector centre =
        bcfg.metric ? bcfg.metric->apply(base_centres[k]) : base_centres[k];
    try {
      rep.ellipses[k] = confidence_ellipse(pts, bcfg.alpha, centre);
      rep.ellipse_status[k] = "ok";
    } catch (const InsufficientMatches&) {
      rep.ellipse_status[k] = "insufficient-matches";
    } catch (const DegenerateEllipse&) {
      rep.ellipse_status[k] = "degenerate";
    }
  }
  return rep;
}

}  // namespace gerve
