#include "gerve/modes.hpp"

#include "gerve/parallel.hpp"
#include "gerve/random.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace gerve {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct Moments {
  double weight;
  Vector mean;
  Matrix cov;
};

// One single-linkage pass; groups ordered by smallest member.
std::vector<std::vector<std::size_t>> link(const std::vector<Vector>& centres, double radius) {
  const std::size_t K = centres.size();
  UnionFind uf(K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = a + 1; b < K; ++b) {
      if ((centres[a] - centres[b]).norm() <= radius) uf.unite(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(K, -1);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t r = uf.find(k);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(k);
  }
  return groups;
}

Moments combine(const std::vector<Moments>& parts, const std::vector<std::size_t>& members) {
  double w = 0.0;
  for (auto i : members) w += parts[i].weight;
  const Eigen::Index d = parts[members.front()].mean.size();
  Vector mu = Vector::Zero(d);
  for (auto i : members) mu += parts[i].weight * parts[i].mean;
  mu /= w;
  Matrix cov = Matrix::Zero(d, d);
  for (auto i : members) {
    const Vector r = parts[i].mean - mu;
    cov += parts[i].weight * (parts[i].cov + r * r.transpose());
  }
  cov /= w;
  return {w, mu, 0.5 * (cov + cov.transpose())};
}

struct MergeOutcome {
  std::vector<Moments> parts;
  std::vector<std::vector<std::size_t>> groups;  // original indices
};

MergeOutcome merge_impl(const MixtureState& state, double radius) {
  const Vector w = state.weights();
  MergeOutcome out;
  for (std::size_t k = 0; k < state.size(); ++k) {
    out.parts.push_back({w[static_cast<Eigen::Index>(k)], state.components[k].mean,
                         state.components[k].covariance()});
    out.groups.push_back({k});
  }
  for (;;) {
    std::vector<Vector> centres;
    for (const auto& p : out.parts) centres.push_back(p.mean);
    auto groups = link(centres, radius);
    if (groups.size() == out.parts.size()) break;
    MergeOutcome next;
    for (const auto& g : groups) {
      next.parts.push_back(g.size() == 1 ? out.parts[g.front()] : combine(out.parts, g));
      std::vector<std::size_t> members;
      for (auto i : g) members.insert(members.end(), out.groups[i].begin(), out.groups[i].end());
      std::sort(members.begin(), members.end());
      next.groups.push_back(std::move(members));
    }
    out = std::move(next);
  }
  return out;
}

double eigmax_cov(const Matrix& precision) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(precision, Eigen::EigenvaluesOnly);
  return 1.0 / es.eigenvalues().minCoeff();
}

MixtureState select(const MixtureState& state, const std::vector<std::size_t>& keep) {
  const Vector w = state.weights();
  Vector kw(static_cast<Eigen::Index>(keep.size()));
  std::vector<GaussianComponent> comps;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    kw[static_cast<Eigen::Index>(i)] = w[static_cast<Eigen::Index>(keep[i])];
    comps.push_back(state.components[keep[i]]);
  }
  return MixtureState{logits_from_weights(kw / kw.sum()), std::move(comps)};
}

}  // namespace

void PruneMergeConfig::validate() const {
  if (!(weight_floor > 0.0 && weight_floor < 1.0)) {
    throw InvalidInput("PruneMergeConfig: weight_floor must lie in (0,1)");
  }
  if (!(merge_radius >= 0.0)) throw InvalidInput("PruneMergeConfig: merge_radius must be >= 0");
  if (spread_beta && !(*spread_beta >= 0.0)) {
    throw InvalidInput("PruneMergeConfig: spread_beta must be >= 0");
  }
}

std::vector<std::size_t> prune_indices(const MixtureState& state, const PruneMergeConfig& cfg,
                                       const PruneContext& ctx) {
  cfg.validate();
  validate_state(state);
  const Vector w = state.weights();
  Eigen::Index heaviest = 0;
  w.maxCoeff(&heaviest);
  const double spread_limit =
      cfg.spread_beta ? ctx.sigma2_min + *cfg.spread_beta * (ctx.sigma2_init - ctx.sigma2_min)
                      : INFINITY;
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (static_cast<Eigen::Index>(k) == heaviest) {
      keep.push_back(k);
      continue;
    }
    if (w[static_cast<Eigen::Index>(k)] < cfg.weight_floor) continue;
    if (cfg.spread_beta && eigmax_cov(state.components[k].precision) > spread_limit) continue;
    keep.push_back(k);
  }
  return keep;
}

MixtureState prune(const MixtureState& state, const PruneMergeConfig& cfg,
                   const PruneContext& ctx) {
  const auto keep = prune_indices(state, cfg, ctx);
  if (keep.size() == state.size()) return state;
  return select(state, keep);
}

std::vector<std::vector<std::size_t>> merge_groups(const MixtureState& state, double radius) {
  if (!(radius >= 0.0)) throw InvalidInput("merge: radius must be >= 0");
  validate_state(state);
  return merge_impl(state, radius).groups;
}

MixtureState merge(const MixtureState& state, double radius) {
  if (!(radius >= 0.0)) throw InvalidInput("merge: radius must be >= 0");
  validate_state(state);
  auto res = merge_impl(state, radius);
  if (res.parts.size() == state.size()) return state;
  Vector w(static_cast<Eigen::Index>(res.parts.size()));
  std::vector<GaussianComponent> comps;
  for (std::size_t i = 0; i < res.parts.size(); ++i) {
    w[static_cast<Eigen::Index>(i)] = res.parts[i].weight;
    const auto& g = res.groups[i];
    comps.push_back(g.size() == 1 ? state.components[g.front()]
                                  : GaussianComponent::from_covariance(res.parts[i].mean,
                                                                       res.parts[i].cov));
  }
  return MixtureState{logits_from_weights(w / w.sum()), std::move(comps)};
}

std::vector<ResolvedMode> resolve_modes(const MixtureState& state, const PruneMergeConfig& cfg,
                                        const PruneContext& ctx) {
  const auto keep = prune_indices(state, cfg, ctx);
  const MixtureState pruned = keep.size() == state.size() ? state : select(state, keep);
  const auto merged = merge_impl(pruned, cfg.merge_radius);

  std::vector<ResolvedMode> modes;
  for (std::size_t i = 0; i < merged.parts.size(); ++i) {
    ResolvedMode m;
    m.center = merged.parts[i].mean;
    m.weight = merged.parts[i].weight;
    const auto& g = merged.groups[i];
    m.covariance = merged.parts[i].cov;
    for (auto j : g) m.source_components.push_back(keep[j]);
    modes.push_back(std::move(m));
  }
  // Canonical order first so that equal weights fall back to a label-free ordering.
  MixtureState tmp;
  tmp.logits = Vector::Zero(static_cast<Eigen::Index>(modes.size() - 1));
  for (const auto& m : modes) {
    tmp.components.push_back({m.center, m.covariance.inverse()});
  }
  const auto order = canonical_permutation(tmp);
  std::vector<ResolvedMode> sorted;
  for (auto i : order) sorted.push_back(modes[i]);
  std::stable_sort(sorted.begin(), sorted.end(), [](const ResolvedMode& a, const ResolvedMode& b) {
    return a.weight > b.weight;
  });
  return sorted;
}

ElbowResult elbow_scan(const PointMatrix& samples, const std::vector<double>& omega_grid,
                       std::size_t K, const FitConfig& cfg, const PruneMergeConfig& pm,
                       std::size_t threads) {
  if (omega_grid.empty()) throw InvalidInput("elbow_scan: empty omega grid");
  for (double w : omega_grid) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("elbow_scan: omega must be positive");
  }
  pm.validate();
  const PruneContext ctx{cfg.init.sigma2_init, cfg.bounds.sigma2_min};
  ElbowResult res;
  res.rows.resize(omega_grid.size());
  parallel_for(omega_grid.size(), threads, [&](std::size_t i) {
    FitConfig c = cfg;
    c.schedule = cfg.schedule.frozen_at(omega_grid[i]);
    c.seed = derive_seed(cfg.seed, stream::kCell, i);
    c.trajectory_every = 0;
    const FitResult fr = fit(samples, K, c);
    const MixtureState pruned = prune(fr.final_state, pm, ctx);
    const MixtureState merged = merge(pruned, pm.merge_radius);
    res.rows[i] = {omega_grid[i], pruned.size(), merged.size()};
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    const auto& b = res.rows[best];
    if (r.count_after_merge > b.count_after_merge ||
        (r.count_after_merge == b.count_after_merge && r.omega > b.omega)) {
      best = i;
    }
  }
  res.star_index = best;
  res.omega_star = res.rows[best].omega;
  return res;
}

std::vector<int> assign_clusters(const MixtureState& state, const PointMatrix& samples) {
  validate_state(state);
  if (samples.cols() != state.dim()) throw InvalidInput("assign_clusters: dimension mismatch");
  PreparedMixture pm(state);
  const std::size_t K = pm.size();
  std::vector<int> labels(static_cast<std::size_t>(samples.rows()), -1);
  std::vector<double> lj(K);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double lq = pm.log_joint(samples.row(i).data(), lj.data());
    if (!std::isfinite(lq)) continue;
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (lj[k] > lj[best]) best = k;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

}  // namespace gerve
