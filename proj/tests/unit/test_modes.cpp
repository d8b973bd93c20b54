#include "doctest.h"
#include "helpers.hpp"

#include "gerve/bench.hpp"
#include "gerve/modes.hpp"
#include "gerve/presets.hpp"

#include <cmath>

using namespace gerve;
using test::vec;

namespace {

GaussianComponent iso(const Vector& mu, double var) {
  return GaussianComponent::from_covariance(mu, var * Matrix::Identity(mu.size(), mu.size()));
}

PruneMergeConfig weight_only(double floor = 1e-3, double radius = 0.1) {
  PruneMergeConfig c;
  c.weight_floor = floor;
  c.spread_beta.reset();
  c.merge_radius = radius;
  return c;
}

bool same_state(const MixtureState& a, const MixtureState& b) {
  if (a.size() != b.size() || a.logits != b.logits) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.components[k].mean != b.components[k].mean) return false;
    if (a.components[k].precision != b.components[k].precision) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("prune examples") {
  const MixtureState heavy = MixtureState::from_weights(
      vec({0.5, 0.5}), {iso(vec({0.0, 0.0}), 0.1), iso(vec({1.0, 0.0}), 0.1)});
  CHECK(same_state(prune(heavy, weight_only(), {}), heavy));

  const MixtureState light = MixtureState::from_weights(
      vec({1.0 - 1e-4, 1e-4}), {iso(vec({0.0}), 0.1), iso(vec({1.0}), 0.1)});
  const MixtureState p = prune(light, weight_only(), {});
  CHECK(p.size() == 1);
  CHECK(p.weights()[0] == 1.0);
  CHECK(p.components[0].mean[0] == 0.0);

  PruneMergeConfig spread;
  spread.spread_beta = 0.018;
  const PruneContext ctx{5e-3, 1e-5};
  const double threshold = ctx.sigma2_min + 0.018 * (ctx.sigma2_init - ctx.sigma2_min);
  CHECK(threshold == doctest::Approx(10.0 * ctx.sigma2_min).epsilon(2e-3));
  const MixtureState wide = MixtureState::from_weights(
      vec({0.6, 0.4}), {iso(vec({0.0, 0.0}), 5e-5), iso(vec({0.5, 0.5}), 2e-4)});
  CHECK(prune_indices(wide, spread, ctx) == std::vector<std::size_t>{0});
}

TEST_CASE("prune keeps the heaviest component and is idempotent") {
  const MixtureState all_bad = MixtureState::from_weights(
      vec({0.3, 0.7}), {iso(vec({0.0}), 1.0), iso(vec({3.0}), 2.0)});
  PruneMergeConfig spread;
  spread.spread_beta = 0.01;
  const MixtureState p = prune(all_bad, spread, {0.5, 1e-3});
  CHECK(p.size() == 1);
  CHECK(p.components[0].mean[0] == 3.0);

  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    MixtureState s = test::random_state(6, 2, rng);
    s.logits *= 4.0;
    const PruneMergeConfig c = weight_only(0.05);
    const MixtureState once = prune(s, c, {});
    CHECK(once.size() >= 1);
    CHECK(std::abs(once.weights().sum() - 1.0) < 1e-12);
    CHECK(same_state(prune(once, c, {}), once));
  }
}

TEST_CASE("merge examples") {
  const MixtureState far = MixtureState::from_weights(
      vec({0.5, 0.5}), {iso(vec({0.0}), 0.1), iso(vec({1.0}), 0.1)});
  CHECK(same_state(merge(far, 0.5), far));

  const GaussianComponent c = iso(vec({0.3, 0.3}), 0.2);
  const MixtureState dup = MixtureState::from_weights(vec({0.25, 0.25, 0.5}),
                                                      {c, c, iso(vec({3.0, 3.0}), 0.2)});
  const MixtureState m = merge(dup, 0.01);
  REQUIRE(m.size() == 2);
  CHECK(m.components[0].mean.isApprox(c.mean));
  CHECK(m.components[0].covariance().isApprox(c.covariance()));
  CHECK(m.weights()[0] == doctest::Approx(0.5).epsilon(1e-14));

  const double a = 0.2, s2 = 0.05;
  const MixtureState pair = MixtureState::from_weights(
      vec({0.5, 0.5}), {iso(vec({-a}), s2), iso(vec({a}), s2)});
  const MixtureState mp = merge(pair, 2.0 * a);
  REQUIRE(mp.size() == 1);
  CHECK(mp.components[0].mean[0] == doctest::Approx(0.0));
  CHECK(mp.components[0].covariance()(0, 0) == doctest::Approx(s2 + a * a).epsilon(1e-12));
}

TEST_CASE("merge uses single linkage and iterates to a fixed point") {
  const MixtureState chain = MixtureState::from_weights(
      vec({1.0, 1.0, 1.0}) / 3.0,
      {iso(vec({0.0}), 0.1), iso(vec({0.09}), 0.1), iso(vec({0.18}), 0.1)});
  CHECK(merge(chain, 0.1).size() == 1);
  CHECK(merge_groups(chain, 0.1) == std::vector<std::vector<std::size_t>>{{0, 1, 2}});
}

TEST_CASE("merge preserves weight and moments and is idempotent") {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const MixtureState s = test::random_state(6, 2, rng);
    const MixtureState m = merge(s, 1.0);
    CHECK(std::abs(m.weights().sum() - 1.0) < 1e-12);
    auto first = [](const MixtureState& x) {
      Vector mu = Vector::Zero(x.dim());
      for (std::size_t k = 0; k < x.size(); ++k) {
        mu += x.weights()[static_cast<Eigen::Index>(k)] * x.components[k].mean;
      }
      return mu;
    };
    auto second = [&](const MixtureState& x) {
      Matrix m2 = Matrix::Zero(x.dim(), x.dim());
      for (std::size_t k = 0; k < x.size(); ++k) {
        const Vector& mu = x.components[k].mean;
        m2 += x.weights()[static_cast<Eigen::Index>(k)] *
              (x.components[k].covariance() + mu * mu.transpose());
      }
      return m2;
    };
    CHECK((first(m) - first(s)).norm() < 1e-12);
    CHECK((second(m) - second(s)).norm() < 1e-10);
    const MixtureState again = merge(m, 1.0);
    CHECK(again.size() == m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      CHECK((again.components[k].mean - m.components[k].mean).norm() < 1e-14);
    }
  }
}

TEST_CASE("resolve_modes orders by weight and respects bounds on the count") {
  const MixtureState single{Vector(0), {iso(vec({0.4, 0.1}), 0.3)}};
  const auto one = resolve_modes(single, weight_only(), {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].center == vec({0.4, 0.1}));
  CHECK(one[0].weight == 1.0);

  const MixtureState s = MixtureState::from_weights(
      vec({0.2, 0.2, 0.5, 0.0999, 0.0001}),
      {iso(vec({0.0, 0.0}), 0.1), iso(vec({0.02, 0.0}), 0.1), iso(vec({2.0, 0.0}), 0.1),
       iso(vec({-2.0, 0.0}), 0.1), iso(vec({5.0, 5.0}), 0.1)});
  const auto modes = resolve_modes(s, weight_only(1e-3, 0.05), {});
  REQUIRE(modes.size() == 3);
  CHECK(modes[0].weight >= modes[1].weight);
  CHECK(modes[1].weight >= modes[2].weight);
  CHECK(modes[2].center[0] == doctest::Approx(-2.0));
  CHECK(modes[1].source_components == std::vector<std::size_t>{0, 1});

  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const MixtureState r = test::random_state(5, 2, rng);
    const auto rm = resolve_modes(r, PruneMergeConfig{}, {});
    CHECK(rm.size() >= 1);
    CHECK(rm.size() <= 5);
  }
}

TEST_CASE("assign_clusters examples") {
  Rng rng(18);
  const PointMatrix x = test::random_points(100, 2, rng);
  const MixtureState one{Vector(0), {iso(vec({0.0, 0.0}), 1.0)}};
  for (int l : assign_clusters(one, x)) CHECK(l == 0);

  const MixtureState two = MixtureState::from_weights(
      vec({0.5, 0.5}), {iso(vec({-2.0, 0.0}), 0.25), iso(vec({2.0, 0.0}), 0.25)});
  const PointMatrix y = gen_mixture_sample(MixtureSpec::two_blob(0.05), 1000, 3) * 2.0;
  const auto labels = assign_clusters(two, y);
  int agree = 0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const int nearest = y(i, 0) < 0.0 ? 0 : 1;
    agree += labels[static_cast<std::size_t>(i)] == nearest;
  }
  CHECK(agree >= 990);

  const double c = std::cos(M_PI / 6.0);
  const MixtureState cfg = MixtureState::from_weights(
      vec({0.16, 0.80, 0.04}),
      {iso(vec({-c, -0.5}), 0.30), iso(vec({0.0, 1.0}), 0.95), iso(vec({c, 0.0}), 0.10)});
  PointMatrix p(1, 2);
  p << 0.0, 1.0;
  CHECK(assign_clusters(cfg, p)[0] == 1);

  const MixtureState tight{Vector(0), {iso(vec({0.0, 0.0}), 1e-6)}};
  PointMatrix far(1, 2);
  far << 1e200, 1e200;
  CHECK(assign_clusters(tight, far)[0] == -1);
}

TEST_CASE("assign_clusters commutes with canonical order") {
  Rng rng(19);
  const MixtureState s = test::random_state(4, 2, rng);
  const PointMatrix x = test::random_points(200, 2, rng, 2.0);
  const auto perm = canonical_permutation(s);
  const auto a = assign_clusters(s, x);
  const auto b = assign_clusters(canonical_order(s), x);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(static_cast<std::size_t>(a[i]) == perm[static_cast<std::size_t>(b[i])]);
  }
}

TEST_CASE("elbow_scan on unimodal data selects the largest temperature") {
  const PointMatrix x =
      gen_mixture_sample(MixtureSpec::single(vec({0.0}), Matrix{{0.2}}), 1500, 5);
  FitConfig cfg;
  cfg.T = 600;
  cfg.B = 300;
  cfg.seed = 3;
  cfg.schedule.rho1 = 0.05;
  cfg.bounds.sigma2_min = 0.01;
  cfg.bounds.sigma2_max = 2.0;
  cfg.init.sigma2_init = 0.3;
  const ElbowResult r = elbow_scan(x, {0.1, 0.03, 0.01}, 2, cfg, weight_only(1e-3, 0.2));
  for (const auto& row : r.rows) CHECK(row.count_after_merge == 1);
  CHECK(r.omega_star == 0.1);
  CHECK(r.star_index == 0);
  CHECK_THROWS_AS(elbow_scan(x, {}, 2, cfg, weight_only()), InvalidInput);
}

TEST_CASE("elbow_scan on the triangle mixture peaks at three modes") {
  const PointMatrix x = gen_mixture_sample(MixtureSpec::triangle(0.1), 3000, 21);
  Preset p = triangle_modes_preset(5);
  p.fit.T = 1500;
  p.fit.seed = 4;
  const ElbowResult r = elbow_scan(x, p.omega_grid, p.K, p.fit, p.prune);
  std::size_t peak = 0;
  for (const auto& row : r.rows) {
    CHECK(row.count_after_merge <= p.K);
    CHECK(row.count_after_merge <= row.count_after_prune);
    peak = std::max(peak, row.count_after_merge);
  }
  CHECK(peak >= 3);
  CHECK(r.rows[r.star_index].count_after_merge == peak);
  for (std::size_t i = 0; i < r.star_index; ++i) CHECK(r.rows[i].count_after_merge < peak);
}
