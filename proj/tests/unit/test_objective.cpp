#include "doctest.h"
#include "helpers.hpp"

#include "gerve/objective.hpp"

#include <cmath>

using namespace gerve;
using test::vec;

namespace {

MixtureState std_normal_1d(double var = 1.0) {
  return {Vector(0), {GaussianComponent::from_covariance(vec({0.0}), Matrix{{var}})}};
}

}  // namespace

TEST_CASE("empirical_objective without entropy is the mean density") {
  const MixtureState s = std_normal_1d();
  const Domain dom = Domain::cube(1, -10.0, 10.0);
  PointMatrix one(1, 1);
  one(0, 0) = 0.0;
  CHECK(empirical_objective(s, one, 0.0, dom, {}) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));

  Rng rng(2);
  const MixtureState m = test::random_state(3, 2, rng);
  const PointMatrix x = test::random_points(50, 2, rng);
  double direct = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) direct += mixture_density(m, x.row(i).transpose());
  direct /= 50.0;
  CHECK(empirical_objective(m, x, 0.0, Domain::cube(2, -5, 5), {}) ==
        doctest::Approx(direct).epsilon(1e-13));
  CHECK_THROWS_AS(empirical_objective(m, PointMatrix(0, 2), 0.0, Domain::cube(2, -5, 5), {}),
                  InvalidInput);
}

TEST_CASE("empirical_objective adds the closed-form entropy on a wide domain") {
  const double var = 0.7;
  const MixtureState s = std_normal_1d(var);
  const Domain dom = Domain::cube(1, -10.0 * std::sqrt(var), 10.0 * std::sqrt(var));
  EntropyConfig e{100000, 4};
  PointMatrix x(3, 1);
  x << -0.3, 0.1, 0.8;
  const double omega = 0.4;
  const double expected = data_term(s, x) + omega * 0.5 * std::log(2.0 * M_PI * M_E * var);
  const EntropyEstimate h = entropy_mc_estimate(s, dom, e);
  CHECK(std::abs(empirical_objective(s, x, omega, dom, e) - expected) <
        3.0 * omega * h.standard_error);
}

TEST_CASE("entropy_mc matches the Gaussian closed form") {
  const EntropyEstimate h = entropy_mc_estimate(std_normal_1d(), Domain::cube(1, -10, 10),
                                                {100000, 1});
  CHECK(std::abs(h.value - 0.5 * std::log(2.0 * M_PI * M_E)) < 3.0 * h.standard_error);
  CHECK(h.value == doctest::Approx(1.4189).epsilon(2e-3));
}

TEST_CASE("entropy_mc on a half-line domain matches brute force") {
  const MixtureState s = std_normal_1d();
  const EntropyEstimate h = entropy_mc_estimate(s, Domain::cube(1, 0.0, 10.0), {200000, 3});
  // Independent estimate: uniform sampling of -q log q over [0, 10].
  Rng rng(77);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const int n = 1000000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng);
    const double q = test::normal_pdf(x, 0.0, 1.0);
    const double v = q > 0.0 ? -10.0 * q * std::log(q) : 0.0;
    acc += v;
    acc2 += v * v;
  }
  const double bf = acc / n;
  const double bf_se = std::sqrt((acc2 / n - bf * bf) / n);
  const double se = std::hypot(h.standard_error, bf_se);
  CHECK(std::abs(h.value - bf) < 4.0 * se);
}

TEST_CASE("entropy_mc is insensitive to negligible tails") {
  const MixtureState s = std_normal_1d();
  const EntropyConfig e{20000, 9};
  const double a = entropy_mc(s, Domain::cube(1, -10, 10), e);
  const double b = entropy_mc(s, Domain::cube(1, -12, 12), e);
  CHECK(std::abs(a - b) < 1e-4);
}

TEST_CASE("entropy and gradients are seed-deterministic") {
  Rng rng(6);
  const MixtureState s = test::random_state(3, 2, rng);
  const Domain dom = Domain::cube(2, -6, 6);
  const EntropyConfig e{500, 42};
  CHECK(entropy_mc(s, dom, e) == entropy_mc(s, dom, e));
  const GradientBundle a = entropy_gradients(s, dom, e);
  const GradientBundle b = entropy_gradients(s, dom, e);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.gamma[k] == b.gamma[k]);
    CHECK(a.eta[k] == b.eta[k]);
  }
  CHECK(a.phi == b.phi);
  const EntropyConfig other{500, 43};
  CHECK(entropy_mc(s, dom, e) != entropy_mc(s, dom, other));
}

TEST_CASE("data_gradients examples") {
  Rng rng(1);
  const MixtureState s = test::random_state(2, 2, rng);
  PointMatrix at_mean(5, 2);
  for (int i = 0; i < 5; ++i) at_mean.row(i) = s.components[0].mean.transpose();
  CHECK(data_gradients(s, at_mean).g[0].cwiseAbs().maxCoeff() == 0.0);

  const MixtureState one = std_normal_1d();
  PointMatrix pm(2, 1);
  pm << 1.0, -1.0;
  CHECK(std::abs(data_gradients(one, pm).H[0](0, 0)) < 1e-17);
}

TEST_CASE("data_gradients match finite differences of the data term") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const MixtureState s = test::random_state(2, 2, rng);
    const PointMatrix x = test::random_points(40, 2, rng, 1.5);
    const GradientBundle g = data_gradients(s, x);
    const test::Direction dir = test::random_direction(s, rng);
    const double h = 1e-5;
    const double fd =
        (data_term(test::perturb(s, dir, h), x) - data_term(test::perturb(s, dir, -h), x)) /
        (2.0 * h);
    const double an = test::project(g, dir, false);
    CHECK(std::abs(fd - an) <= 1e-5 * std::max(std::abs(an), 1e-3));
  }
}

TEST_CASE("data_gradients are symmetric and unbiased under mini-batching") {
  Rng rng(31);
  const MixtureState s = test::random_state(2, 2, rng);
  const PointMatrix x = test::random_points(2000, 2, rng, 1.2);
  const GradientBundle full = data_gradients(s, x);
  for (const auto& m : full.H) CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  auto avg_error = [&](Eigen::Index B) {
    double err = 0.0;
    const int outer = 8;
    for (int o = 0; o < outer; ++o) {
      Vector acc = Vector::Zero(2);
      std::uniform_int_distribution<Eigen::Index> pick(0, x.rows() - 1);
      for (int r = 0; r < 200; ++r) {
        PointMatrix batch(B, 2);
        for (Eigen::Index i = 0; i < B; ++i) batch.row(i) = x.row(pick(rng));
        acc += data_gradients(s, batch).g[0];
      }
      err += (acc / 200.0 - full.g[0]).norm();
    }
    return err / outer;
  };
  const double e1 = avg_error(10);
  const double e2 = avg_error(160);
  const double slope = std::log(e2 / e1) / std::log(16.0);
  CHECK(slope < -0.25);
  CHECK(slope > -1.0);
}

TEST_CASE("entropy gradients of a single Gaussian") {
  for (double var : {1.0, 0.3}) {
    const MixtureState s = std_normal_1d(var);
    const Domain dom = Domain::cube(1, -12.0 * std::sqrt(var), 12.0 * std::sqrt(var));
    GradientBundle se;
    const GradientBundle g = entropy_gradients(s, dom, {100000, 5}, &se);
    CHECK(std::abs(g.gamma[0][0]) < 3.0 * se.gamma[0][0]);
    CHECK(std::abs(g.eta[0](0, 0) - 0.5 / var) < 3.0 * se.eta[0](0, 0));
  }
}

TEST_CASE("entropy weight gradient vanishes for identical components") {
  const GaussianComponent c = GaussianComponent::from_covariance(vec({0.0, 0.0}),
                                                                 Matrix::Identity(2, 2));
  const MixtureState s = MixtureState::from_weights(vec({0.5, 0.5}), {c, c});
  GradientBundle se;
  const GradientBundle g = entropy_gradients(s, Domain::cube(2, -12, 12), {50000, 8}, &se);
  CHECK(std::abs(g.phi[0]) < 3.0 * se.phi[0]);
}

TEST_CASE("entropy gradients are the derivative of the anchored estimate") {
  Rng rng(19);
  for (int d : {1, 2}) {
    const MixtureState s = test::random_state(3, d, rng);
    const Domain dom = Domain::cube(d, -4, 4);
    const EntropyConfig e{20000, 3};
    const GradientBundle g = entropy_gradients(s, dom, e);
    for (int trial = 0; trial < 3; ++trial) {
      const test::Direction dir = test::random_direction(s, rng);
      const double h = 1e-5;
      const double fd = (entropy_mc(test::perturb(s, dir, h), dom, e, &s) -
                         entropy_mc(test::perturb(s, dir, -h), dom, e, &s)) /
                        (2.0 * h);
      const double an = test::project(g, dir, true);
      CHECK(std::abs(fd - an) <= 1e-2 * std::max(std::abs(an), 1e-3));
    }
  }
}
