#pragma once

#include "gerve/mixture.hpp"
#include "gerve/random.hpp"

#include <cmath>
#include <random>

namespace test {

using gerve::Matrix;
using gerve::PointMatrix;
using gerve::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Matrix random_spd(Eigen::Index d, gerve::Rng& rng, double lo = 0.3, double hi = 2.0) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(lo, hi);
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = nd(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Vector ev(d);
  for (Eigen::Index i = 0; i < d; ++i) ev[i] = ud(rng);
  Matrix s = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

inline PointMatrix random_points(Eigen::Index n, Eigen::Index d, gerve::Rng& rng,
                                 double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  PointMatrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = nd(rng);
  }
  return x;
}

inline gerve::MixtureState random_state(std::size_t K, Eigen::Index d, gerve::Rng& rng) {
  std::normal_distribution<double> nd;
  std::vector<gerve::GaussianComponent> comps;
  for (std::size_t k = 0; k < K; ++k) {
    Vector mu(d);
    for (Eigen::Index j = 0; j < d; ++j) mu[j] = nd(rng);
    comps.push_back({mu, random_spd(d, rng)});
  }
  Vector logits(static_cast<Eigen::Index>(K - 1));
  for (Eigen::Index k = 0; k < logits.size(); ++k) logits[k] = 0.5 * nd(rng);
  return {logits, comps};
}

inline double normal_pdf(double x, double mu, double var) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / var) / std::sqrt(2.0 * M_PI * var);
}


// Direction in (mean, covariance, weight) coordinates, matching GradientBundle.
struct Direction {
  std::vector<Vector> dmu;
  std::vector<Matrix> dsigma;
  Vector dpi;  // K-1 entries; pi_K absorbs the negative sum
};

inline Direction random_direction(const gerve::MixtureState& s, gerve::Rng& rng) {
  std::normal_distribution<double> nd;
  const Eigen::Index d = s.dim();
  Direction dir;
  for (std::size_t k = 0; k < s.size(); ++k) {
    Vector m(d);
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      m[i] = nd(rng);
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = nd(rng);
    }
    dir.dmu.push_back(m);
    dir.dsigma.push_back(0.5 * (a + a.transpose()));
  }
  dir.dpi = Vector(static_cast<Eigen::Index>(s.size() - 1));
  for (Eigen::Index k = 0; k < dir.dpi.size(); ++k) dir.dpi[k] = 0.1 * nd(rng);
  return dir;
}

inline gerve::MixtureState perturb(const gerve::MixtureState& s, const Direction& dir, double h) {
  Vector w = s.weights();
  const Eigen::Index K = w.size();
  for (Eigen::Index k = 0; k + 1 < K; ++k) {
    w[k] += h * dir.dpi[k];
    w[K - 1] -= h * dir.dpi[k];
  }
  std::vector<gerve::GaussianComponent> comps;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Matrix cov = s.components[k].covariance() + h * dir.dsigma[k];
    comps.push_back(gerve::GaussianComponent::from_covariance(
        s.components[k].mean + h * dir.dmu[k], cov));
  }
  gerve::MixtureState out{gerve::logits_from_weights(w), comps};
  return out;
}

// <grad, dir> for the data blocks (entropy = false) or entropy blocks (entropy = true).
template <class Bundle>
double project(const Bundle& g, const Direction& dir, bool entropy) {
  double v = 0.0;
  const auto& mu = entropy ? g.gamma : g.g;
  const auto& sig = entropy ? g.eta : g.H;
  const auto& pi = entropy ? g.phi : g.f;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    v += mu[k].dot(dir.dmu[k]);
    v += (sig[k].array() * dir.dsigma[k].array()).sum();
  }
  v += pi.dot(dir.dpi);
  return v;
}

}  // namespace test
