#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <random>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "liexp/lie_core.hpp"

namespace oracles {

using liexp::cplx;
using liexp::Mat;
using liexp::Vec;

inline liexp::AlgElement random_element(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  liexp::AlgElement x = liexp::AlgElement::zero(d);
  for (int k = 0; k < d; ++k) x.coeffs(k) = n(rng);
  return x;
}

inline Mat random_matrix(int n, std::mt19937_64& rng, bool complex = true) {
  std::normal_distribution<double> g;
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), complex ? g(rng) : 0.0);
  return m;
}

inline Vec random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

/// Pade-based matrix exponential from Eigen's unsupported module.
inline Mat expm(const Mat& a) { return a.exp(); }

inline Mat logm(const Mat& a) { return a.log(); }

/// Largest singular value by a full SVD.
inline double op_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

/// Operator norm induced by a weighted l2 seminorm with strictly positive
/// weights: ||W T W^{-1}||_2.
inline double weighted_op_norm(const Mat& t, const std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(w.size());
  Mat s = t;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) *= w[i] / w[j];
  return op_norm(s);
}

/// Sup of p(Tx)/p(x) over random unit vectors; a lower bound for the induced
/// norm that converges from below.
template <class P>
double sampled_ratio(const Mat& t, P&& p, int n, int samples, std::mt19937_64& rng) {
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec x = random_vector(n, rng);
    const double px = p(x);
    if (px > 1e-12) best = std::max(best, p(Vec(t * x)) / px);
  }
  return best;
}

/// Composite Simpson rule on [a, b] with 2m panels.
template <class F>
std::invoke_result_t<F, double> simpson(F&& f, double a, double b, int m) {
  const double h = (b - a) / (2 * m);
  decltype(f(a)) sum = f(a);
  sum += f(b);
  for (int i = 1; i < 2 * m; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  sum *= h / 3.0;
  return sum;
}

}  // namespace oracles
