#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace liexp {

/// Gauss-Legendre rule on [-1, 1]; nodes from Newton iteration on the
/// three-term Legendre recurrence.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n) : nodes_(n), weights_(n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: need at least one node");
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        // p1 = P_n(x), p0 = P_{n-1}(x)
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes_[i] = -x;
      nodes_[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights_[i] = w;
      weights_[n - 1 - i] = w;
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Integral of f over [a, b]; f may return any vector-space value
  /// (scalars, Eigen matrices).
  template <class F>
  auto integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    auto acc = f(mid + half * nodes_[0]);
    acc *= weights_[0];
    for (int i = 1; i < size(); ++i) {
      auto v = f(mid + half * nodes_[i]);
      acc += weights_[i] * v;
    }
    acc *= half;
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace liexp
