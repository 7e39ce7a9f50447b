#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace liexp {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using json = nlohmann::ordered_json;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class of every rejection raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not line up (tensor axes, element lengths, matrix sizes).
class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, int axis = -1)
      : Error(what), axis_(axis) {}
  int axis() const { return axis_; }

 private:
  int axis_;
};

/// An operation was called outside its stated domain (spectral conditions,
/// missing kernel invariance, unmet hypotheses).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numeric range exceeded (matrix exponential overflow and the like).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Doubles that may be infinite or NaN are emitted as strings so reports stay
/// valid JSON.
inline json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json cplx_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

inline json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(num(v(i).real()));
    a.push_back(num(v(i).imag()));
  }
  return a;
}

inline json rvec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

/// Structured outcome of a verification. `pass` is the verdict, everything
/// else is evidence.
struct Report {
  std::string name;
  bool pass = true;
  json residuals = json::object();
  json constants = json::object();
  json witnesses = json::object();
  json grids = json::object();
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    pass = false;
    notes.push_back(why);
  }

  json to_json() const {
    json j;
    j["name"] = name;
    j["outcome"] = pass ? "pass" : "fail";
    j["residuals"] = residuals;
    j["constants"] = constants;
    j["witnesses"] = witnesses;
    j["grids"] = grids;
    j["notes"] = notes;
    return j;
  }
};

/// Residual normalization shared by the identity verifiers.
inline double normalized_residual(const Mat& lhs, const Mat& rhs) {
  const double scale = std::max({1.0, lhs.norm(), rhs.norm()});
  return (lhs - rhs).norm() / scale;
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Operator norm induced by |.|_1 (maximum absolute column sum).
inline double one_norm(const Mat& m) {
  return m.size() ? m.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
}

/// Largest singular value, read off the Gram matrix (accurate to unit
/// roundoff relative to the result, which is all the norm checks need).
inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const Mat gram = m.rows() >= m.cols() ? Mat(m.adjoint() * m) : Mat(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

inline double smallest_singular_value(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline Vec eigenvalues(const Mat& m) {
  if (m.rows() == 0) return Vec(0);
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  return es.eigenvalues();
}

inline double spectral_radius(const Mat& m) {
  const Vec ev = eigenvalues(m);
  return ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
}

inline double spectral_bound(const Mat& m) {
  const Vec ev = eigenvalues(m);
  double s = -kInf;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s = std::max(s, ev(i).real());
  return s;
}

/// Distance from z to the nearest point of a finite set.
inline double distance_to(cplx z, const Vec& points) {
  double d = kInf;
  for (Eigen::Index i = 0; i < points.size(); ++i) d = std::min(d, std::abs(z - points(i)));
  return d;
}

inline bool is_normal(const Mat& a, double tol = 1e-12) {
  const Mat c = a * a.adjoint() - a.adjoint() * a;
  return c.norm() <= tol * std::max(1.0, a.squaredNorm());
}

/// Log-spaced grid with `per_decade` points per decade over [lo, hi], both
/// endpoints included.
inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const int n = std::max(1, static_cast<int>(std::lround(std::log10(hi / lo) * per_decade)));
  std::vector<double> g;
  g.reserve(n + 1);
  for (int i = 0; i <= n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> g;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) g.push_back(lo + (hi - lo) * i / (count - 1));
  return g;
}

}  // namespace liexp
