#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/expm.hpp"

namespace liexp {

/// Nested c[i][j][k] form used at the I/O boundary.
using StructureTensor = std::vector<std::vector<std::vector<double>>>;

inline constexpr double kAlgebraTol = 1e-12;

namespace detail {

inline int tensor_dim(const StructureTensor& c) {
  const auto d = c.size();
  if (d == 0) throw DimensionError("structure tensor is empty", 0);
  for (const auto& row : c) {
    if (row.size() != d) throw DimensionError("structure tensor axis 1 has wrong length", 1);
    for (const auto& fibre : row)
      if (fibre.size() != d) throw DimensionError("structure tensor axis 2 has wrong length", 2);
  }
  return static_cast<int>(d);
}

}  // namespace detail

/// Antisymmetry and Jacobi residuals of a candidate structure tensor.
inline Report validate_algebra(const StructureTensor& c) {
  const int d = detail::tensor_dim(c);
  double antisym = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) antisym = std::max(antisym, std::abs(c[i][j][k] + c[j][i][k]));

  double jacobi = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int m = 0; m < d; ++m)
            s += c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l];
          jacobi = std::max(jacobi, std::abs(s));
        }

  Report r;
  r.name = "validate_algebra";
  r.residuals["antisymmetry"] = antisym;
  r.residuals["jacobi"] = jacobi;
  r.constants["dim"] = d;
  r.constants["tolerance"] = kAlgebraTol;
  if (antisym > kAlgebraTol) r.fail("antisymmetry violated");
  if (jacobi > kAlgebraTol) r.fail("Jacobi identity violated");
  return r;
}

/// Element of the complexified algebra, coefficients in the ordered basis.
struct AlgElement {
  Vec coeffs;

  static AlgElement basis(int d, int k) {
    AlgElement e{Vec::Zero(d)};
    e.coeffs(k) = 1.0;
    return e;
  }
  static AlgElement zero(int d) { return AlgElement{Vec::Zero(d)}; }
  int dim() const { return static_cast<int>(coeffs.size()); }

  friend AlgElement operator+(const AlgElement& a, const AlgElement& b) {
    return AlgElement{a.coeffs + b.coeffs};
  }
  friend AlgElement operator-(const AlgElement& a, const AlgElement& b) {
    return AlgElement{a.coeffs - b.coeffs};
  }
  friend AlgElement operator*(cplx s, const AlgElement& a) { return AlgElement{s * a.coeffs}; }
};

/// Real Lie algebra given by dense structure constants,
/// [e_i, e_j] = sum_k c[i][j][k] e_k.
class LieAlgebra {
 public:
  /// Validates the tensor; throws PreconditionError when the axioms fail.
  explicit LieAlgebra(const StructureTensor& c, std::string name = {})
      : dim_(detail::tensor_dim(c)), c_(static_cast<std::size_t>(dim_) * dim_ * dim_), name_(std::move(name)) {
    const Report r = validate_algebra(c);
    if (!r.pass)
      throw PreconditionError("not a Lie algebra: antisymmetry residual " +
                              r.residuals["antisymmetry"].dump() + ", Jacobi residual " +
                              r.residuals["jacobi"].dump());
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) c_[index(i, j, k)] = c[i][j][k];
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double structure(int i, int j, int k) const { return c_[index(i, j, k)]; }

  StructureTensor tensor() const {
    StructureTensor t(dim_, std::vector<std::vector<double>>(dim_, std::vector<double>(dim_)));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) t[i][j][k] = structure(i, j, k);
    return t;
  }

  bool is_abelian() const {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
  }

  void check(const AlgElement& x) const {
    if (x.dim() != dim_)
      throw DimensionError("element has " + std::to_string(x.dim()) + " coefficients, algebra dimension is " +
                           std::to_string(dim_));
  }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }

  int dim_;
  std::vector<double> c_;
  std::string name_;
};

inline AlgElement bracket(const LieAlgebra& g, const AlgElement& x, const AlgElement& y) {
  g.check(x);
  g.check(y);
  const int d = g.dim();
  AlgElement z = AlgElement::zero(d);
  for (int i = 0; i < d; ++i) {
    if (x.coeffs(i) == 0.0) continue;
    for (int j = 0; j < d; ++j) {
      const cplx xy = x.coeffs(i) * y.coeffs(j);
      if (xy == 0.0) continue;
      for (int k = 0; k < d; ++k) z.coeffs(k) += xy * g.structure(i, j, k);
    }
  }
  return z;
}

/// Matrix of ad a in the ordered basis: column j holds [a, e_j].
inline Mat ad_matrix(const LieAlgebra& g, const AlgElement& a) {
  g.check(a);
  const int d = g.dim();
  Mat m = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) m.col(j) = bracket(g, a, AlgElement::basis(d, j)).coeffs;
  return m;
}

struct ElementNorms {
  double one_norm;
  double ad_op_norm;
};

/// |a|_1 and the |.|_1-induced operator norm of ad a.
inline ElementNorms norms(const LieAlgebra& g, const AlgElement& a) {
  g.check(a);
  return {a.coeffs.cwiseAbs().sum(), one_norm(ad_matrix(g, a))};
}

/// Primary decomposition of ad a: clustered eigenvalues, spectral projections
/// onto generalized eigenspaces, and nilpotency indices.
struct AdSpectralData {
  std::vector<cplx> eigenvalues;
  std::vector<Mat> projections;
  std::vector<int> indices;
  std::vector<int> multiplicities;
  double cluster_tol = 0.0;
  bool ambiguous_clusters = false;
  json report = json::object();
};

inline AdSpectralData ad_spectral_data(const LieAlgebra& g, const AlgElement& a) {
  const Mat ad = ad_matrix(g, a);
  const int d = g.dim();
  const double adnorm = one_norm(ad);

  AdSpectralData out;
  out.cluster_tol = 1e-8 * std::max(1.0, adnorm);
  const Vec ev = eigenvalues(ad);

  // Single-linkage clustering in a fixed order so results are reproducible.
  std::vector<cplx> raw(ev.data(), ev.data() + ev.size());
  std::sort(raw.begin(), raw.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  std::vector<std::vector<cplx>> clusters;
  for (cplx z : raw) {
    std::vector<std::size_t> hits;
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (cplx w : clusters[c])
        if (std::abs(z - w) <= 2.0 * out.cluster_tol) {
          hits.push_back(c);
          break;
        }
    if (hits.empty()) {
      clusters.push_back({z});
      continue;
    }
    // Anything inside 2*tol but outside tol is a judgement call; merge and flag.
    for (std::size_t c : hits)
      for (cplx w : clusters[c])
        if (std::abs(z - w) > out.cluster_tol) out.ambiguous_clusters = true;
    auto& target = clusters[hits.front()];
    target.push_back(z);
    for (std::size_t h = hits.size(); h-- > 1;) {
      target.insert(target.end(), clusters[hits[h]].begin(), clusters[hits[h]].end());
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(hits[h]));
    }
  }

  const Mat id = Mat::Identity(d, d);
  std::vector<Mat> bases;
  for (const auto& cl : clusters) {
    cplx mu = 0.0;
    for (cplx z : cl) mu += z;
    mu /= static_cast<double>(cl.size());
    if (std::abs(mu.real()) <= out.cluster_tol) mu.real(0.0);
    if (std::abs(mu.imag()) <= out.cluster_tol) mu.imag(0.0);
    const int mult = static_cast<int>(cl.size());
    Mat power = id;
    for (int s = 0; s < mult; ++s) power = power * (ad - mu * id);
    // The generalized eigenspace is the kernel of (ad - mu)^mult; take the
    // right singular vectors of the `mult` smallest singular values.
    Eigen::JacobiSVD<Mat> svd(power, Eigen::ComputeFullV);
    bases.push_back(svd.matrixV().rightCols(mult));
    out.eigenvalues.push_back(mu);
    out.multiplicities.push_back(mult);
  }

  Mat v(d, d);
  int col = 0;
  for (const auto& b : bases) {
    v.middleCols(col, b.cols()) = b;
    col += static_cast<int>(b.cols());
  }
  const Mat w = v.inverse();
  col = 0;
  for (std::size_t j = 0; j < bases.size(); ++j) {
    const auto m = bases[j].cols();
    out.projections.push_back(v.middleCols(col, m) * w.middleRows(col, m));
    col += static_cast<int>(m);
  }

  for (std::size_t j = 0; j < out.eigenvalues.size(); ++j) {
    const Mat shifted = ad - out.eigenvalues[j] * id;
    Mat power = out.projections[j];
    int s = 0;
    const double scale = std::max(1.0, adnorm);
    for (;; ++s) {
      power = shifted * power;
      if (power.norm() <= out.cluster_tol * std::pow(scale, s + 1) || s >= d) break;
    }
    out.indices.push_back(s);
  }

  out.report["cluster_tol"] = out.cluster_tol;
  out.report["ambiguous_clusters"] = out.ambiguous_clusters;
  json evs = json::array();
  for (cplx mu : out.eigenvalues) evs.push_back(cplx_json(mu));
  out.report["eigenvalues"] = evs;
  out.report["indices"] = out.indices;
  return out;
}

/// exp(-t ad a)(b) by term summation, cross-checked against the matrix
/// exponential of -t ad a. A disagreement above 1e-9 is an internal error.
inline AlgElement exp_ad(const LieAlgebra& g, double t, const AlgElement& a, const AlgElement& b,
                         double tol = 1e-14) {
  if (!(tol > 0.0)) throw PreconditionError("exp_ad: tol must be positive");
  g.check(b);
  const Mat ad = ad_matrix(g, a);
  const double x = std::abs(t) * one_norm(ad);
  const double bnorm = b.coeffs.cwiseAbs().sum();

  Vec sum = b.coeffs;
  Vec term = b.coeffs;
  double bound = bnorm;  // x^k / k! * |b|_1
  for (int k = 1; k < 10000; ++k) {
    term = (-t / k) * (ad * term);
    sum += term;
    bound *= x / k;
    // Geometric majorant of the remaining tail once k + 2 > x.
    if (k + 2 > x) {
      const double tail = bound * x / (k + 1) / (1.0 - x / (k + 2));
      if (tail < tol) break;
    }
  }

  const Vec via_expm = expm(ad, -t) * b.coeffs;
  const double mismatch = (via_expm - sum).cwiseAbs().sum() / std::max(1.0, sum.cwiseAbs().sum());
  if (mismatch > 1e-9)
    throw std::logic_error("exp_ad: series and matrix exponential disagree by " + std::to_string(mismatch));
  return AlgElement{sum};
}

}  // namespace liexp
