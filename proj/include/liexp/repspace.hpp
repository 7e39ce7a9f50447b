#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/enveloping.hpp"
#include "liexp/lie_core.hpp"

namespace liexp {

/// d complex N x N matrices B_k realizing the algebra.
struct MatrixRep {
  int space_dim = 0;
  std::vector<Mat> matrices;
  std::vector<std::string> labels;

  int algebra_dim() const { return static_cast<int>(matrices.size()); }

  /// Representation image of an algebra element, sum_k a_k B_k.
  Mat eval(const AlgElement& a) const {
    if (a.dim() != algebra_dim()) throw DimensionError("element dimension does not match representation");
    Mat m = Mat::Zero(space_dim, space_dim);
    for (int k = 0; k < algebra_dim(); ++k) m += a.coeffs(k) * matrices[k];
    return m;
  }

  Mat eval(const EnvElement& e) const { return word_eval(matrices, space_dim, e); }

  Mat monomial(const Word& w) const {
    Mat m = Mat::Identity(space_dim, space_dim);
    for (int letter : w) m = m * matrices.at(letter);
    return m;
  }
};

/// max_{i,j} |[B_i,B_j] - sum_k c_ij^k B_k|_F.
inline double homomorphism_residual(const LieAlgebra& g, const MatrixRep& rep) {
  if (rep.algebra_dim() != g.dim())
    throw DimensionError("representation has " + std::to_string(rep.algebra_dim()) + " matrices, algebra dimension " +
                         std::to_string(g.dim()));
  double worst = 0.0;
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) {
      Mat diff = rep.matrices[i] * rep.matrices[j] - rep.matrices[j] * rep.matrices[i];
      for (int k = 0; k < g.dim(); ++k) diff -= g.structure(i, j, k) * rep.matrices[k];
      worst = std::max(worst, diff.norm());
    }
  return worst;
}

inline void validate_rep(const LieAlgebra& g, const MatrixRep& rep) {
  double scale = 0.0;
  for (const Mat& b : rep.matrices) {
    if (b.rows() != rep.space_dim || b.cols() != rep.space_dim)
      throw DimensionError("representation matrix is not " + std::to_string(rep.space_dim) + "x" +
                           std::to_string(rep.space_dim));
    scale = std::max(scale, b.norm());
  }
  const double res = homomorphism_residual(g, rep);
  if (res > 1e-10 * (1.0 + scale))
    throw PreconditionError("matrices do not satisfy the bracket relations (residual " + std::to_string(res) + ")");
}

enum class SeminormKind { weighted_l2, weighted_linf, quotient_l2, matrix_op, max_of };

inline std::string to_string(SeminormKind k) {
  switch (k) {
    case SeminormKind::weighted_l2: return "weighted_l2";
    case SeminormKind::weighted_linf: return "weighted_linf";
    case SeminormKind::quotient_l2: return "quotient_l2";
    case SeminormKind::matrix_op: return "matrix_op";
    case SeminormKind::max_of: return "max_of";
  }
  return "unknown";
}

/// A seminorm on C^N with an explicit quotient: p(x) = nu(D C x) where C maps
/// onto coordinates of X / N_p and nu is l2 or l-infinity.
class Seminorm {
 public:
  static Seminorm weighted_l2(std::vector<double> w) { return weighted(SeminormKind::weighted_l2, std::move(w)); }
  static Seminorm weighted_linf(std::vector<double> w) { return weighted(SeminormKind::weighted_linf, std::move(w)); }

  static Seminorm l2(int n) { return weighted_l2(std::vector<double>(n, 1.0)); }

  /// p(x) = |Pi x|_2 for an orthogonal projection Pi.
  static Seminorm quotient_l2(const Mat& projection) {
    const auto n = projection.rows();
    if (projection.cols() != n) throw DimensionError("projection must be square");
    if ((projection - projection.adjoint()).norm() > 1e-10 || (projection * projection - projection).norm() > 1e-10)
      throw PreconditionError("quotient_l2 needs a Hermitian idempotent projection");
    Seminorm s;
    s.kind_ = SeminormKind::quotient_l2;
    s.n_ = static_cast<int>(n);
    s.projection_ = projection;
    Eigen::SelfAdjointEigenSolver<Mat> es(projection);
    std::vector<Eigen::Index> keep, drop;
    for (Eigen::Index i = 0; i < n; ++i) (es.eigenvalues()(i) > 0.5 ? keep : drop).push_back(i);
    s.coords_ = Mat(keep.size(), n);
    s.lift_ = Mat(n, keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      s.lift_.col(i) = es.eigenvectors().col(keep[i]);
      s.coords_.row(i) = es.eigenvectors().col(keep[i]).adjoint();
    }
    s.kernel_ = Mat(n, drop.size());
    for (std::size_t i = 0; i < drop.size(); ++i) s.kernel_.col(i) = es.eigenvectors().col(drop[i]);
    s.scale_ = RVec::Ones(static_cast<Eigen::Index>(keep.size()));
    return s;
  }

  /// Operator norm of the coordinate vector read as an n x n matrix
  /// (row-major); used for matrix algebras.
  static Seminorm matrix_op(int n) {
    Seminorm s;
    s.kind_ = SeminormKind::matrix_op;
    s.n_ = n * n;
    s.block_ = n;
    s.kernel_ = Mat(s.n_, 0);
    return s;
  }

  static Seminorm max_of(std::vector<Seminorm> parts) {
    std::vector<Seminorm> leaves;
    for (auto& p : parts) {
      if (p.kind_ == SeminormKind::max_of)
        leaves.insert(leaves.end(), p.leaves_.begin(), p.leaves_.end());
      else
        leaves.push_back(std::move(p));
    }
    if (leaves.empty()) throw PreconditionError("max_of needs at least one seminorm");
    if (leaves.size() == 1) return leaves.front();
    Seminorm s;
    s.kind_ = SeminormKind::max_of;
    s.n_ = leaves.front().n_;
    for (const auto& l : leaves)
      if (l.n_ != s.n_) throw DimensionError("max_of: seminorms act on different spaces");
    s.leaves_ = std::move(leaves);
    // Kernel of the max is the intersection of the leaf kernels.
    Mat stacked(0, s.n_);
    for (const auto& l : s.leaves_) {
      if (l.kind_ == SeminormKind::matrix_op) continue;
      Mat grown(stacked.rows() + l.coords_.rows(), s.n_);
      grown << stacked, l.coords_;
      stacked = grown;
    }
    s.kernel_ = null_space(stacked, s.n_);
    return s;
  }

  SeminormKind kind() const { return kind_; }
  int space_dim() const { return n_; }
  const std::vector<double>& weights() const { return weights_; }
  const Mat& projection() const { return projection_; }
  const std::vector<Seminorm>& leaves() const { return leaves_; }
  bool is_leaf() const { return kind_ != SeminormKind::max_of; }

  /// Orthonormal basis (columns) of N_p.
  const Mat& kernel_basis() const { return kernel_; }
  /// Quotient coordinates (rows) and a right inverse lifting them back.
  const Mat& coord_map() const { return coords_; }
  const Mat& lift() const { return lift_; }
  const RVec& coord_scale() const { return scale_; }
  bool l2_like() const { return kind_ == SeminormKind::weighted_l2 || kind_ == SeminormKind::quotient_l2; }

  double operator()(const Vec& x) const {
    if (x.size() != n_) throw DimensionError("vector length does not match seminorm space");
    switch (kind_) {
      case SeminormKind::weighted_l2: {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += std::norm(weights_[i] * x(i));
        return std::sqrt(s);
      }
      case SeminormKind::weighted_linf: {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s = std::max(s, weights_[i] * std::abs(x(i)));
        return s;
      }
      case SeminormKind::quotient_l2: return (projection_ * x).norm();
      case SeminormKind::matrix_op: {
        Mat a(block_, block_);
        for (int i = 0; i < block_; ++i)
          for (int j = 0; j < block_; ++j) a(i, j) = x(i * block_ + j);
        return spectral_norm(a);
      }
      case SeminormKind::max_of: {
        double s = 0.0;
        for (const auto& l : leaves_) s = std::max(s, l(x));
        return s;
      }
    }
    return 0.0;
  }

  json to_json() const {
    json j;
    j["kind"] = to_string(kind_);
    switch (kind_) {
      case SeminormKind::weighted_l2:
      case SeminormKind::weighted_linf: j["weights"] = weights_; break;
      case SeminormKind::quotient_l2: {
        json rows = json::array();
        for (int i = 0; i < n_; ++i) rows.push_back(vec_json(projection_.row(i).transpose()));
        j["projection"] = rows;
        break;
      }
      case SeminormKind::matrix_op: j["block"] = block_; break;
      case SeminormKind::max_of: {
        json parts = json::array();
        for (const auto& l : leaves_) parts.push_back(l.to_json());
        j["parts"] = parts;
        break;
      }
    }
    return j;
  }

  friend bool operator==(const Seminorm& a, const Seminorm& b) {
    if (a.kind_ != b.kind_ || a.n_ != b.n_) return false;
    switch (a.kind_) {
      case SeminormKind::weighted_l2:
      case SeminormKind::weighted_linf: return a.weights_ == b.weights_;
      case SeminormKind::quotient_l2: return a.projection_ == b.projection_;
      case SeminormKind::matrix_op: return a.block_ == b.block_;
      case SeminormKind::max_of: return a.leaves_ == b.leaves_;
    }
    return false;
  }

  static Mat null_space(const Mat& a, int n) {
    if (a.rows() == 0) return Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol) ++rank;
    return svd.matrixV().rightCols(n - rank);
  }

 private:
  static Seminorm weighted(SeminormKind kind, std::vector<double> w) {
    if (w.empty()) throw DimensionError("seminorm weights are empty");
    for (double v : w)
      if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("seminorm weights must be finite and >= 0");
    Seminorm s;
    s.kind_ = kind;
    s.n_ = static_cast<int>(w.size());
    std::vector<int> keep, drop;
    for (int i = 0; i < s.n_; ++i) (w[i] > 0.0 ? keep : drop).push_back(i);
    s.coords_ = Mat::Zero(static_cast<Eigen::Index>(keep.size()), s.n_);
    s.lift_ = Mat::Zero(s.n_, static_cast<Eigen::Index>(keep.size()));
    s.scale_ = RVec(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      s.coords_(i, keep[i]) = 1.0;
      s.lift_(keep[i], i) = 1.0;
      s.scale_(i) = w[keep[i]];
    }
    s.kernel_ = Mat::Zero(s.n_, static_cast<Eigen::Index>(drop.size()));
    for (std::size_t i = 0; i < drop.size(); ++i) s.kernel_(drop[i], i) = 1.0;
    s.weights_ = std::move(w);
    return s;
  }

  SeminormKind kind_ = SeminormKind::weighted_l2;
  int n_ = 0;
  int block_ = 0;
  std::vector<double> weights_;
  Mat projection_;
  Mat coords_;
  Mat lift_;
  RVec scale_;
  Mat kernel_;
  std::vector<Seminorm> leaves_;
};

struct SeminormFamily {
  std::vector<Seminorm> entries;
  bool saturated = false;
  int depth = 1;

  json to_json() const {
    json j;
    json e = json::array();
    for (const auto& s : entries) e.push_back(s.to_json());
    j["entries"] = e;
    j["saturated"] = saturated;
    j["closure_depth"] = depth;
    return j;
  }
};

/// Adds max-combinations of the underlying seminorms over all subsets of size
/// 2..depth. Idempotent because it always starts again from the leaves.
inline SeminormFamily saturate(const SeminormFamily& g, int depth = 3) {
  if (g.entries.empty()) throw PreconditionError("saturate: empty family");
  std::vector<Seminorm> leaves;
  for (const auto& e : g.entries) {
    const std::vector<Seminorm> parts = e.is_leaf() ? std::vector<Seminorm>{e} : e.leaves();
    for (const auto& p : parts)
      if (std::find(leaves.begin(), leaves.end(), p) == leaves.end()) leaves.push_back(p);
  }
  SeminormFamily out;
  out.saturated = true;
  out.depth = depth;
  out.entries = leaves;
  const int n = static_cast<int>(leaves.size());
  for (int size = 2; size <= std::min(depth, n); ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<Seminorm> parts;
      for (int i : idx) parts.push_back(leaves[i]);
      out.entries.push_back(Seminorm::max_of(std::move(parts)));
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

inline constexpr double kKipTol = 1e-10;

/// True when T maps N_p into N_p.
inline bool has_kip(const Mat& t, const Seminorm& p) {
  const Mat& k = p.kernel_basis();
  if (k.cols() == 0) return true;
  if (p.is_leaf()) return (p.coord_map() * t * k).norm() <= kKipTol * std::max(1.0, t.norm());
  for (const auto& l : p.leaves())
    if ((l.coord_map() * t * k).norm() > kKipTol * std::max(1.0, t.norm())) return false;
  return true;
}

struct QuotientOp {
  bool kip = false;
  std::optional<Mat> induced;
  std::optional<Vec> violating_kernel_vector;
};

/// Kernel-invariance test and the induced operator [x] -> [Tx] in quotient
/// coordinates.
inline QuotientOp quotient_op(const Seminorm& p, const Mat& t) {
  if (!p.is_leaf() || p.kind() == SeminormKind::matrix_op)
    throw PreconditionError("quotient_op: seminorm has no explicit quotient coordinates");
  if (t.rows() != p.space_dim() || t.cols() != p.space_dim())
    throw DimensionError("quotient_op: operator size does not match seminorm space");
  QuotientOp q;
  const Mat& k = p.kernel_basis();
  for (Eigen::Index i = 0; i < k.cols(); ++i) {
    if ((p.coord_map() * t * k.col(i)).norm() > kKipTol * std::max(1.0, t.norm())) {
      q.violating_kernel_vector = k.col(i);
      return q;
    }
  }
  q.kip = true;
  q.induced = p.coord_map() * t * p.lift();
  return q;
}

struct InducedNorm {
  double value = 0.0;
  bool exact = true;
  bool kip = true;
};

/// sup_x target(Tx) / source(x). Exact for l2 -> l2, linf -> linf and
/// l2 -> linf between leaves; an upper bound otherwise.
inline InducedNorm induced_norm(const Mat& t, const Seminorm& target, const Seminorm& source) {
  if (target.kind() == SeminormKind::matrix_op || source.kind() == SeminormKind::matrix_op)
    throw PreconditionError("induced norms are not available for matrix_op seminorms");
  if (!target.is_leaf()) {
    InducedNorm out{0.0, true, true};
    for (const auto& l : target.leaves()) {
      const InducedNorm part = induced_norm(t, l, source);
      out.value = std::max(out.value, part.value);
      out.exact = out.exact && part.exact;
      out.kip = out.kip && part.kip;
    }
    return out;
  }
  if (!source.is_leaf()) {
    InducedNorm out{kInf, false, false};
    for (const auto& l : source.leaves()) {
      const InducedNorm part = induced_norm(t, target, l);
      if (part.value < out.value) out = InducedNorm{part.value, false, part.kip};
    }
    return out;
  }
  const Mat& k = source.kernel_basis();
  if (k.cols() > 0 && (target.coord_map() * t * k).norm() > kKipTol * std::max(1.0, t.norm()))
    return {kInf, true, false};
  const Mat core = target.coord_scale().asDiagonal() * (target.coord_map() * t * source.lift()) *
                   source.coord_scale().cwiseInverse().asDiagonal();
  if (core.size() == 0) return {0.0, true, true};
  if (target.l2_like() && source.l2_like()) return {spectral_norm(core), true, true};
  if (!target.l2_like() && !source.l2_like()) return {core.cwiseAbs().rowwise().sum().maxCoeff(), true, true};
  if (!target.l2_like()) return {core.rowwise().norm().maxCoeff(), true, true};
  // linf -> l2: bound by the l2 norm of the absolute row sums.
  return {core.cwiseAbs().rowwise().sum().norm(), false, true};
}

inline InducedNorm induced_norm(const Mat& t, const Seminorm& p) { return induced_norm(t, p, p); }

enum class DissipativityMode { dissipative, conservative };

inline std::vector<double> default_mu_grid() { return log_grid(1e-2, 1e2, 24); }

namespace detail {

// 1 - |mu| * |(mu - T_p)^{-1}|_p for a leaf seminorm; -inf when singular.
inline double resolvent_slack(const Mat& t, const Seminorm& p, double mu) {
  const QuotientOp q = quotient_op(p, t);
  const Mat& tp = *q.induced;
  const auto r = tp.rows();
  if (r == 0) return 1.0;
  const Mat shifted = p.coord_scale().asDiagonal() * (mu * Mat::Identity(r, r) - tp) *
                      p.coord_scale().cwiseInverse().asDiagonal();
  if (p.l2_like()) {
    const double smin = smallest_singular_value(shifted);
    if (smin == 0.0) return -kInf;
    return smin / std::abs(mu) - 1.0;
  }
  Eigen::FullPivLU<Mat> lu(shifted);
  if (!lu.isInvertible()) return -kInf;
  const Mat inv = lu.inverse();
  return 1.0 - std::abs(mu) * inv.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace detail

/// p((mu - T)x) >= |mu| p(x) on a mu grid, through the equivalent bound
/// |(mu - T_p)^{-1}|_p <= 1/|mu| on each quotient.
inline Report dissipativity_check(const Mat& t, const SeminormFamily& g, DissipativityMode mode,
                                  std::vector<double> mu_grid = {}) {
  if (mu_grid.empty()) mu_grid = default_mu_grid();
  Report r;
  r.name = mode == DissipativityMode::dissipative ? "dissipativity" : "conservativity";
  r.grids["mu"] = rvec_json(mu_grid);
  r.notes.push_back("continuum quantifier over mu replaced by the recorded grid");
  const double slack_tol = -1e-9;

  std::vector<double> mus;
  for (double mu : mu_grid) {
    if (mu <= 0.0) continue;
    mus.push_back(mu);
    if (mode == DissipativityMode::conservative) mus.push_back(-mu);
  }

  json per = json::array();
  double worst_overall = kInf;
  for (std::size_t pi = 0; pi < g.entries.size(); ++pi) {
    const Seminorm& p = g.entries[pi];
    json entry;
    entry["seminorm"] = static_cast<int>(pi);
    if (!has_kip(t, p)) {
      entry["kip"] = false;
      per.push_back(entry);
      r.fail("operator lacks kernel invariance for seminorm " + std::to_string(pi));
      continue;
    }
    entry["kip"] = true;
    const std::vector<Seminorm> leaves = p.is_leaf() ? std::vector<Seminorm>{p} : p.leaves();
    double worst = kInf;
    double worst_mu = 0.0;
    for (double mu : mus) {
      for (const auto& leaf : leaves) {
        const double s = detail::resolvent_slack(t, leaf, mu);
        if (s < worst) {
          worst = s;
          worst_mu = mu;
        }
      }
    }
    entry["worst_slack"] = num(worst);
    entry["worst_mu"] = worst_mu;
    if (!p.is_leaf()) entry["bound"] = "max of leaf verdicts (sufficient)";
    if (worst < slack_tol) {
      r.fail("inequality violated for seminorm " + std::to_string(pi) + " at mu = " + std::to_string(worst_mu));
      r.witnesses["seminorm_" + std::to_string(pi)] = json{{"mu", worst_mu}, {"slack", num(worst)}};
    }
    worst_overall = std::min(worst_overall, worst);
    per.push_back(entry);
  }
  r.residuals["worst_slack"] = num(worst_overall);
  r.residuals["per_seminorm"] = per;
  r.constants["slack_tolerance"] = slack_tol;
  return r;
}

/// rho_{p,n}(x) = max p(B_{i_1} ... B_{i_n} x) over i_k in {0..d}, B_0 = I.
/// Equivalent to the max over all words of length <= n in B_1..B_d; words are
/// grown one letter at a time so each product is formed once.
inline double rho_eval(const MatrixRep& rep, const Seminorm& p, int n, const Vec& x, int n_max = 8) {
  if (n < 0 || n > n_max) throw PreconditionError("rho_eval: order " + std::to_string(n) + " outside 0.." + std::to_string(n_max));
  if (x.size() != rep.space_dim) throw DimensionError("rho_eval: vector length mismatch");
  double best = p(x);
  std::vector<Vec> level{x};
  for (int len = 1; len <= n; ++len) {
    std::vector<Vec> next;
    next.reserve(level.size() * rep.matrices.size());
    for (const Mat& b : rep.matrices)
      for (const Vec& y : level) {
        Vec z = b * y;
        best = std::max(best, p(z));
        next.push_back(std::move(z));
      }
    level = std::move(next);
  }
  return best;
}

struct RadiusEstimate {
  double radius = 0.0;
  bool nilpotent = false;
  bool superexponential = false;
  std::vector<double> terms;

  json to_json() const {
    return json{{"radius", num(radius)}, {"nilpotent", nilpotent}, {"superexponential", superexponential},
                {"terms", rvec_json(terms)}};
  }
};

struct AnalyticRadiusResult {
  std::vector<RadiusEstimate> per_seminorm;
  bool projective_analytic = false;
};

namespace detail {

inline double fit_residual(const std::vector<double>& xs, const std::vector<double>& ys, double* slope) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  *slope = sxx > 0 ? sxy / sxx : 0.0;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + *slope * (xs[i] - mx));
    ss += e * e;
  }
  return ss;
}

}  // namespace detail

/// Radius of convergence of sum_n p(T^n x)/n! r^n per seminorm, from a
/// log-linear fit over the last half of the terms. Terms that fit a
/// factorially damped geometric law better than a plain geometric law are
/// reported with infinite radius.
inline AnalyticRadiusResult analytic_radius(const Mat& t, const Vec& x, const SeminormFamily& g, int n_max = 16) {
  if (n_max < 8) throw PreconditionError("analytic_radius: n_max must be at least 8");
  AnalyticRadiusResult out;
  out.projective_analytic = true;
  std::vector<Vec> iterates{x};
  for (int k = 1; k <= n_max; ++k) iterates.push_back(t * iterates.back());

  for (const auto& p : g.entries) {
    RadiusEstimate est;
    double log_fact = 0.0;
    std::vector<double> log_terms, log_plain;
    std::vector<double> ns;
    for (int k = 0; k <= n_max; ++k) {
      if (k > 0) log_fact += std::log(static_cast<double>(k));
      const double v = p(iterates[k]);
      est.terms.push_back(v * std::exp(-log_fact));
      if (2 * k >= n_max && v > 0.0) {
        ns.push_back(k);
        log_plain.push_back(std::log(v));
        log_terms.push_back(std::log(v) - log_fact);
      }
    }
    int last_nonzero = -1;
    for (int k = 0; k <= n_max; ++k)
      if (est.terms[k] > 0.0) last_nonzero = k;
    if (last_nonzero < n_max) {
      est.nilpotent = true;
      est.radius = kInf;
    } else if (ns.size() >= 2) {
      double slope_terms = 0, slope_plain = 0;
      const double res_terms = detail::fit_residual(ns, log_terms, &slope_terms);
      const double res_plain = detail::fit_residual(ns, log_plain, &slope_plain);
      if (res_plain <= res_terms) {
        est.superexponential = true;
        est.radius = kInf;
      } else {
        est.radius = std::exp(-slope_terms);
      }
    } else {
      est.radius = kInf;
    }
    if (!(est.radius > 0.0)) out.projective_analytic = false;
    out.per_seminorm.push_back(std::move(est));
  }
  return out;
}

}  // namespace liexp
