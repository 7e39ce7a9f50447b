#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/enveloping.hpp"
#include "liexp/expm.hpp"
#include "liexp/lie_core.hpp"
#include "liexp/repspace.hpp"
#include "liexp/semigroup.hpp"

namespace liexp {

struct BchTerm {
  const char* word;  // over {X, Y}, read as the right-nested bracket [w1,[w2,[...,wn]]]
  long num;
  long den;
};

/// Dynkin-form coefficients of log(e^X e^Y) through degree six.
inline constexpr BchTerm kBchTable[] = {
    {"X", 1, 1},          {"Y", 1, 1},          {"XY", 1, 4},         {"YX", -1, 4},        {"XXY", 1, 36},
    {"XYX", -1, 18},      {"YXY", -1, 18},      {"YYX", 1, 36},       {"XYXY", -1, 48},     {"YXYX", 1, 48},
    {"XXXXY", -1, 3600},  {"XXXYX", 1, 900},    {"XXYXY", -1, 600},   {"XXYYX", -1, 600},   {"XYXXY", -1, 600},
    {"XYXYX", 1, 150},    {"XYYXY", -1, 600},   {"XYYYX", 1, 900},    {"YXXXY", 1, 900},    {"YXXYX", -1, 600},
    {"YXYXY", 1, 150},    {"YXYYX", -1, 600},   {"YYXXY", -1, 600},   {"YYXYX", -1, 600},   {"YYYXY", 1, 900},
    {"YYYYX", -1, 3600},  {"XXXYXY", 1, 2160},  {"XXYXXY", -1, 1440}, {"XXYYXY", -1, 1440}, {"XYXXXY", 1, 2160},
    {"XYXYXY", 1, 360},   {"XYYXXY", -1, 1440}, {"XYYYXY", 1, 2160},  {"YXXXYX", -1, 2160}, {"YXXYYX", 1, 1440},
    {"YXYXYX", -1, 360},  {"YXYYYX", -1, 2160}, {"YYXXYX", 1, 1440},  {"YYXYYX", 1, 1440},  {"YYYXYX", -1, 2160},
};

inline constexpr int kBchMaxOrder = 6;

/// Truncated Baker-Campbell-Hausdorff series: all terms of total degree <= order.
inline AlgElement bch(const LieAlgebra& g, const AlgElement& x, const AlgElement& y, int order = kBchMaxOrder) {
  if (order < 2 || order > kBchMaxOrder)
    throw PreconditionError("bch: order must lie in 2.." + std::to_string(kBchMaxOrder));
  g.check(x);
  g.check(y);
  AlgElement z = AlgElement::zero(g.dim());
  for (const BchTerm& term : kBchTable) {
    const std::string w = term.word;
    if (static_cast<int>(w.size()) > order) continue;
    AlgElement e = w.back() == 'X' ? x : y;
    for (std::size_t i = w.size() - 1; i-- > 0;) e = bracket(g, w[i] == 'X' ? x : y, e);
    z = z + cplx(static_cast<double>(term.num) / static_cast<double>(term.den)) * e;
  }
  return z;
}

/// prod_k exp(t_k B_k) in the representation, left to right.
inline Mat group_element(const MatrixRep& rep, const std::vector<double>& t) {
  if (static_cast<int>(t.size()) != rep.algebra_dim())
    throw DimensionError("group_element: need one parameter per basis element");
  Mat out = Mat::Identity(rep.space_dim, rep.space_dim);
  for (std::size_t k = 0; k < t.size(); ++k) out = out * expm(rep.matrices[k], t[k]);
  return out;
}

/// Samples X, Y with coefficients in [-scale, scale] and compares
/// e^X e^Y with e^{bch(X, Y)}. The bound 50 s^7 uses the effective scale
/// s = scale * max(1, max_k |B_k|).
inline Report homomorphism_check(const LieAlgebra& g, const MatrixRep& rep, int samples = 16, double scale = 0.2,
                                 std::uint64_t seed = 3) {
  if (!(scale > 0.0 && scale <= 0.5)) throw PreconditionError("homomorphism_check: scale must lie in (0, 0.5]");
  double rep_norm = 1.0;
  for (const Mat& b : rep.matrices) rep_norm = std::max(rep_norm, spectral_norm(b));
  const double eff = scale * rep_norm;
  const double bound = 50.0 * std::pow(eff, 7);

  Report r;
  r.name = "homomorphism";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    AlgElement x = AlgElement::zero(g.dim()), y = AlgElement::zero(g.dim());
    for (int k = 0; k < g.dim(); ++k) {
      x.coeffs(k) = unif(rng);
      y.coeffs(k) = unif(rng);
    }
    const Mat lhs = expm(rep.eval(x)) * expm(rep.eval(y));
    const Mat rhs = expm(rep.eval(bch(g, x, y)));
    const double res = (lhs - rhs).norm();
    if (res > worst) {
      worst = res;
      r.witnesses["worst_sample"] = json{{"x", vec_json(x.coeffs)}, {"y", vec_json(y.coeffs)}};
    }
  }
  r.residuals["max_residual"] = worst;
  r.constants["bound"] = bound;
  r.constants["effective_scale"] = eff;
  r.constants["samples"] = samples;
  if (!(worst <= bound)) r.fail("e^X e^Y differs from e^{bch(X,Y)} beyond the truncation bound");
  return r;
}

struct PipelineConfig {
  std::vector<double> mu_grid = default_mu_grid();
  double t_max = 4.0;
  int t_points = 64;
  std::vector<double> smoothing_grid = default_smoothing_grid();
  int homomorphism_samples = 16;
  int combination_samples = 4;
  std::uint64_t seed = 1;
  int analytic_terms = 16;
};

struct PipelineReport {
  std::vector<Report> checks;
  bool hypotheses = false;
  bool condition_contraction = false;
  bool condition_isometry = false;
  bool analytic_density = false;
  bool consistent = false;
  bool pass = false;

  json to_json() const {
    json j;
    json c = json::array();
    for (const auto& r : checks) c.push_back(r.to_json());
    j["checks"] = c;
    j["hypotheses_hold"] = hypotheses;
    j["condition_isometric_group"] = condition_isometry;
    j["condition_contractive_semigroup"] = condition_contraction;
    j["analytic_vectors_dense"] = analytic_density;
    j["conditions_agree"] = consistent;
    j["outcome"] = pass ? "pass" : "fail";
    return j;
  }
};

namespace detail {

inline Report wrap(const std::string& name, Report r) {
  r.name = name;
  return r;
}

}  // namespace detail

/// Runs both characterizations of an isometric representation and flags a
/// disagreement between them.
///
/// Hypotheses: Hm strongly elliptic and -Hm dissipative (the latter is
/// automatic for the minus Laplacian and skipped there).
/// Contraction side: every B_k conservative, e^{-t Hm} contractive, smoothing
/// constants finite for n = 1..m-1.
/// Isometry side: e^{t B_k} (and sampled combinations) isometric in both
/// directions, and e^X e^Y = e^{bch(X,Y)} near the identity.
inline PipelineReport check_exponentiability(const LieAlgebra& g, const MatrixRep& rep, const SeminormFamily& fam,
                                             const OrderedPoly& hm_poly, const PipelineConfig& cfg = {}) {
  validate_rep(g, rep);
  if (!fam.saturated) throw PreconditionError("check_exponentiability: seminorm family must be saturated");
  if (hm_poly.dim() != g.dim()) throw DimensionError("Hm lives over a different algebra dimension");
  const int m = hm_poly.order();
  if (m < 2) throw PreconditionError("check_exponentiability: Hm must have order at least 2");
  const Mat hm = rep.eval(hm_poly.to_env());
  PipelineReport out;
  auto add = [&](Report r) -> bool {
    out.checks.push_back(std::move(r));
    return out.checks.back().pass;
  };

  // Conservativity of every B_k (contraction side).
  bool contraction = true;
  for (int k = 0; k < g.dim(); ++k) {
    Report r = dissipativity_check(rep.matrices[k], fam, DissipativityMode::conservative, cfg.mu_grid);
    r.name = "conservativity_B" + std::to_string(k + 1);
    contraction = add(std::move(r)) && contraction;
  }

  // Hypotheses.
  const EllipticityResult ell = ellipticity_check(hm_poly);
  Report er;
  er.name = "ellipticity";
  er.residuals = ell.to_json();
  if (!ell.strongly_elliptic) er.fail("Hm is not strongly elliptic");
  bool hyp = add(er);
  if (is_minus_laplacian(hm_poly)) {
    Report skip;
    skip.name = "dissipativity_minus_hm";
    skip.notes.push_back("skipped: implied for Hm = -(B_1^2 + ... + B_d^2)");
    add(skip);
  } else {
    hyp = add(detail::wrap("dissipativity_minus_hm",
                           dissipativity_check(-hm, fam, DissipativityMode::dissipative, cfg.mu_grid))) &&
          hyp;
  }
  out.hypotheses = hyp;

  // Contraction side, continued.
  contraction = add(detail::wrap("contractive_semigroup",
                                 equicontinuity_check(-hm, fam, 0.0, cfg.t_max, EquicontinuityMode::contractive,
                                                      cfg.t_points))) &&
                contraction;
  {
    Report r;
    r.name = "smoothing";
    try {
      const SmoothingFit fit = smoothing_fit(hm, rep, fam, m - 1, m, cfg.smoothing_grid);
      r.constants = fit.to_json();
      for (const auto& c : fit.per_seminorm)
        for (double v : c.constants)
          if (!std::isfinite(v)) r.fail("smoothing constant is not finite");
    } catch (const PreconditionError& e) {
      r.fail(e.what());
    }
    contraction = add(std::move(r)) && contraction;
  }
  out.condition_contraction = contraction;

  // Isometry side.
  bool isometry = true;
  for (int k = 0; k < g.dim(); ++k) {
    Report r = equicontinuity_check(rep.matrices[k], fam, 0.0, cfg.t_max, EquicontinuityMode::isometric,
                                    cfg.t_points);
    r.name = "isometric_B" + std::to_string(k + 1);
    isometry = add(std::move(r)) && isometry;
  }
  {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    for (int s = 0; s < cfg.combination_samples; ++s) {
      AlgElement x = AlgElement::zero(g.dim());
      for (int k = 0; k < g.dim(); ++k) x.coeffs(k) = normal(rng);
      x.coeffs /= x.coeffs.norm();
      Report r = equicontinuity_check(rep.eval(x), fam, 0.0, cfg.t_max, EquicontinuityMode::isometric,
                                      cfg.t_points);
      r.name = "isometric_combination_" + std::to_string(s);
      r.witnesses["element"] = vec_json(x.coeffs);
      isometry = add(std::move(r)) && isometry;
    }
  }
  {
    double rep_norm = 1.0;
    for (const Mat& b : rep.matrices) rep_norm = std::max(rep_norm, spectral_norm(b));
    isometry = add(homomorphism_check(g, rep, cfg.homomorphism_samples, 0.2 / rep_norm, cfg.seed)) && isometry;
  }
  out.condition_isometry = isometry;

  // Analytic vectors: radius of convergence of sum_n p(B_k^n x) r^n / n!
  // for the standard basis vectors.
  {
    Report r;
    r.name = "analytic_vectors";
    double min_radius = kInf;
    for (int i = 0; i < rep.space_dim; ++i) {
      const Vec x = Vec::Unit(rep.space_dim, i);
      for (int k = 0; k < g.dim(); ++k) {
        const AnalyticRadiusResult ar = analytic_radius(rep.matrices[k], x, fam, cfg.analytic_terms);
        for (const auto& est : ar.per_seminorm) min_radius = std::min(min_radius, est.radius);
      }
    }
    r.constants["min_radius"] = num(min_radius);
    if (!(min_radius > 0.0)) r.fail("a basis vector has zero analytic radius");
    out.analytic_density = add(std::move(r));
  }

  out.consistent = !out.hypotheses || out.condition_contraction == out.condition_isometry;
  if (!out.consistent) {
    Report r;
    r.name = "conditions_agree";
    r.fail("contraction-side and isometry-side verdicts disagree although the hypotheses hold");
    add(std::move(r));
  }
  out.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const Report& r) { return r.pass; });
  return out;
}

/// Finite-dimensional associative algebra with optional involution
/// a* = J conj(a).
struct AssocAlgebra {
  int dim = 0;
  std::vector<cplx> mult;  // mult[(i*dim + j)*dim + k] = coefficient of e_k in e_i e_j
  std::optional<Mat> involution;
  std::string name;

  cplx c(int i, int j, int k) const { return mult[(static_cast<std::size_t>(i) * dim + j) * dim + k]; }

  Vec multiply(const Vec& a, const Vec& b) const {
    if (a.size() != dim || b.size() != dim) throw DimensionError("element length does not match algebra");
    Vec out = Vec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
      if (a(i) == 0.0) continue;
      for (int j = 0; j < dim; ++j) {
        if (b(j) == 0.0) continue;
        for (int k = 0; k < dim; ++k) {
          const cplx v = c(i, j, k);
          if (v != 0.0) out(k) += a(i) * b(j) * v;
        }
      }
    }
    return out;
  }

  Vec star(const Vec& a) const {
    if (!involution) throw PreconditionError("algebra has no involution");
    return *involution * a.conjugate();
  }

  /// Associativity on basis triples and involution axioms on basis pairs.
  Report validate(double tol = 1e-12) const {
    Report r;
    r.name = "associative_algebra";
    double assoc = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          const Vec ei = Vec::Unit(dim, i), ej = Vec::Unit(dim, j), ek = Vec::Unit(dim, k);
          assoc = std::max(assoc, (multiply(multiply(ei, ej), ek) - multiply(ei, multiply(ej, ek))).norm());
        }
    r.residuals["associativity"] = assoc;
    if (assoc > tol) r.fail("multiplication is not associative");
    if (involution) {
      const Mat& j = *involution;
      const double invol = (j * j.conjugate() - Mat::Identity(dim, dim)).norm();
      double anti = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
          const Vec ea = Vec::Unit(dim, a), eb = Vec::Unit(dim, b);
          anti = std::max(anti, (star(multiply(ea, eb)) - multiply(star(eb), star(ea))).norm());
        }
      r.residuals["involution"] = invol;
      r.residuals["anti_multiplicative"] = anti;
      if (invol > tol) r.fail("star is not an involution");
      if (anti > tol) r.fail("star does not reverse products");
    }
    return r;
  }

  /// M_n(C) with matrix units E_ij at index i*n + j and the conjugate transpose.
  static AssocAlgebra matrix_algebra(int n) {
    if (n <= 0) throw DimensionError("matrix algebra size must be positive");
    AssocAlgebra a;
    a.dim = n * n;
    a.name = "M" + std::to_string(n);
    a.mult.assign(static_cast<std::size_t>(a.dim) * a.dim * a.dim, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          a.mult[(static_cast<std::size_t>(i * n + j) * a.dim + (j * n + l)) * a.dim + (i * n + l)] = 1.0;
    Mat inv = Mat::Zero(a.dim, a.dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) inv(j * n + i, i * n + j) = 1.0;
    a.involution = inv;
    return a;
  }
};

/// a -> x a - a x as a matrix on coordinates.
inline Mat inner_derivation(const AssocAlgebra& alg, const Vec& x) {
  Mat d(alg.dim, alg.dim);
  for (int j = 0; j < alg.dim; ++j) {
    const Vec ej = Vec::Unit(alg.dim, j);
    d.col(j) = alg.multiply(x, ej) - alg.multiply(ej, x);
  }
  return d;
}

/// Transpose on M_n(C): linear, not a derivation.
inline Mat transpose_map(int n) {
  Mat t = Mat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(j * n + i, i * n + j) = 1.0;
  return t;
}

/// Leibniz residual of delta and automorphism residual of e^{t delta} on a
/// t grid, optionally with the star-compatibility of both.
inline Report derivation_report(const AssocAlgebra& alg, const Mat& delta, const std::vector<double>& t_grid,
                                bool with_star = false) {
  if (delta.rows() != alg.dim || delta.cols() != alg.dim) throw DimensionError("derivation has wrong shape");
  if (with_star && !alg.involution) throw PreconditionError("star check requested on an algebra without involution");
  Report r;
  r.name = "derivation";
  r.grids["t"] = rvec_json(t_grid);
  const int n = alg.dim;
  auto unit = [n](int i) { return Vec::Unit(n, i); };

  double leibniz = 0.0, star_res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec ei = unit(i), ej = unit(j);
      const Vec lhs = delta * alg.multiply(ei, ej);
      const Vec rhs = alg.multiply(delta * ei, ej) + alg.multiply(ei, delta * ej);
      leibniz = std::max(leibniz, (lhs - rhs).norm());
    }
  if (with_star)
    for (int i = 0; i < n; ++i) star_res = std::max(star_res, (delta * alg.star(unit(i)) - alg.star(delta * unit(i))).norm());
  r.residuals["leibniz"] = leibniz;
  const double scale = std::max(1.0, spectral_norm(delta));
  if (leibniz > 1e-10 * scale) r.fail("not a derivation: Leibniz rule fails");
  if (with_star) {
    r.residuals["star_derivation"] = star_res;
    if (star_res > 1e-10 * scale) r.fail("derivation does not commute with the involution");
  }

  double automorphism = 0.0, star_auto = 0.0;
  for (double t : t_grid) {
    const Mat alpha = expm(delta, t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec ei = unit(i), ej = unit(j);
        const Vec lhs = alpha * alg.multiply(ei, ej);
        const Vec rhs = alg.multiply(alpha * ei, alpha * ej);
        automorphism = std::max(automorphism, (lhs - rhs).norm() / std::max({1.0, lhs.norm(), rhs.norm()}));
      }
    if (with_star)
      for (int i = 0; i < n; ++i)
        star_auto = std::max(star_auto, (alpha * alg.star(unit(i)) - alg.star(alpha * unit(i))).norm());
  }
  r.residuals["automorphism"] = automorphism;
  if (automorphism > 1e-8) r.fail("e^{t delta} is not multiplicative on the grid");
  if (with_star) {
    r.residuals["star_automorphism"] = star_auto;
    if (star_auto > 1e-8) r.fail("e^{t delta} does not commute with the involution");
  }
  return r;
}

/// Checks p(ab) <= p(a)p(b), p(a*) = p(a) and p(a*a) = p(a)^2 on every basis
/// pair, every e_i + e_j, and random elements.
inline Report cstar_seminorm_check(const AssocAlgebra& alg, const SeminormFamily& fam, int samples = 256,
                                   std::uint64_t seed = 5) {
  if (!alg.involution) throw PreconditionError("C* check needs an involution");
  const int n = alg.dim;
  std::vector<Vec> singles;
  for (int i = 0; i < n; ++i) singles.push_back(Vec::Unit(n, i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) singles.push_back(Vec::Unit(n, i) + Vec::Unit(n, j));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> randoms;
  for (int s = 0; s < samples; ++s) {
    Vec x(n);
    for (int k = 0; k < n; ++k) x(k) = cplx(normal(rng), normal(rng));
    randoms.push_back(x);
  }

  Report r;
  r.name = "cstar_seminorm";
  json per = json::array();
  for (std::size_t pi = 0; pi < fam.entries.size(); ++pi) {
    const Seminorm& p = fam.entries[pi];
    double submult = 0.0, star_inv = 0.0, cstar = 0.0;
    json witness = nullptr;
    auto rel = [](double v, double s) { return v / std::max(1.0, s); };
    auto check_pair = [&](const Vec& a, const Vec& b) {
      const double pa = p(a), pb = p(b);
      submult = std::max(submult, rel(p(alg.multiply(a, b)) - pa * pb, pa * pb));
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) check_pair(singles[i], singles[j]);
    for (std::size_t s = 0; s + 1 < randoms.size(); s += 2) check_pair(randoms[s], randoms[s + 1]);

    auto check_single = [&](const Vec& a) {
      const double pa = p(a);
      const double d1 = rel(std::abs(p(alg.star(a)) - pa), pa);
      const double d2 = rel(std::abs(p(alg.multiply(alg.star(a), a)) - pa * pa), pa * pa);
      star_inv = std::max(star_inv, d1);
      if (d2 > cstar) {
        cstar = d2;
        if (witness.is_null() && d2 > 1e-10) witness = vec_json(a);
      }
    };
    for (const Vec& a : singles) check_single(a);
    for (const Vec& a : randoms) check_single(a);

    json e;
    e["seminorm"] = static_cast<int>(pi);
    e["submultiplicativity"] = submult;
    e["star_invariance"] = star_inv;
    e["cstar_identity"] = cstar;
    e["witness"] = witness;
    per.push_back(e);
    if (submult > 1e-10) r.fail("seminorm " + std::to_string(pi) + " is not submultiplicative");
    if (star_inv > 1e-10) r.fail("seminorm " + std::to_string(pi) + " is not star invariant");
    if (cstar > 1e-10) {
      r.fail("seminorm " + std::to_string(pi) + " violates p(a*a) = p(a)^2");
      r.witnesses["seminorm_" + std::to_string(pi)] = witness;
    }
  }
  r.residuals["per_seminorm"] = per;
  return r;
}

}  // namespace liexp
