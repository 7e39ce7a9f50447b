#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/enveloping.hpp"
#include "liexp/lie_core.hpp"
#include "liexp/quadrature.hpp"
#include "liexp/repspace.hpp"
#include "liexp/semigroup.hpp"

namespace liexp {

/// Outcome of a residual verification. `converged` implies the residual met
/// the requested tolerance.
struct IdentityResult {
  std::string name;
  double residual = 0.0;
  bool converged = false;
  int terms_used = 0;
  double tolerance = 0.0;
  json side_data = json::object();

  json to_json() const {
    json j;
    j["name"] = name;
    j["residual"] = num(residual);
    j["converged"] = converged;
    j["terms_used"] = terms_used;
    j["tolerance"] = tolerance;
    j["side_data"] = side_data;
    return j;
  }
};

inline constexpr double kSpectralGap = 1e-8;

/// Rejects lambda inside sigma(A) or inside {nu - mu : nu in sigma(A),
/// mu in sigma(ad A)}, the points where some R(lambda + mu_j, A) fails to
/// exist.
inline void check_diminished_resolvent(const Mat& a, const std::vector<cplx>& ad_spectrum, cplx lambda) {
  const Vec ev = eigenvalues(a);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(lambda - ev(i)) <= kSpectralGap)
      throw PreconditionError("lambda lies in the spectrum of A (eigenvalue " + std::to_string(ev(i).real()) + "+" +
                              std::to_string(ev(i).imag()) + "i)");
    for (cplx mu : ad_spectrum) {
      const cplx point = ev(i) - mu;
      if (std::abs(lambda - point) <= kSpectralGap)
        throw PreconditionError("lambda lies in the augmented spectrum: sigma(A) - sigma(ad A) contains " +
                                std::to_string(point.real()) + "+" + std::to_string(point.imag()) + "i");
    }
  }
}

namespace detail {

inline std::vector<cplx> ad_eigenvalues(const LieAlgebra& g, const AlgElement& a) {
  const Vec ev = eigenvalues(ad_matrix(g, a));
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace detail

/// B R(lambda) = sum_{k<=n} (-1)^k R(lambda+mu)^{k+1} (ad A - mu)^k(B)
///             + (-1)^{n+1} R(lambda+mu)^{n+1} (ad A - mu)^{n+1}(B) R(lambda).
inline IdentityResult verify_resolvent_commutation(const LieAlgebra& g, const MatrixRep& rep, const AlgElement& a,
                                   const AlgElement& b, cplx lambda, cplx mu, int n, double tol = 1e-9) {
  if (n < 0) throw PreconditionError("verify_resolvent_commutation: n must be nonnegative");
  const Mat am = rep.eval(a);
  check_diminished_resolvent(am, detail::ad_eigenvalues(g, a), lambda);
  if (distance_to(lambda + mu, eigenvalues(am)) <= kSpectralGap)
    throw PreconditionError("lambda + mu lies in the spectrum of A");

  const auto id_n = rep.space_dim;
  const Mat r = resolvent(am, lambda).value;
  const Mat rs = resolvent(am, lambda + mu).value;
  const Mat shifted = ad_matrix(g, a) - mu * Mat::Identity(g.dim(), g.dim());

  const Mat lhs = rep.eval(b) * r;
  Mat rhs = Mat::Zero(id_n, id_n);
  Mat rpow = rs;
  Vec coeffs = b.coeffs;
  double sign = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) rpow = rpow * rs;
    rhs += sign * rpow * rep.eval(AlgElement{coeffs});
    coeffs = shifted * coeffs;
    sign = -sign;
  }
  rhs += sign * rpow * rep.eval(AlgElement{coeffs}) * r;

  IdentityResult out;
  out.name = "verify_resolvent_commutation";
  out.residual = normalized_residual(lhs, rhs);
  out.tolerance = tol;
  out.converged = out.residual <= tol;
  out.terms_used = n + 2;
  out.side_data["lambda"] = cplx_json(lambda);
  out.side_data["mu"] = cplx_json(mu);
  out.side_data["n"] = n;
  return out;
}

/// B R(lambda) = sum_j sum_{k<=s_j} (-1)^k R(lambda+mu_j)^{k+1} (ad A - mu_j)^k (P_j B).
inline IdentityResult verify_resolvent_primary_decomposition(const LieAlgebra& g, const MatrixRep& rep, const AlgElement& a,
                                   const AlgElement& b, cplx lambda, double tol = 1e-9) {
  const Mat am = rep.eval(a);
  const AdSpectralData sd = ad_spectral_data(g, a);
  check_diminished_resolvent(am, sd.eigenvalues, lambda);
  const Mat ad = ad_matrix(g, a);
  const Mat id_d = Mat::Identity(g.dim(), g.dim());

  const Mat lhs = rep.eval(b) * resolvent(am, lambda).value;
  Mat rhs = Mat::Zero(rep.space_dim, rep.space_dim);
  int terms = 0;
  for (std::size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    const cplx mu = sd.eigenvalues[j];
    const Mat rj = resolvent(am, lambda + mu).value;
    Vec coeffs = sd.projections[j] * b.coeffs;
    Mat rpow = rj;
    double sign = 1.0;
    for (int k = 0; k <= sd.indices[j]; ++k) {
      rhs += sign * rpow * rep.eval(AlgElement{coeffs});
      coeffs = (ad - mu * id_d) * coeffs;
      rpow = rpow * rj;
      sign = -sign;
      ++terms;
    }
  }

  IdentityResult out;
  out.name = "verify_resolvent_primary_decomposition";
  out.residual = normalized_residual(lhs, rhs);
  out.tolerance = tol;
  out.converged = out.residual <= tol;
  out.terms_used = terms;
  out.side_data = sd.report;
  out.side_data["approximate"] = sd.ambiguous_clusters;
  out.side_data["lambda"] = cplx_json(lambda);
  return out;
}

/// Partial sums of sum_k (-1)^k R(lambda)^{k+1} (ad A)^k(B) against B R(lambda).
/// Convergence is certified when nu(R(lambda)) nu(ad A) < 1; otherwise the
/// sum is still run and divergence is reported when term norms stop
/// decreasing over a window.
inline IdentityResult verify_resolvent_series(const LieAlgebra& g, const MatrixRep& rep, const AlgElement& a,
                                          const AlgElement& b, cplx lambda, double tol = 1e-13,
                                          int max_terms = 500, double residual_tol = 1e-9) {
  const Mat am = rep.eval(a);
  if (distance_to(lambda, eigenvalues(am)) <= kSpectralGap)
    throw PreconditionError("lambda lies in the spectrum of A");
  const Mat r = resolvent(am, lambda).value;
  const Mat ad = ad_matrix(g, a);
  const double certificate = spectral_radius(r) * spectral_radius(ad);
  const Mat lhs = rep.eval(b) * r;
  const double scale = std::max(1.0, lhs.norm());

  constexpr int kWindow = 12;
  Mat sum = Mat::Zero(rep.space_dim, rep.space_dim);
  Mat rpow = r;
  Vec coeffs = b.coeffs;
  double sign = 1.0;
  std::vector<double> term_norms;
  bool small_term = false, diverged = false;
  int k = 0;
  for (; k < max_terms; ++k) {
    const Mat term = sign * rpow * rep.eval(AlgElement{coeffs});
    sum += term;
    term_norms.push_back(term.norm());
    if (!std::isfinite(term_norms.back())) {
      diverged = true;
      ++k;
      break;
    }
    if (term_norms.back() < tol * scale) {
      small_term = true;
      ++k;
      break;
    }
    if (static_cast<int>(term_norms.size()) > kWindow) {
      bool nondecreasing = true;
      for (std::size_t i = term_norms.size() - kWindow; i < term_norms.size(); ++i)
        if (term_norms[i] < term_norms[i - 1]) nondecreasing = false;
      if (nondecreasing && term_norms.back() > 0.0) {
        diverged = true;
        ++k;
        break;
      }
    }
    coeffs = ad * coeffs;
    rpow = rpow * r;
    sign = -sign;
  }

  IdentityResult out;
  out.name = "verify_resolvent_series";
  out.residual = diverged ? kInf : normalized_residual(lhs, sum);
  out.tolerance = residual_tol;
  out.converged = small_term && out.residual <= residual_tol;
  out.terms_used = k;
  out.side_data["certificate"] = certificate;
  out.side_data["mode"] = certificate < 1.0 ? "certified" : "falsification";
  out.side_data["diverged"] = diverged;
  out.side_data["inconclusive"] = !diverged && !small_term;
  out.side_data["last_term_norm"] = num(term_norms.empty() ? 0.0 : term_norms.back());
  out.side_data["lambda"] = cplx_json(lambda);
  return out;
}

/// B e^{tA} = e^{tA} [exp(-t ad A)(B)] in the representation.
inline IdentityResult verify_adjoint_conjugation(const LieAlgebra& g, const MatrixRep& rep, const AlgElement& a,
                                   const AlgElement& b, double t, double tol = 1e-9) {
  const Mat v = expm(rep.eval(a), t);
  const AlgElement conj = exp_ad(g, t, a, b);
  const Mat lhs = rep.eval(b) * v;
  const Mat rhs = v * rep.eval(conj);
  IdentityResult out;
  out.name = "verify_adjoint_conjugation";
  out.residual = normalized_residual(lhs, rhs);
  out.tolerance = tol;
  out.converged = out.residual <= tol;
  out.terms_used = 1;
  out.side_data["t"] = t;
  out.side_data["exp_ad"] = vec_json(conj.coeffs);
  return out;
}

/// int_0^s B^v S_r [(ad B^u)(Hm)] S_{t-r} dr = B^v (S_s B^u - B^u S_s) S_{t-s}
/// with S_r = e^{-r Hm}, the left side by Gauss-Legendre quadrature.
inline IdentityResult verify_duhamel(const MatrixRep& rep, const Mat& hm, const Word& u, const Word& v, double s,
                                     double t, int quad_nodes = 64, double tol = 1e-7) {
  if (!(0.0 <= s && s <= t)) throw PreconditionError("verify_duhamel: need 0 <= s <= t");
  const SemigroupHandle semigroup(-hm);
  const Mat bu = rep.monomial(u);
  const Mat bv = rep.monomial(v);
  const Mat commutator = bu * hm - hm * bu;
  const GaussLegendre rule(quad_nodes);
  Mat lhs = Mat::Zero(rep.space_dim, rep.space_dim);
  if (s > 0.0)
    lhs = rule.integrate(
        [&](double r) -> Mat { return bv * semigroup.evaluate(r) * commutator * semigroup.evaluate(t - r); }, 0.0, s);
  const Mat ss = semigroup.evaluate(s);
  const Mat rhs = bv * (ss * bu - bu * ss) * semigroup.evaluate(t - s);

  IdentityResult out;
  out.name = "verify_duhamel";
  out.residual = normalized_residual(lhs, rhs);
  out.tolerance = tol;
  out.converged = out.residual <= tol;
  out.terms_used = quad_nodes;
  out.side_data["s"] = s;
  out.side_data["t"] = t;
  out.side_data["hm_norm_times_t"] = spectral_norm(hm) * t;
  out.side_data["lhs_norm"] = lhs.norm();
  return out;
}

/// Checks the ad-word expansion against the matrix commutator and measures
/// the smallest k with p((ad B^u)(B^v)x) <= k |u||v| rho_{p,|u|+|v|-1}(x).
inline IdentityResult verify_commutator_bound(const LieAlgebra& g, const MatrixRep& rep, const SeminormFamily& fam,
                                              const Word& u, const Word& v, int samples = 64,
                                              std::uint64_t seed = 7) {
  if (samples < 32) throw PreconditionError("verify_commutator_bound: need at least 32 samples");
  const EnvElement e = expand_ad_word(g, u, v);
  const Mat expanded = rep.eval(e);
  const Mat bu = rep.monomial(u), bv = rep.monomial(v);
  const double expansion_residual = normalized_residual(expanded, bu * bv - bv * bu);

  // Each expansion term carries a bracket coefficient vector; its 1-norm is
  // at most kappa = max_{i,j} sum_k |c_ij^k|.
  double kappa = 0.0;
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) {
      double s = 0.0;
      for (int k = 0; k < g.dim(); ++k) s += std::abs(g.structure(i, j, k));
      kappa = std::max(kappa, s);
    }

  const int order = static_cast<int>(u.size() + v.size()) - 1;
  const double uv = static_cast<double>(u.size() * v.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double k_hat = 0.0;
  for (int i = 0; i < samples; ++i) {
    Vec x(rep.space_dim);
    for (int c = 0; c < rep.space_dim; ++c) x(c) = cplx(normal(rng), normal(rng));
    const Vec y = expanded * x;
    for (const Seminorm& p : fam.entries) {
      const double lhs = p(y);
      const double base = uv * rho_eval(rep, p, order, x, order);
      if (base > 0.0)
        k_hat = std::max(k_hat, lhs / base);
      else if (lhs > 1e-12)
        k_hat = kInf;
    }
  }

  IdentityResult out;
  out.name = "verify_commutator_bound";
  out.residual = expansion_residual;
  out.tolerance = 1e-10;
  out.terms_used = static_cast<int>(e.term_count());
  out.converged = expansion_residual <= out.tolerance && k_hat <= kappa * (1.0 + 1e-9) + 1e-12;
  out.side_data["k_hat"] = num(k_hat);
  out.side_data["k_structure_bound"] = kappa;
  out.side_data["term_count"] = e.term_count();
  out.side_data["term_cap"] = g.dim() * u.size() * v.size();
  out.side_data["expansion_size"] = e.size();
  out.side_data["size_cap"] = order;
  return out;
}

/// rho_{p,n}(e^{tA}x) <= exp(n |ad A| |t|) rho_{p,n}(x) on sampled unit
/// vectors; requires e^{tA} to be p-isometric for every p.
inline IdentityResult verify_growth_bound(const LieAlgebra& g, const MatrixRep& rep, const SeminormFamily& fam,
                                   const AlgElement& a, int n, const std::vector<double>& t_grid, int samples = 128,
                                   std::uint64_t seed = 11) {
  const Mat am = rep.eval(a);
  double t_max = 0.0;
  for (double t : t_grid) t_max = std::max(t_max, std::abs(t));
  const Report iso = equicontinuity_check(am, fam, 0.0, std::max(t_max, 1e-3), EquicontinuityMode::isometric);
  if (!iso.pass) throw PreconditionError("verify_growth_bound: e^{tA} is not isometric for the seminorm family");
  const double adnorm = norms(g, a).ad_op_norm;

  std::vector<Mat> groups;
  for (double t : t_grid) groups.push_back(expm(am, t));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = kInf;
  json witness = nullptr;
  for (int i = 0; i < samples; ++i) {
    Vec x(rep.space_dim);
    for (int c = 0; c < rep.space_dim; ++c) x(c) = cplx(normal(rng), normal(rng));
    x /= x.norm();
    for (const Seminorm& p : fam.entries) {
      const double base = rho_eval(rep, p, n, x, std::max(n, 8));
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double lhs = rho_eval(rep, p, n, groups[ti] * x, std::max(n, 8));
        const double rhs = std::exp(n * adnorm * std::abs(t_grid[ti])) * base;
        const double slack = rhs - lhs;
        if (slack < worst) {
          worst = slack;
          witness = json{{"t", t_grid[ti]}, {"sample", i}};
        }
      }
    }
  }

  IdentityResult out;
  out.name = "verify_growth_bound";
  out.residual = std::max(0.0, -worst);
  out.tolerance = 1e-9;
  out.converged = worst >= -1e-9;
  out.terms_used = samples;
  out.side_data["worst_slack"] = num(worst);
  out.side_data["ad_op_norm"] = adnorm;
  out.side_data["n"] = n;
  out.side_data["witness"] = witness;
  out.side_data["t_grid"] = rvec_json(t_grid);
  return out;
}

}  // namespace liexp
