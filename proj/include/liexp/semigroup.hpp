#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "liexp/core.hpp"
#include "liexp/enveloping.hpp"
#include "liexp/expm.hpp"
#include "liexp/quadrature.hpp"
#include "liexp/repspace.hpp"

namespace liexp {

/// t -> e^{tA}. Normal generators are diagonalized once (Schur form is
/// diagonal for them), everything else goes through expm each call.
class SemigroupHandle {
 public:
  enum class Direction { forward, group };

  explicit SemigroupHandle(Mat generator, Direction dir = Direction::forward)
      : a_(std::move(generator)), dir_(dir) {
    if (a_.rows() != a_.cols()) throw DimensionError("semigroup generator must be square");
    if (a_.rows() > 0 && is_normal(a_)) {
      Eigen::ComplexSchur<Mat> schur(a_);
      unitary_ = schur.matrixU();
      spectrum_ = schur.matrixT().diagonal();
    }
  }

  const Mat& generator() const { return a_; }
  Direction direction() const { return dir_; }
  bool normal() const { return unitary_.has_value(); }

  Mat evaluate(double t) const {
    if (dir_ == Direction::forward && t < 0.0) throw PreconditionError("forward semigroup evaluated at t < 0");
    if (unitary_) {
      Vec d(spectrum_.size());
      for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::exp(t * spectrum_(i));
      return *unitary_ * d.asDiagonal() * unitary_->adjoint();
    }
    return expm(a_, t);
  }

 private:
  Mat a_;
  Direction dir_;
  std::optional<Mat> unitary_;
  Vec spectrum_;
};

enum class ResolventMethod { direct, laplace };

struct ResolventResult {
  Mat value;
  double condition = 1.0;
  std::vector<std::string> warnings;
  int panels_log2 = 0;
};

/// R(lambda, A) = (lambda I - A)^{-1}, either directly or as the Laplace
/// transform int_0^inf e^{-lambda t} e^{tA} dt. The quadrature integrates one
/// short panel with Gauss-Legendre and sums the geometric series of panel
/// propagators by repeated doubling.
inline ResolventResult resolvent(const Mat& a, cplx lambda, ResolventMethod method = ResolventMethod::direct) {
  if (a.rows() != a.cols()) throw DimensionError("resolvent: matrix must be square");
  const Eigen::Index n = a.rows();
  const Mat id = Mat::Identity(n, n);
  ResolventResult out;
  const Vec ev = eigenvalues(a);

  if (method == ResolventMethod::direct) {
    const double dist = distance_to(lambda, ev);
    if (dist <= 1e-10)
      throw PreconditionError("resolvent: lambda lies on the spectrum (distance " + std::to_string(dist) + ")");
    const Mat m = lambda * id - a;
    Eigen::FullPivLU<Mat> lu(m);
    out.value = lu.inverse();
    out.condition = one_norm(m) * one_norm(out.value);
    if (out.condition > 1e10) out.warnings.push_back("ill-conditioned: condition number " + std::to_string(out.condition));
    return out;
  }

  const double bound = spectral_bound(a);
  if (!(lambda.real() > bound + 0.1))
    throw PreconditionError("resolvent(laplace): Re lambda = " + std::to_string(lambda.real()) +
                            " must exceed the type bound " + std::to_string(bound) + " + 0.1");
  const Mat shifted = a - lambda * id;
  const double h = 1.0 / std::max(1.0, one_norm(shifted));
  static const GaussLegendre rule(24);
  const Mat panel = rule.integrate([&](double s) -> Mat { return expm(shifted, s); }, 0.0, h);
  Mat power = expm(shifted, h);  // E^{2^j}
  Mat partial = id;              // sum_{k < 2^j} E^k
  for (int j = 0; j < 80; ++j) {
    partial += power * partial;
    power = power * power;
    out.panels_log2 = j + 1;
    if (one_norm(power) < 1e-17) break;
  }
  out.value = partial * panel;
  return out;
}

/// exp(t * n((I - A/n)^{-1} - I)), the exponential of the bounded
/// approximant A (I - A/n)^{-1}.
inline Mat yosida_approx(const Mat& a, double t, int n) {
  if (n <= 0) throw PreconditionError("yosida_approx: n must be positive");
  const Eigen::Index dim = a.rows();
  const Vec ev = eigenvalues(a);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i) - static_cast<double>(n)) <= 1e-10 * std::max(1.0, static_cast<double>(n)))
      throw PreconditionError("yosida_approx: I - A/n singular, eigenvalue " + std::to_string(ev(i).real()) + "+" +
                              std::to_string(ev(i).imag()) + "i equals n");
  const Mat id = Mat::Identity(dim, dim);
  const Mat inv = (id - a / static_cast<double>(n)).fullPivLu().inverse();
  const Mat gen = static_cast<double>(n) * (inv - id);
  return expm(gen, t);
}

struct TypeData {
  std::vector<double> per_seminorm;
  std::vector<bool> exact;
  double bounded_type = -kInf;
  std::vector<double> t_grid;

  json to_json() const {
    json j;
    j["per_seminorm"] = rvec_json(per_seminorm);
    j["exact"] = exact;
    j["bounded_type"] = num(bounded_type);
    j["t_grid"] = rvec_json(t_grid);
    return j;
  }
};

inline std::vector<double> default_type_grid() { return log_grid(1e-2, 50.0, 8); }

namespace detail {

inline bool uniform_l2(const Seminorm& p) {
  if (p.kind() != SeminormKind::weighted_l2) return false;
  const auto& w = p.weights();
  return w.front() > 0.0 && std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
}

}  // namespace detail

/// w_p = inf_t (1/t) log |e^{tA}|_p over the grid; for a normal generator and
/// a plain l2 norm the exact value max Re sigma(A) is used instead.
inline TypeData semigroup_type(const Mat& a, const SeminormFamily& g, std::vector<double> t_grid = {}) {
  if (t_grid.empty()) t_grid = default_type_grid();
  TypeData out;
  const SemigroupHandle v(a);
  const double anorm = one_norm(a);
  for (double t : t_grid)
    if (t > 0.0 && t * anorm <= kExpmNormLimit) out.t_grid.push_back(t);
  std::vector<Mat> values;
  if (!v.normal())
    for (double t : out.t_grid) values.push_back(v.evaluate(t));

  for (std::size_t pi = 0; pi < g.entries.size(); ++pi) {
    const Seminorm& p = g.entries[pi];
    if (!has_kip(a, p))
      throw PreconditionError("semigroup_type: generator lacks kernel invariance for seminorm " + std::to_string(pi));
    if (v.normal() && detail::uniform_l2(p)) {
      out.per_seminorm.push_back(spectral_bound(a));
      out.exact.push_back(true);
    } else {
      double w = kInf;
      for (std::size_t i = 0; i < out.t_grid.size(); ++i) {
        const Mat vt = values.empty() ? v.evaluate(out.t_grid[i]) : values[i];
        w = std::min(w, std::log(induced_norm(vt, p).value) / out.t_grid[i]);
      }
      out.per_seminorm.push_back(w);
      out.exact.push_back(false);
    }
    out.bounded_type = std::max(out.bounded_type, out.per_seminorm.back());
  }
  return out;
}

enum class EquicontinuityMode { equicontinuous, contractive, isometric };

inline std::string to_string(EquicontinuityMode m) {
  switch (m) {
    case EquicontinuityMode::equicontinuous: return "equicontinuous";
    case EquicontinuityMode::contractive: return "contractive";
    case EquicontinuityMode::isometric: return "isometric";
  }
  return "unknown";
}

/// Sampled check of |e^{tA}|_p <= 1 (contractive), <= 1 in both time
/// directions (isometric), or finiteness of sup_t p(e^{tA}x)/q(x) for some
/// partner q in the family (equicontinuous).
inline Report equicontinuity_check(const Mat& a, const SeminormFamily& g, double t_lo, double t_hi,
                                   EquicontinuityMode mode, int points = 64) {
  Report r;
  r.name = to_string(mode);
  const std::vector<double> grid = linear_grid(std::max(0.0, t_lo), t_hi, points);
  r.grids["t"] = rvec_json(grid);
  r.notes.push_back("continuum quantifier over t replaced by the recorded grid");
  const double tol = 1e-9;
  const SemigroupHandle fwd(a, SemigroupHandle::Direction::group);

  std::vector<Mat> forward, backward;
  for (double t : grid) {
    forward.push_back(fwd.evaluate(t));
    if (mode == EquicontinuityMode::isometric) backward.push_back(fwd.evaluate(-t));
  }

  json per = json::array();
  for (std::size_t pi = 0; pi < g.entries.size(); ++pi) {
    const Seminorm& p = g.entries[pi];
    json entry;
    entry["seminorm"] = static_cast<int>(pi);
    if (mode == EquicontinuityMode::equicontinuous) {
      double best = kInf;
      int partner = -1;
      for (std::size_t qi = 0; qi < g.entries.size(); ++qi) {
        double m = 0.0;
        for (const Mat& vt : forward) m = std::max(m, induced_norm(vt, p, g.entries[qi]).value);
        if (m < best) {
          best = m;
          partner = static_cast<int>(qi);
        }
      }
      entry["M"] = num(best);
      entry["partner"] = partner;
      if (!std::isfinite(best)) r.fail("no finite bound for seminorm " + std::to_string(pi));
    } else {
      double worst = 0.0, worst_t = 0.0;
      bool exact = true;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const InducedNorm nf = induced_norm(forward[i], p);
        exact = exact && nf.exact;
        if (nf.value > worst) {
          worst = nf.value;
          worst_t = grid[i];
        }
        if (mode == EquicontinuityMode::isometric) {
          const InducedNorm nb = induced_norm(backward[i], p);
          exact = exact && nb.exact;
          if (nb.value > worst) {
            worst = nb.value;
            worst_t = -grid[i];
          }
        }
      }
      entry["max_norm"] = num(worst);
      entry["at_t"] = worst_t;
      entry["exact"] = exact;
      if (!(worst <= 1.0 + tol)) {
        r.fail(to_string(mode) + " bound violated for seminorm " + std::to_string(pi));
        r.witnesses["seminorm_" + std::to_string(pi)] = json{{"t", worst_t}, {"norm", num(worst)}};
      }
    }
    per.push_back(entry);
  }
  r.residuals["per_seminorm"] = per;
  r.constants["tolerance"] = tol;
  return r;
}

/// Words of length exactly n over the basis letters.
inline std::vector<Word> words_of_length(int d, int n) {
  std::vector<Word> out{Word{}};
  for (int len = 0; len < n; ++len) {
    std::vector<Word> next;
    for (const Word& w : out)
      for (int k = 0; k < d; ++k) {
        Word x = w;
        x.push_back(k);
        next.push_back(std::move(x));
      }
    out = std::move(next);
  }
  return out;
}

struct SmoothingConstants {
  std::vector<double> constants;  // index n = 0..n_max
  std::vector<double> argmax_t;
  double k = 0.0;
  double l = 0.0;
  double r_squared = 0.0;

  json to_json() const {
    return json{{"C", rvec_json(constants)}, {"argmax_t", rvec_json(argmax_t)}, {"K", num(k)}, {"L", num(l)},
                {"r_squared", num(r_squared)}};
  }
};

struct SmoothingFit {
  std::vector<SmoothingConstants> per_seminorm;
  std::vector<double> t_grid;
  int m = 0;

  json to_json() const {
    json per = json::array();
    for (const auto& c : per_seminorm) per.push_back(c.to_json());
    return json{{"per_seminorm", per}, {"t_grid", rvec_json(t_grid)}, {"m", m}};
  }
};

inline std::vector<double> default_smoothing_grid() { return log_grid(1e-4, 1.0, 48); }

/// C_{p,n} = max_t t^{n/m} max_{|w| = n} |B^w S(t)|_p with S(t) = e^{-t Hm},
/// then a least-squares fit log(C_n / n!) = log K + n log L over n = 1..n_max.
inline SmoothingFit smoothing_fit(const Mat& hm, const MatrixRep& rep, const SeminormFamily& g, int n_max, int m,
                                  std::vector<double> t_grid = {}) {
  if (m <= 0) throw PreconditionError("smoothing_fit: order m must be positive");
  if (n_max < 0) throw PreconditionError("smoothing_fit: n must be nonnegative");
  if (t_grid.empty()) t_grid = default_smoothing_grid();
  for (double t : t_grid)
    if (!(t > 0.0 && t <= 1.0)) throw PreconditionError("smoothing_fit: t grid must lie in (0, 1]");
  for (std::size_t pi = 0; pi < g.entries.size(); ++pi)
    if (!has_kip(hm, g.entries[pi]))
      throw PreconditionError("smoothing_fit: Hm lacks kernel invariance for seminorm " + std::to_string(pi));

  SmoothingFit fit;
  fit.t_grid = t_grid;
  fit.m = m;
  const SemigroupHandle s(-hm);
  std::vector<std::vector<Mat>> monomials(n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    for (const Word& w : words_of_length(rep.algebra_dim(), n)) monomials[n].push_back(rep.monomial(w));

  fit.per_seminorm.assign(g.entries.size(), SmoothingConstants{});
  for (auto& c : fit.per_seminorm) {
    c.constants.assign(n_max + 1, 0.0);
    c.argmax_t.assign(n_max + 1, 0.0);
  }
  for (double t : t_grid) {
    const Mat st = s.evaluate(t);
    for (int n = 0; n <= n_max; ++n) {
      const double weight = std::pow(t, static_cast<double>(n) / m);
      for (const Mat& mono : monomials[n]) {
        const Mat op = mono * st;
        for (std::size_t pi = 0; pi < g.entries.size(); ++pi) {
          const InducedNorm nrm = induced_norm(op, g.entries[pi]);
          if (!nrm.kip)
            throw PreconditionError("smoothing_fit: B^w S(t) lacks kernel invariance for seminorm " +
                                    std::to_string(pi));
          const double v = weight * nrm.value;
          auto& c = fit.per_seminorm[pi];
          if (v > c.constants[n]) {
            c.constants[n] = v;
            c.argmax_t[n] = t;
          }
        }
      }
    }
  }

  for (auto& c : fit.per_seminorm) {
    std::vector<double> xs, ys;
    double log_fact = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      log_fact += std::log(static_cast<double>(n));
      if (c.constants[n] <= 0.0) continue;
      xs.push_back(n);
      ys.push_back(std::log(c.constants[n]) - log_fact);
    }
    if (xs.empty()) continue;
    double slope = 0.0;
    const double ss_res = detail::fit_residual(xs, ys, &slope);
    double my = 0, mx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      my += ys[i];
      mx += xs[i];
    }
    my /= static_cast<double>(ys.size());
    mx /= static_cast<double>(xs.size());
    double ss_tot = 0.0;
    for (double y : ys) ss_tot += (y - my) * (y - my);
    c.l = std::exp(slope);
    c.k = std::exp(my - slope * mx);
    c.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return fit;
}

struct GraphEstimate {
  double e = 0.0;
  bool satisfiable = true;
  bool verified = false;
  double min_fresh_residual = kInf;
  json witness = nullptr;

  json to_json() const {
    return json{{"E", num(e)},
                {"satisfiable", satisfiable},
                {"verified", verified},
                {"min_fresh_residual", num(min_fresh_residual)},
                {"witness", witness}};
  }
};

struct GraphEstimateFit {
  std::vector<GraphEstimate> per_seminorm;
  std::vector<double> eps_grid;
  int samples = 0;
  double cap = 0.0;

  bool all_verified() const {
    return std::all_of(per_seminorm.begin(), per_seminorm.end(),
                       [](const GraphEstimate& g) { return g.satisfiable && g.verified; });
  }
};

inline std::vector<double> default_eps_grid() { return log_grid(1e-3, 1.0, 12); }

namespace detail {

inline std::vector<Vec> unit_samples(const Seminorm& p, int n, int count, std::mt19937_64& rng,
                                     bool include_basis) {
  std::vector<Vec> out;
  if (include_basis) {
    const Mat& lift = p.lift();
    for (Eigen::Index i = 0; i < lift.cols(); ++i) {
      Vec y = lift.col(i);
      const double v = p(y);
      if (v > 0.0) out.push_back(y / v);
    }
  }
  std::normal_distribution<double> normal;
  for (int i = 0; i < count; ++i) {
    Vec y(n);
    for (int k = 0; k < n; ++k) y(k) = cplx(normal(rng), normal(rng));
    const double v = p(y);
    if (v > 0.0) out.push_back(y / v);
  }
  return out;
}

}  // namespace detail

/// Smallest E with rho_n(y) <= eps^{m-n} p(Hm y) + E eps^{-n} p(y) over the
/// eps grid and a sample of p-unit vectors (quotient basis vectors plus
/// Gaussian draws), then re-verified on an independent sample.
inline GraphEstimateFit graph_estimate_fit(const Mat& hm, const MatrixRep& rep, const SeminormFamily& g, int n,
                                           int m, std::vector<double> eps_grid = {}, int samples = 256,
                                           std::uint64_t seed = 1, double cap = 1e6) {
  if (!(n > 0 && n <= m - 1)) throw PreconditionError("graph_estimate_fit: need 0 < n <= m - 1");
  if (eps_grid.empty()) eps_grid = default_eps_grid();
  for (double e : eps_grid)
    if (!(e > 0.0 && e <= 1.0)) throw PreconditionError("graph_estimate_fit: eps grid must lie in (0, 1]");
  GraphEstimateFit out;
  out.eps_grid = eps_grid;
  out.samples = samples;
  out.cap = cap;
  std::mt19937_64 rng(seed);

  for (const Seminorm& p : g.entries) {
    GraphEstimate est;
    const auto fit_set = detail::unit_samples(p, rep.space_dim, samples, rng, true);
    double needed = 0.0;
    for (const Vec& y : fit_set) {
      const double rho = rho_eval(rep, p, n, y);
      const double ph = p(hm * y);
      for (double eps : eps_grid) {
        const double req = std::pow(eps, n) * (rho - std::pow(eps, m - n) * ph);
        if (req > needed) {
          needed = req;
          est.witness = json{{"eps", eps}, {"y", vec_json(y)}};
        }
      }
    }
    est.e = needed;
    if (needed > cap) {
      est.satisfiable = false;
      out.per_seminorm.push_back(std::move(est));
      continue;
    }
    est.witness = nullptr;
    const auto fresh = detail::unit_samples(p, rep.space_dim, samples, rng, false);
    for (const Vec& y : fresh) {
      const double rho = rho_eval(rep, p, n, y);
      const double ph = p(hm * y);
      for (double eps : eps_grid) {
        const double res = std::pow(eps, m - n) * ph + est.e / std::pow(eps, n) - rho;
        if (res < est.min_fresh_residual) {
          est.min_fresh_residual = res;
          if (res < -1e-9) est.witness = json{{"eps", eps}, {"y", vec_json(y)}};
        }
      }
    }
    est.verified = est.min_fresh_residual >= -1e-9;
    out.per_seminorm.push_back(std::move(est));
  }
  return out;
}

}  // namespace liexp
