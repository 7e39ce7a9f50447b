#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/lie_core.hpp"

namespace liexp {

/// Noncommutative monomial B_{u_1} ... B_{u_n}; letters are 0-based basis
/// indices. The empty word is the identity.
using Word = std::vector<int>;

/// Exponent vector alpha of the ordered monomial B_1^{alpha_1} ... B_d^{alpha_d}.
using MultiIndex = std::vector<int>;

inline constexpr double kCoeffPrune = 1e-14;

/// Finite combination of words. Size depends on the chosen presentation.
class EnvElement {
 public:
  EnvElement() = default;
  EnvElement(Word w, cplx c) { add(std::move(w), c); }

  void add(const Word& w, cplx c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (std::abs(it->second) <= kCoeffPrune) terms_.erase(it);
    }
  }

  void add(const EnvElement& other, cplx scale = 1.0) {
    for (const auto& [w, c] : other.terms_) add(w, scale * c);
  }

  const std::map<Word, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  int size() const {
    int s = 0;
    for (const auto& [w, c] : terms_) s = std::max(s, static_cast<int>(w.size()));
    return s;
  }

 private:
  std::map<Word, cplx> terms_;
};

/// Element written in PBW-ordered monomials; at most one entry per alpha.
class OrderedPoly {
 public:
  OrderedPoly() = default;
  explicit OrderedPoly(int dim) : dim_(dim) {}

  void add(const MultiIndex& alpha, cplx c) {
    if (static_cast<int>(alpha.size()) != dim_)
      throw DimensionError("multi-index length " + std::to_string(alpha.size()) + " != algebra dimension " +
                           std::to_string(dim_));
    if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a < 0; }))
      throw DimensionError("multi-index has a negative exponent");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(alpha, c);
    if (!inserted) {
      it->second += c;
      if (std::abs(it->second) <= kCoeffPrune) terms_.erase(it);
    }
  }

  int dim() const { return dim_; }
  const std::map<MultiIndex, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int order() const {
    int m = 0;
    for (const auto& [a, c] : terms_) {
      int s = 0;
      for (int v : a) s += v;
      m = std::max(m, s);
    }
    return m;
  }

  EnvElement to_env() const {
    EnvElement e;
    for (const auto& [alpha, c] : terms_) {
      Word w;
      for (int k = 0; k < dim_; ++k) w.insert(w.end(), alpha[k], k);
      e.add(w, c);
    }
    return e;
  }

  friend bool operator==(const OrderedPoly&, const OrderedPoly&) = default;

 private:
  int dim_ = 0;
  std::map<MultiIndex, cplx> terms_;
};

/// H = -(B_1^2 + ... + B_d^2).
inline OrderedPoly minus_laplacian(int d) {
  OrderedPoly h(d);
  for (int k = 0; k < d; ++k) {
    MultiIndex a(d, 0);
    a[k] = 2;
    h.add(a, -1.0);
  }
  return h;
}

/// True when `p` is exactly -(sum of squares of all basis elements).
inline bool is_minus_laplacian(const OrderedPoly& p) { return p == minus_laplacian(p.dim()); }

inline void check_word(const LieAlgebra& g, const Word& w) {
  for (int letter : w)
    if (letter < 0 || letter >= g.dim())
      throw DimensionError("word letter " + std::to_string(letter + 1) + " outside 1.." + std::to_string(g.dim()));
}

/// Straightens every word into non-decreasing order using
/// B_j B_i = B_i B_j + sum_k c[j][i][k] B_k, always rewriting the leftmost
/// out-of-order adjacent pair.
inline OrderedPoly pbw_normal_form(const LieAlgebra& g, const EnvElement& e) {
  const int d = g.dim();
  std::map<Word, cplx> pending;
  for (const auto& [w, c] : e.terms()) {
    check_word(g, w);
    pending[w] += c;
  }
  OrderedPoly out(d);
  while (!pending.empty()) {
    // Longest words first: rewrites only ever produce shorter or equally
    // long words, so this keeps the worklist from re-touching finished terms.
    auto it = pending.end();
    --it;
    std::size_t best_len = 0;
    for (auto jt = pending.begin(); jt != pending.end(); ++jt)
      if (jt->first.size() >= best_len) {
        best_len = jt->first.size();
        it = jt;
      }
    const Word w = it->first;
    const cplx c = it->second;
    pending.erase(it);
    if (std::abs(c) <= kCoeffPrune) continue;

    std::size_t pos = 0;
    while (pos + 1 < w.size() && w[pos] <= w[pos + 1]) ++pos;
    if (pos + 1 >= w.size()) {
      MultiIndex alpha(d, 0);
      for (int letter : w) ++alpha[letter];
      out.add(alpha, c);
      continue;
    }
    const int hi = w[pos], lo = w[pos + 1];
    Word swapped = w;
    std::swap(swapped[pos], swapped[pos + 1]);
    pending[swapped] += c;
    for (int k = 0; k < d; ++k) {
      const double ck = g.structure(hi, lo, k);
      if (ck == 0.0) continue;
      Word shorter(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos));
      shorter.push_back(k);
      shorter.insert(shorter.end(), w.begin() + static_cast<std::ptrdiff_t>(pos) + 2, w.end());
      pending[shorter] += c * ck;
    }
  }
  return out;
}

/// B^u B^v - B^v B^u expanded by moving the letters of v leftwards through u
/// one adjacent swap at a time; each swap leaves one bracket term behind.
inline EnvElement expand_ad_word(const LieAlgebra& g, const Word& u, const Word& v) {
  if (u.empty() || v.empty()) throw PreconditionError("expand_ad_word: words must be nonempty");
  check_word(g, u);
  check_word(g, v);
  const int d = g.dim();
  EnvElement out;
  for (std::size_t b = 0; b < v.size(); ++b) {
    for (std::size_t a = u.size(); a-- > 0;) {
      // Current word: v_{<b} u_1..u_a v_b u_{>a} v_{>b}; swapping u_a, v_b
      // leaves v_{<b} u_{<a} [u_a, v_b] u_{>a} v_{>b}.
      for (int k = 0; k < d; ++k) {
        const double ck = g.structure(u[a], v[b], k);
        if (ck == 0.0) continue;
        Word w(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(b));
        w.insert(w.end(), u.begin(), u.begin() + static_cast<std::ptrdiff_t>(a));
        w.push_back(k);
        w.insert(w.end(), u.begin() + static_cast<std::ptrdiff_t>(a) + 1, u.end());
        w.insert(w.end(), v.begin() + static_cast<std::ptrdiff_t>(b) + 1, v.end());
        out.add(w, ck);
      }
    }
  }
  const std::size_t cap = static_cast<std::size_t>(d) * u.size() * v.size();
  if (out.term_count() > cap)
    throw std::logic_error("expand_ad_word: term count exceeds d|u||v|");
  if (out.size() > static_cast<int>(u.size() + v.size()) - 1)
    throw std::logic_error("expand_ad_word: expansion too long");
  return out;
}

/// Substitutes matrices for letters and sums; empty word maps to identity.
inline Mat word_eval(const std::vector<Mat>& b, int n, const EnvElement& e) {
  Mat out = Mat::Zero(n, n);
  for (const auto& [w, c] : e.terms()) {
    Mat prod = Mat::Identity(n, n);
    for (int letter : w) {
      if (letter < 0 || letter >= static_cast<int>(b.size()))
        throw DimensionError("word letter outside representation range");
      prod = prod * b[letter];
    }
    out += c * prod;
  }
  return out;
}

struct EllipticityResult {
  bool elliptic = false;
  bool strongly_elliptic = false;
  std::optional<RVec> witness;
  bool exact = false;
  std::vector<std::string> notes;
  double min_abs_symbol = 0.0;
  double min_re_symbol = 0.0;

  json to_json() const {
    json j;
    j["elliptic"] = elliptic;
    j["strongly_elliptic"] = strongly_elliptic;
    j["exact"] = exact;
    j["min_abs_principal_symbol"] = num(min_abs_symbol);
    j["min_re_signed_principal_symbol"] = num(min_re_symbol);
    if (witness) {
      json w = json::array();
      for (Eigen::Index i = 0; i < witness->size(); ++i) w.push_back((*witness)(i));
      j["witness"] = w;
    } else {
      j["witness"] = nullptr;
    }
    j["notes"] = notes;
    return j;
  }
};

inline constexpr double kEllipticTol = 1e-10;

/// Principal symbol sum_{|alpha| = m} c_alpha xi^alpha at a real point.
inline cplx principal_symbol(const OrderedPoly& p, int m, const RVec& xi) {
  cplx s = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    int deg = 0;
    for (int a : alpha) deg += a;
    if (deg != m) continue;
    double mono = 1.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) mono *= std::pow(xi(static_cast<Eigen::Index>(k)), alpha[k]);
    s += c * mono;
  }
  return s;
}

/// Quasi-uniform points on the unit sphere of R^d plus every +-e_k.
inline std::vector<RVec> sphere_samples(int d, int samples, std::uint64_t seed = 0x5eed) {
  std::vector<RVec> pts;
  for (int k = 0; k < d; ++k)
    for (double s : {1.0, -1.0}) {
      RVec e = RVec::Zero(d);
      e(k) = s;
      pts.push_back(e);
    }
  if (d == 2) {
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * std::numbers::pi * i / samples;
      pts.push_back(RVec{{std::cos(th), std::sin(th)}});
    }
  } else if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / samples;
      const double r = std::sqrt(1.0 - z * z);
      pts.push_back(RVec{{r * std::cos(golden * i), r * std::sin(golden * i), z}});
    }
  } else if (d > 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int i = 0; i < samples; ++i) {
      RVec x(d);
      for (int k = 0; k < d; ++k) x(k) = normal(rng);
      pts.push_back(x / x.norm());
    }
  }
  return pts;
}

/// Ellipticity and strong ellipticity of the principal part. Sampling
/// falsifies; order two is decided exactly from the symmetrized coefficient
/// matrix.
inline EllipticityResult ellipticity_check(const OrderedPoly& p, int samples = 4096) {
  const int d = p.dim();
  EllipticityResult r;
  if (p.is_zero()) {
    RVec e = RVec::Zero(d);
    if (d > 0) e(0) = 1.0;
    r.witness = e;
    r.notes.push_back("zero polynomial is not elliptic");
    return r;
  }
  const int m = p.order();
  const bool even = m % 2 == 0;
  const double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
  if (!even) r.notes.push_back("odd order: strong ellipticity is only defined for even order, declared false");

  double min_abs = kInf, min_re = kInf;
  RVec arg_abs, arg_re;
  for (const RVec& xi : sphere_samples(d, samples)) {
    const cplx s = principal_symbol(p, m, xi);
    if (std::abs(s) < min_abs) {
      min_abs = std::abs(s);
      arg_abs = xi;
    }
    const double re = sign * s.real();
    if (re < min_re) {
      min_re = re;
      arg_re = xi;
    }
  }
  r.min_abs_symbol = min_abs;
  r.min_re_symbol = min_re;
  r.elliptic = min_abs > kEllipticTol;
  r.strongly_elliptic = even && min_re > kEllipticTol;

  if (m == 2) {
    // P_2(xi) = xi^T Q xi with Q complex symmetric.
    Mat q = Mat::Zero(d, d);
    for (const auto& [alpha, c] : p.terms()) {
      std::vector<int> idx;
      for (int k = 0; k < d; ++k)
        for (int a = 0; a < alpha[k]; ++a) idx.push_back(k);
      if (idx.size() != 2) continue;
      if (idx[0] == idx[1]) {
        q(idx[0], idx[0]) += c;
      } else {
        q(idx[0], idx[1]) += 0.5 * c;
        q(idx[1], idx[0]) += 0.5 * c;
      }
    }
    const RMat re_q = q.real();
    Eigen::SelfAdjointEigenSolver<RMat> es(-re_q);
    r.exact = true;
    r.strongly_elliptic = es.eigenvalues()(0) > kEllipticTol;
    r.min_re_symbol = es.eigenvalues()(0);
    if (!r.strongly_elliptic) arg_re = es.eigenvectors().col(0);
    if (q.imag().norm() == 0.0) {
      const RVec lam = es.eigenvalues();
      const double lo = lam(0), hi = lam(d - 1);
      r.elliptic = (lo > kEllipticTol) || (hi < -kEllipticTol);
      r.min_abs_symbol = std::min(std::abs(lo), std::abs(hi));
      if (!r.elliptic) {
        // Either a zero eigenvalue or an indefinite form; both give a null
        // direction of the quadratic form.
        if (std::abs(lo) <= kEllipticTol) {
          arg_abs = es.eigenvectors().col(0);
        } else if (std::abs(hi) <= kEllipticTol) {
          arg_abs = es.eigenvectors().col(d - 1);
        } else {
          RVec xi = std::sqrt(hi) * es.eigenvectors().col(0) + std::sqrt(-lo) * es.eigenvectors().col(d - 1);
          arg_abs = xi / xi.norm();
        }
        r.min_abs_symbol = std::abs(principal_symbol(p, m, arg_abs));
      }
    } else if (r.strongly_elliptic) {
      r.elliptic = true;
    }
  }

  if (!r.elliptic)
    r.witness = arg_abs;
  else if (!r.strongly_elliptic && even)
    r.witness = arg_re;
  if (r.witness) {
    // Sign convention: first nonzero component positive.
    for (Eigen::Index k = 0; k < r.witness->size(); ++k) {
      if (std::abs((*r.witness)(k)) <= 1e-14) {
        (*r.witness)(k) = 0.0;
        continue;
      }
      if ((*r.witness)(k) < 0) *r.witness = -*r.witness;
      break;
    }
  }
  return r;
}

}  // namespace liexp
