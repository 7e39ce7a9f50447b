#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/lie_core.hpp"
#include "liexp/repspace.hpp"

namespace liexp {

/// Unknown fixture name; the message lists the known ones.
class UnknownFixture : public Error {
 public:
  UnknownFixture(const std::string& kind, const std::string& name, const std::vector<std::string>& known)
      : Error(message(kind, name, known)), known_(known) {}
  const std::vector<std::string>& known() const { return known_; }

 private:
  static std::string message(const std::string& kind, const std::string& name, const std::vector<std::string>& known) {
    std::string s = "unknown " + kind + " fixture '" + name + "'; known:";
    for (const auto& k : known) s += " " + k;
    return s;
  }
  std::vector<std::string> known_;
};

namespace fixtures {

inline StructureTensor zero_tensor(int d) {
  return StructureTensor(d, std::vector<std::vector<double>>(d, std::vector<double>(d, 0.0)));
}

inline void set_bracket(StructureTensor& c, int i, int j, int k, double v) {
  c[i][j][k] = v;
  c[j][i][k] = -v;
}

/// [e1, e2] = e3, everything else zero.
inline LieAlgebra heisenberg() {
  StructureTensor c = zero_tensor(3);
  set_bracket(c, 0, 1, 2, 1.0);
  return LieAlgebra(c, "heisenberg");
}

/// [e1, e2] = e3 and cyclic.
inline LieAlgebra so3() {
  StructureTensor c = zero_tensor(3);
  set_bracket(c, 0, 1, 2, 1.0);
  set_bracket(c, 1, 2, 0, 1.0);
  set_bracket(c, 2, 0, 1, 1.0);
  return LieAlgebra(c, "so3");
}

/// Basis (H, E, F): [H, E] = 2E, [H, F] = -2F, [E, F] = H.
inline LieAlgebra sl2() {
  StructureTensor c = zero_tensor(3);
  set_bracket(c, 0, 1, 1, 2.0);
  set_bracket(c, 0, 2, 2, -2.0);
  set_bracket(c, 1, 2, 0, 1.0);
  return LieAlgebra(c, "sl2");
}

inline LieAlgebra abelian(int d) {
  if (d <= 0) throw DimensionError("abelian algebra dimension must be positive");
  return LieAlgebra(zero_tensor(d), "abelian-" + std::to_string(d));
}

inline Mat unit(int n, int i, int j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

/// Strictly upper triangular 3x3 matrices: B1 = E12, B2 = E23, B3 = E13.
inline MatrixRep heisenberg_rep3() { return MatrixRep{3, {unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)}, {"B1", "B2", "B3"}}; }

/// Spin-j representation of so(3), B_k = -i J_k, with j a positive multiple
/// of 1/2 given as twice its value.
inline MatrixRep so3_spin(int two_j) {
  if (two_j <= 0) throw PreconditionError("spin must be a positive multiple of 1/2");
  const int n = two_j + 1;
  const double j = two_j / 2.0;
  Mat jz = Mat::Zero(n, n), jp = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double m = j - a;
    jz(a, a) = m;
    if (a > 0) jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Mat jm = jp.adjoint();
  const cplx i(0.0, 1.0);
  const Mat jx = 0.5 * (jp + jm);
  const Mat jy = (jp - jm) / (2.0 * i);
  return MatrixRep{n, {-i * jx, -i * jy, -i * jz}, {"B1", "B2", "B3"}};
}

/// sl(2) acting on itself.
inline MatrixRep sl2_adjoint() {
  const LieAlgebra g = sl2();
  std::vector<Mat> m;
  for (int k = 0; k < 3; ++k) m.push_back(ad_matrix(g, AlgElement::basis(3, k)));
  return MatrixRep{3, m, {"H", "E", "F"}};
}

inline MatrixRep sl2_defining() {
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  return MatrixRep{2, {h, unit(2, 0, 1), unit(2, 1, 0)}, {"H", "E", "F"}};
}

/// Commuting skew diagonal matrices B_k = i diag(f_k) with small integer
/// frequencies; a representation of any abelian algebra, and of the
/// Heisenberg algebra when the last matrix is zeroed.
inline MatrixRep skew_diagonal(int d, int n) {
  if (n <= 0) throw DimensionError("representation space dimension must be positive");
  std::vector<Mat> m;
  std::vector<std::string> labels;
  for (int k = 0; k < d; ++k) {
    Mat b = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a) b(a, a) = cplx(0.0, static_cast<double>(((a + 1) * (k + 2)) % 7 - 3));
    m.push_back(b);
    labels.push_back("B" + std::to_string(k + 1));
  }
  return MatrixRep{n, m, labels};
}

/// Fourier model of d/dx on trigonometric polynomials: B = diag(i k),
/// k = -N..N.
inline MatrixRep fourier(int n_max) {
  if (n_max <= 0) throw PreconditionError("Fourier model needs N >= 1");
  const int n = 2 * n_max + 1;
  Mat b = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) b(a, a) = cplx(0.0, static_cast<double>(a - n_max));
  return MatrixRep{n, {b}, {"B1"}};
}

/// B1 = diag(1, 0): a representation of the one-dimensional algebra that
/// generates no isometries.
inline MatrixRep nonskew_projection() { return MatrixRep{2, {unit(2, 0, 0)}, {"B1"}}; }

inline std::vector<std::string> algebra_names() { return {"heisenberg", "so3", "sl2", "abelian-<n>"}; }

inline bool parse_suffix(const std::string& name, const std::string& prefix, int& value) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return false;
  const std::string rest = name.substr(prefix.size());
  if (rest.find_first_not_of("0123456789") != std::string::npos || rest.size() > 4) return false;
  value = std::stoi(rest);
  return value > 0;
}

inline LieAlgebra algebra(const std::string& name) {
  if (name == "heisenberg") return heisenberg();
  if (name == "so3") return so3();
  if (name == "sl2") return sl2();
  int d = 0;
  if (parse_suffix(name, "abelian-", d)) return abelian(d);
  throw UnknownFixture("algebra", name, algebra_names());
}

inline std::vector<std::string> representation_names(const std::string& algebra_name) {
  if (algebra_name == "heisenberg") return {"rep3", "skew-diag-<N>"};
  if (algebra_name == "so3") return {"spin-<j>  (j = 1/2, 1, 3/2, ...)"};
  if (algebra_name == "sl2") return {"adjoint", "defining"};
  if (algebra_name == "abelian-1") return {"skew-diag-<N>", "fourier-<N>", "nonskew"};
  return {"skew-diag-<N>"};
}

/// so3 spin names: "spin-1", "spin-2", "spin-1/2", "spin-3/2".
inline bool parse_spin(const std::string& name, int& two_j) {
  if (name.rfind("spin-", 0) != 0) return false;
  const std::string rest = name.substr(5);
  const auto slash = rest.find('/');
  int v = 0;
  if (slash == std::string::npos) {
    if (!parse_suffix("x" + rest, "x", v)) return false;
    two_j = 2 * v;
    return true;
  }
  if (rest.substr(slash) != "/2" || !parse_suffix("x" + rest.substr(0, slash), "x", v) || v % 2 == 0) return false;
  two_j = v;
  return true;
}

inline MatrixRep representation(const std::string& algebra_name, const std::string& rep_name) {
  int v = 0;
  if (algebra_name == "heisenberg") {
    if (rep_name == "rep3") return heisenberg_rep3();
    if (parse_suffix(rep_name, "skew-diag-", v)) {
      MatrixRep r = skew_diagonal(3, v);
      r.matrices[2].setZero();
      return r;
    }
  } else if (algebra_name == "so3") {
    if (parse_spin(rep_name, v)) return so3_spin(v);
  } else if (algebra_name == "sl2") {
    if (rep_name == "adjoint") return sl2_adjoint();
    if (rep_name == "defining") return sl2_defining();
  } else if (parse_suffix(algebra_name, "abelian-", v)) {
    const int d = v;
    if (parse_suffix(rep_name, "skew-diag-", v)) return skew_diagonal(d, v);
    if (d == 1 && parse_suffix(rep_name, "fourier-", v)) return fourier(v);
    if (d == 1 && rep_name == "nonskew") return nonskew_projection();
  } else {
    throw UnknownFixture("algebra", algebra_name, algebra_names());
  }
  throw UnknownFixture("representation", rep_name, representation_names(algebra_name));
}

}  // namespace fixtures
}  // namespace liexp
