#pragma once

#include <cmath>

#include "liexp/core.hpp"

namespace liexp {

/// Largest |.|_1 norm of t*A accepted by expm. Beyond it exp overflows for
/// generators with positive spectrum, so the call is refused outright.
inline constexpr double kExpmNormLimit = 700.0;

namespace detail {

// Coefficients of the [13/13] Pade approximant to exp, and the 1-norm bound
// below which it meets unit roundoff without scaling (Higham 2005).
inline constexpr double kPade13[] = {64764752532480000.0,
                                     32382376266240000.0,
                                     7771770303897600.0,
                                     1187353796428800.0,
                                     129060195264000.0,
                                     10559470521600.0,
                                     670442572800.0,
                                     33522128640.0,
                                     1323241920.0,
                                     40840800.0,
                                     960960.0,
                                     16380.0,
                                     182.0,
                                     1.0};
inline constexpr double kTheta13 = 5.371920351148152;

}  // namespace detail

/// e^{tA} by scaling and squaring with the degree-13 Pade approximant.
inline Mat expm(const Mat& a, double t = 1.0) {
  if (a.rows() != a.cols()) throw DimensionError("expm: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n == 0) return Mat(0, 0);
  if (!a.allFinite() || !std::isfinite(t)) throw RangeError("expm: non-finite input");
  const Mat ta = t * a;
  const double norm = one_norm(ta);
  if (norm > kExpmNormLimit)
    throw RangeError("expm: |tA|_1 = " + std::to_string(norm) + " exceeds " +
                     std::to_string(kExpmNormLimit));
  if (norm == 0.0) return Mat::Identity(n, n);

  int squarings = 0;
  if (norm > detail::kTheta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13)));
  const Mat x = ta / std::ldexp(1.0, squarings);

  const auto& b = detail::kPade13;
  const Mat id = Mat::Identity(n, n);
  const Mat x2 = x * x;
  const Mat x4 = x2 * x2;
  const Mat x6 = x4 * x2;
  const Mat u_inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  const Mat u = x * (x6 * u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const Mat v_inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  const Mat v = x6 * v_inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace liexp
