#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "liexp/exponentiate.hpp"
#include "liexp/fixtures.hpp"
#include "oracles.hpp"

using namespace liexp;

namespace {

AlgElement e(int d, int k) { return AlgElement::basis(d, k); }

// log(e^X e^Y) through the matrix logarithm in a faithful representation.
AlgElement bch_oracle(const MatrixRep& rep, const AlgElement& x, const AlgElement& y) {
  const Mat z = oracles::logm(oracles::expm(rep.eval(x)) * oracles::expm(rep.eval(y)));
  // Least squares on the basis matrices recovers the coefficients.
  const int d = rep.algebra_dim();
  const int n2 = static_cast<int>(z.size());
  Mat a(n2, d);
  for (int k = 0; k < d; ++k) a.col(k) = rep.matrices[k].reshaped();
  return AlgElement{a.colPivHouseholderQr().solve(z.reshaped().eval())};
}

SeminormFamily single(Seminorm p) { return SeminormFamily{{std::move(p)}, true, 1}; }

Vec mat_vec(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Vec v(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j) = m(i, j);
  return v;
}

Mat vec_mat(const Vec& v, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

}  // namespace

TEST(Bch, ZeroSecondArgumentGivesFirst) {
  std::mt19937_64 rng(1);
  const AlgElement x = oracles::random_element(3, rng);
  EXPECT_LT((bch(fixtures::so3(), x, AlgElement::zero(3)) - x).coeffs.norm(), 1e-15);
}

TEST(Bch, CommutingArgumentsAdd) {
  const AlgElement x = cplx(0.3) * e(3, 2), y = cplx(-1.1) * e(3, 2);
  EXPECT_LT((bch(fixtures::heisenberg(), x, y) - (x + y)).coeffs.norm(), 1e-15);
}

TEST(Bch, HeisenbergClosedFormIsExactAtOrderTwo) {
  // Step two nilpotent: log(e^X e^Y) = X + Y + [X,Y]/2.
  const auto g = fixtures::heisenberg();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const AlgElement x = oracles::random_element(3, rng), y = oracles::random_element(3, rng);
    const AlgElement want = x + y + cplx(0.5) * bracket(g, x, y);
    for (int order = 2; order <= kBchMaxOrder; ++order)
      EXPECT_LT((bch(g, x, y, order) - want).coeffs.norm(), 1e-13);
    EXPECT_LT((bch(g, x, y) - bch_oracle(fixtures::heisenberg_rep3(), x, y)).coeffs.norm(), 1e-10);
  }
}

TEST(Bch, So3MatchesMatrixLogarithmAtSmallScale) {
  const auto g = fixtures::so3();
  const MatrixRep rep = fixtures::so3_spin(2);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const AlgElement x = cplx(0.05) * oracles::random_element(3, rng);
    const AlgElement y = cplx(0.05) * oracles::random_element(3, rng);
    EXPECT_LT((bch(g, x, y) - bch_oracle(rep, x, y)).coeffs.norm(), 1e-9);
  }
}

TEST(Bch, ErrorShrinksWithOrder) {
  const auto g = fixtures::so3();
  const MatrixRep rep = fixtures::so3_spin(2);
  std::mt19937_64 rng(23);
  const AlgElement x = cplx(0.2) * oracles::random_element(3, rng);
  const AlgElement y = cplx(0.2) * oracles::random_element(3, rng);
  const AlgElement want = bch_oracle(rep, x, y);
  double prev = kInf;
  for (int order : {2, 4, 6}) {
    const double err = (bch(g, x, y, order) - want).coeffs.norm();
    EXPECT_LT(err, prev) << "order " << order;
    prev = err;
  }
}

TEST(Bch, RejectsOrderOutsideTable) {
  const AlgElement x = e(3, 0);
  EXPECT_THROW(bch(fixtures::so3(), x, x, 1), PreconditionError);
  EXPECT_THROW(bch(fixtures::so3(), x, x, 7), PreconditionError);
}

TEST(GroupElement, ZeroParametersGiveIdentity) {
  const MatrixRep rep = fixtures::so3_spin(2);
  EXPECT_LT((group_element(rep, {0, 0, 0}) - Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(GroupElement, HeisenbergProductOfUnipotents) {
  const Mat g = group_element(fixtures::heisenberg_rep3(), {1.0, 1.0, 0.0});
  Mat want = Mat::Identity(3, 3);
  want(0, 1) = 1.0;
  want(1, 2) = 1.0;
  want(0, 2) = 1.0;
  EXPECT_LT((g - want).norm(), 1e-14);
}

TEST(GroupElement, SingleGeneratorMatchesOracle) {
  const MatrixRep rep = fixtures::so3_spin(3);
  const Mat got = group_element(rep, {0.0, 0.7, 0.0});
  EXPECT_LT((got - oracles::expm(cplx(0.7) * rep.matrices[1])).norm(), 1e-12);
}

TEST(GroupElement, ReversedNegatedParametersInvert) {
  const MatrixRep rep = fixtures::sl2_defining();
  const Mat a = group_element(rep, {0.3, -0.4, 0.9});
  MatrixRep rev{rep.space_dim, {rep.matrices[2], rep.matrices[1], rep.matrices[0]}, {"F", "E", "H"}};
  const Mat b = group_element(rev, {-0.9, 0.4, -0.3});
  EXPECT_LT((a * b - Mat::Identity(2, 2)).norm(), 1e-12);
}

TEST(GroupElement, RejectsWrongParameterCount) {
  EXPECT_THROW(group_element(fixtures::so3_spin(2), {1.0}), DimensionError);
}

TEST(HomomorphismCheck, PassesOnFixtures) {
  EXPECT_TRUE(homomorphism_check(fixtures::abelian(2), fixtures::skew_diagonal(2, 3)).pass);
  const Report h = homomorphism_check(fixtures::heisenberg(), fixtures::heisenberg_rep3());
  EXPECT_TRUE(h.pass);
  EXPECT_LT(h.residuals["max_residual"].get<double>(), 1e-13);
  const Report s = homomorphism_check(fixtures::so3(), fixtures::so3_spin(2));
  EXPECT_TRUE(s.pass);
  EXPECT_LE(s.residuals["max_residual"].get<double>(), 1e-5);
  EXPECT_DOUBLE_EQ(s.constants["effective_scale"].get<double>(), 0.2);
}

TEST(HomomorphismCheck, BrokenBracketFails) {
  // so3 matrices presented as an abelian algebra: the series drops [X,Y]/2.
  const Report r = homomorphism_check(fixtures::abelian(3), fixtures::so3_spin(2), 16, 0.1);
  EXPECT_FALSE(r.pass);
}

TEST(HomomorphismCheck, RejectsScale) {
  EXPECT_THROW(homomorphism_check(fixtures::so3(), fixtures::so3_spin(2), 4, 0.0), PreconditionError);
  EXPECT_THROW(homomorphism_check(fixtures::so3(), fixtures::so3_spin(2), 4, 0.6), PreconditionError);
}

TEST(Pipeline, SkewSpinRepresentationsPass) {
  const auto g = fixtures::so3();
  for (int two_j = 1; two_j <= 6; ++two_j) {
    const MatrixRep rep = fixtures::so3_spin(two_j);
    const SeminormFamily fam = saturate(SeminormFamily{{Seminorm::l2(rep.space_dim)}, false, 1});
    const PipelineReport pr = check_exponentiability(g, rep, fam, minus_laplacian(3));
    EXPECT_TRUE(pr.pass) << "2j=" << two_j << "\n" << pr.to_json().dump(1);
    EXPECT_TRUE(pr.hypotheses);
    EXPECT_TRUE(pr.condition_contraction);
    EXPECT_TRUE(pr.condition_isometry);
    EXPECT_TRUE(pr.consistent);
  }
}

TEST(Pipeline, AbelianSkewDiagonalPasses) {
  const MatrixRep rep = fixtures::skew_diagonal(2, 3);
  const SeminormFamily fam = saturate(SeminormFamily{{Seminorm::l2(3)}, false, 1});
  EXPECT_TRUE(check_exponentiability(fixtures::abelian(2), rep, fam, minus_laplacian(2)).pass);
}

TEST(Pipeline, NonSkewFailsOnBothSides) {
  const MatrixRep rep = fixtures::nonskew_projection();
  const SeminormFamily fam = saturate(SeminormFamily{{Seminorm::l2(2)}, false, 1});
  const PipelineReport pr = check_exponentiability(fixtures::abelian(1), rep, fam, minus_laplacian(1));
  EXPECT_FALSE(pr.pass);
  EXPECT_TRUE(pr.hypotheses);
  EXPECT_FALSE(pr.condition_contraction);
  EXPECT_FALSE(pr.condition_isometry);
  EXPECT_TRUE(pr.consistent);
  bool saw_conservativity = false;
  for (const Report& r : pr.checks)
    if (r.name == "conservativity_B1") saw_conservativity = !r.pass;
  EXPECT_TRUE(saw_conservativity);
  EXPECT_EQ(pr.to_json()["outcome"], "fail");
}

TEST(Pipeline, RejectsUnsaturatedFamilyAndLowOrder) {
  const MatrixRep rep = fixtures::so3_spin(2);
  const SeminormFamily raw{{Seminorm::l2(3)}, false, 1};
  EXPECT_THROW(check_exponentiability(fixtures::so3(), rep, raw, minus_laplacian(3)), PreconditionError);
  const SeminormFamily fam = saturate(raw);
  OrderedPoly first(3);
  first.add({1, 0, 0}, 1.0);
  EXPECT_THROW(check_exponentiability(fixtures::so3(), rep, fam, first), PreconditionError);
}

TEST(AssocAlgebra, MatrixAlgebraIsValidStarAlgebra) {
  for (int n : {1, 2, 3}) {
    const Report r = AssocAlgebra::matrix_algebra(n).validate();
    EXPECT_TRUE(r.pass) << n;
    EXPECT_EQ(r.residuals["associativity"].get<double>(), 0.0);
  }
}

TEST(AssocAlgebra, MultiplyMatchesMatrixProduct) {
  const AssocAlgebra m3 = AssocAlgebra::matrix_algebra(3);
  std::mt19937_64 rng(2);
  const Mat a = oracles::random_matrix(3, rng), b = oracles::random_matrix(3, rng);
  EXPECT_LT((vec_mat(m3.multiply(mat_vec(a), mat_vec(b)), 3) - a * b).norm(), 1e-13);
  EXPECT_LT((vec_mat(m3.star(mat_vec(a)), 3) - a.adjoint()).norm(), 1e-15);
}

TEST(AssocAlgebra, NonAssociativeProductDetected) {
  AssocAlgebra alg = AssocAlgebra::matrix_algebra(2);
  // Octonion-style sign flip on one structure constant.
  alg.mult[(static_cast<std::size_t>(1) * alg.dim + 2) * alg.dim + 0] = -1.0;
  const Report r = alg.validate();
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.residuals["associativity"].get<double>(), 0.5);
}

TEST(Derivation, ZeroMapIsDerivation) {
  const AssocAlgebra m2 = AssocAlgebra::matrix_algebra(2);
  const Report r = derivation_report(m2, Mat::Zero(4, 4), linear_grid(-2, 2, 9), true);
  EXPECT_TRUE(r.pass);
}

TEST(Derivation, InnerDerivationOfM2MatchesConjugation) {
  const AssocAlgebra m2 = AssocAlgebra::matrix_algebra(2);
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = cplx(0, 1);
  h(1, 1) = cplx(0, -1);
  const Mat delta = inner_derivation(m2, mat_vec(h));
  const Report r = derivation_report(m2, delta, linear_grid(-2, 2, 17), true);
  EXPECT_TRUE(r.pass) << r.to_json().dump(1);
  EXPECT_LE(r.residuals["leibniz"].get<double>(), 1e-12);
  EXPECT_LE(r.residuals["automorphism"].get<double>(), 1e-9);

  std::mt19937_64 rng(6);
  const Mat a = oracles::random_matrix(2, rng);
  for (double t : {-1.5, 0.4, 2.0}) {
    const Mat u = oracles::expm(cplx(t) * h);
    const Mat want = u * a * u.inverse();
    EXPECT_LT((vec_mat(oracles::expm(cplx(t) * delta) * mat_vec(a), 2) - want).norm(), 1e-12);
  }
}

TEST(Derivation, RandomInnerDerivationsOfM3) {
  const AssocAlgebra m3 = AssocAlgebra::matrix_algebra(3);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const Mat x = oracles::random_matrix(3, rng) * cplx(0.5);
    const Report r = derivation_report(m3, inner_derivation(m3, mat_vec(x)), linear_grid(-2, 2, 9));
    EXPECT_TRUE(r.pass) << r.to_json().dump(1);
    EXPECT_LE(r.residuals["leibniz"].get<double>(), 1e-12);
    EXPECT_LE(r.residuals["automorphism"].get<double>(), 1e-9);
  }
}

TEST(Derivation, SkewHermitianGeneratorIsStarDerivation) {
  const AssocAlgebra m2 = AssocAlgebra::matrix_algebra(2);
  Mat x(2, 2);
  x << cplx(0, 1), cplx(1, 2), cplx(-1, 2), cplx(0, -3);
  const Report r = derivation_report(m2, inner_derivation(m2, mat_vec(x)), linear_grid(-1, 1, 5), true);
  EXPECT_TRUE(r.pass) << r.to_json().dump(1);
  Mat y = x;
  y(0, 1) = cplx(5, 0);
  EXPECT_FALSE(derivation_report(m2, inner_derivation(m2, mat_vec(y)), linear_grid(-1, 1, 5), true).pass);
}

TEST(Derivation, TransposeIsRejectedByLeibniz) {
  const AssocAlgebra m2 = AssocAlgebra::matrix_algebra(2);
  const Report r = derivation_report(m2, transpose_map(2), linear_grid(-2, 2, 9));
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.residuals["leibniz"].get<double>(), 0.5);
  EXPECT_GT(r.residuals["automorphism"].get<double>(), 1e-8);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes.front().find("Leibniz"), std::string::npos);
}

TEST(Derivation, RejectsShape) {
  EXPECT_THROW(derivation_report(AssocAlgebra::matrix_algebra(2), Mat::Zero(3, 3), {0.0}), DimensionError);
}

TEST(CStar, OperatorNormPasses) {
  const AssocAlgebra m2 = AssocAlgebra::matrix_algebra(2);
  const Report r = cstar_seminorm_check(m2, single(Seminorm::matrix_op(2)));
  EXPECT_TRUE(r.pass) << r.to_json().dump(1);
}

TEST(CStar, FrobeniusFailsWithIdentityWitness) {
  const AssocAlgebra m2 = AssocAlgebra::matrix_algebra(2);
  const Report r = cstar_seminorm_check(m2, single(Seminorm::l2(4)));
  EXPECT_FALSE(r.pass);
  EXPECT_LE(r.residuals["per_seminorm"][0]["submultiplicativity"].get<double>(), 1e-10);
  EXPECT_LE(r.residuals["per_seminorm"][0]["star_invariance"].get<double>(), 1e-10);
  ASSERT_TRUE(r.witnesses.contains("seminorm_0"));
  const json& w = r.witnesses["seminorm_0"];
  Vec a(4);
  for (int k = 0; k < 4; ++k) a(k) = cplx(w[2 * k].get<double>(), w[2 * k + 1].get<double>());
  // Independent check of the witness: |a* a|_F versus |a|_F^2.
  const Mat am = vec_mat(a, 2);
  EXPECT_GT(std::abs((am.adjoint() * am).norm() - am.squaredNorm()), 0.1);
  EXPECT_LT((a - mat_vec(Mat::Identity(2, 2))).norm(), 1e-15);
}

TEST(CStar, RejectsAlgebraWithoutInvolution) {
  AssocAlgebra a = AssocAlgebra::matrix_algebra(2);
  a.involution.reset();
  EXPECT_THROW(cstar_seminorm_check(a, single(Seminorm::l2(4))), PreconditionError);
}
