// Runs the exponentiability pipeline on a skew and a non-skew representation,
// then checks two identities directly.
#include <cstdio>

#include "liexp/liexp.hpp"

using namespace liexp;

namespace {

void pipeline(const char* label, const LieAlgebra& g, const MatrixRep& rep) {
  const SeminormFamily fam = saturate(SeminormFamily{{Seminorm::l2(rep.space_dim)}, false, 1});
  const PipelineReport r = check_exponentiability(g, rep, fam, minus_laplacian(g.dim()));
  std::printf("%-22s contraction=%d isometry=%d agree=%d -> %s\n", label, r.condition_contraction,
              r.condition_isometry, r.consistent, r.pass ? "pass" : "fail");
  for (const Report& c : r.checks)
    if (!c.pass) std::printf("    failed %s: %s\n", c.name.c_str(), c.notes.empty() ? "" : c.notes.back().c_str());
}

}  // namespace

int main() {
  pipeline("so3 spin-1", fixtures::so3(), fixtures::so3_spin(2));
  pipeline("abelian-1 projection", fixtures::abelian(1), fixtures::nonskew_projection());

  const LieAlgebra g = fixtures::heisenberg();
  const MatrixRep rep = fixtures::heisenberg_rep3();
  const AlgElement a = AlgElement::basis(3, 0), b = AlgElement::basis(3, 1);
  const IdentityResult conj = verify_adjoint_conjugation(g, rep, a, b, 0.7);
  const IdentityResult comm = verify_resolvent_commutation(g, rep, a, b, cplx(2.0, 1.0), 0.0, 2);
  std::printf("adjoint conjugation residual %.2e, resolvent commutation residual %.2e\n", conj.residual,
              comm.residual);

  const OrderedPoly nf = pbw_normal_form(g, EnvElement({1, 0}, 1.0));
  std::printf("B2 B1 =");
  for (const auto& [alpha, c] : nf.terms())
    std::printf(" %+g B1^%d B2^%d B3^%d", c.real(), alpha[0], alpha[1], alpha[2]);
  std::printf("\n");
  return 0;
}
