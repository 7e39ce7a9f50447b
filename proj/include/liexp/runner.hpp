#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "liexp/core.hpp"
#include "liexp/exponentiate.hpp"
#include "liexp/identities.hpp"
#include "liexp/problem.hpp"
#include "liexp/semigroup.hpp"

namespace liexp {

inline constexpr const char* kReportSchema = "liexp-report/1";

enum class Suite { identities, estimates, pipeline, all };

inline Suite parse_suite(const std::string& s) {
  if (s == "identities") return Suite::identities;
  if (s == "estimates") return Suite::estimates;
  if (s == "pipeline") return Suite::pipeline;
  if (s == "all") return Suite::all;
  throw SpecError("suite", "unknown suite '" + s + "'; known: identities estimates pipeline all");
}

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::identities: return "identities";
    case Suite::estimates: return "estimates";
    case Suite::pipeline: return "pipeline";
    case Suite::all: return "all";
  }
  return "unknown";
}

/// Worker count: hardware concurrency, capped by LIEXP_THREADS when set.
inline int thread_budget() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("LIEXP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return n;
}

/// 64-bit FNV-1a, used as the input digest.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunOptions {
  Suite suite = Suite::all;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  int threads = 0;  // 0 = thread_budget()
  int draws = 8;
};

struct CheckTask {
  std::string suite;
  std::function<Report()> run;
};

namespace detail {

inline Report identity_report(const std::string& name, const IdentityResult& r) {
  Report out;
  out.name = name;
  out.residuals["residual"] = num(r.residual);
  out.constants["tolerance"] = r.tolerance;
  out.constants["terms_used"] = r.terms_used;
  out.constants["side_data"] = r.side_data;
  if (!r.converged) out.fail(r.name + " did not meet its tolerance");
  return out;
}

inline AlgElement random_element(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  AlgElement x = AlgElement::zero(d);
  for (int k = 0; k < d; ++k) x.coeffs(k) = normal(rng);
  return x;
}

/// Draws lambda at distance >= 0.5 from sigma(A) and from the augmented
/// spectrum, with modulus between 1 and 1 + 2|A| + 2|ad A|.
inline cplx safe_lambda(const Mat& am, const Mat& ad, std::mt19937_64& rng) {
  const Vec ev = eigenvalues(am), adev = eigenvalues(ad);
  std::vector<cplx> bad(ev.data(), ev.data() + ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index k = 0; k < adev.size(); ++k) bad.push_back(ev(i) - adev(k));
  const double radius = 1.0 + 2.0 * spectral_norm(am) + 2.0 * spectral_norm(ad);
  std::uniform_real_distribution<double> u(-radius, radius);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const cplx z(u(rng), u(rng));
    double dist = kInf;
    for (cplx b : bad) dist = std::min(dist, std::abs(z - b));
    if (dist >= 0.5) return z;
  }
  return cplx(radius + 1.0, 0.0);
}

inline Report guarded(const std::string& name, const std::function<Report()>& f) {
  try {
    Report r = f();
    if (!name.empty()) r.name = name;
    return r;
  } catch (const Error& e) {
    Report r;
    r.name = name;
    r.fail(std::string("rejected: ") + e.what());
    return r;
  } catch (const std::exception& e) {
    Report r;
    r.name = name;
    r.fail(std::string("internal error: ") + e.what());
    return r;
  }
}

}  // namespace detail

/// Check tasks of one suite, each independent and seeded from the spec seed
/// and its own index.
inline std::vector<CheckTask> build_tasks(const ProblemSpec& spec, Suite suite, std::uint64_t seed, double tol,
                                          int draws) {
  std::vector<CheckTask> tasks;
  const LieAlgebra& g = spec.algebra;
  const MatrixRep& rep = spec.representation;
  const SeminormFamily& fam = spec.seminorms;
  const int d = g.dim();
  const int m = spec.elliptic_operator.order();
  auto hm_ptr = std::make_shared<Mat>(rep.eval(spec.elliptic_operator.to_env()));

  if (suite == Suite::identities || suite == Suite::all) {
    for (int i = 0; i < draws; ++i) {
      const std::uint64_t s = seed * 1000003ull + static_cast<std::uint64_t>(i);
      const std::string tag = "[" + std::to_string(i) + "]";
      tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("resolvent_commutation" + tag, [&] {
                           std::mt19937_64 rng(s);
                           const AlgElement a = detail::random_element(d, rng), b = detail::random_element(d, rng);
                           const Mat am = rep.eval(a), ad = ad_matrix(g, a);
                           const cplx lambda = detail::safe_lambda(am, ad, rng);
                           const Vec adev = eigenvalues(ad);
                           const cplx mu = adev.size() ? adev(static_cast<Eigen::Index>(rng() % adev.size())) : 0.0;
                           const int n = static_cast<int>(rng() % 4);
                           return detail::identity_report(
                               "", verify_resolvent_commutation(g, rep, a, b, lambda, mu, n, tol));
                         });
                       }});
      tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("resolvent_primary_decomposition" + tag, [&] {
                           std::mt19937_64 rng(s + 17);
                           const AlgElement a = detail::random_element(d, rng), b = detail::random_element(d, rng);
                           const cplx lambda = detail::safe_lambda(rep.eval(a), ad_matrix(g, a), rng);
                           return detail::identity_report(
                               "", verify_resolvent_primary_decomposition(g, rep, a, b, lambda, tol));
                         });
                       }});
      tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("resolvent_series" + tag, [&] {
                           std::mt19937_64 rng(s + 29);
                           const AlgElement a = detail::random_element(d, rng), b = detail::random_element(d, rng);
                           const Mat am = rep.eval(a);
                           // Far enough out that the spectral-radius certificate holds.
                           const double r0 = 1.0 + spectral_radius(am) + 2.0 * spectral_radius(ad_matrix(g, a));
                           std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
                           const cplx lambda = std::polar(r0, phase(rng));
                           IdentityResult res = verify_resolvent_series(g, rep, a, b, lambda, 1e-13, 500, tol);
                           Report rep_out = detail::identity_report("", res);
                           if (res.side_data["mode"] != "certified") rep_out.fail("certificate did not hold");
                           return rep_out;
                         });
                       }});
      tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("adjoint_conjugation" + tag, [&] {
                           std::mt19937_64 rng(s + 31);
                           AlgElement a = detail::random_element(d, rng);
                           const AlgElement b = detail::random_element(d, rng);
                           const double scale = std::max({1.0, spectral_norm(rep.eval(a)), spectral_norm(ad_matrix(g, a))});
                           a = cplx(1.0 / scale) * a;
                           std::uniform_real_distribution<double> u(-2.0, 2.0);
                           return detail::identity_report("", verify_adjoint_conjugation(g, rep, a, b, u(rng), tol));
                         });
                       }});
      tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("duhamel" + tag, [&] {
                           std::mt19937_64 rng(s + 37);
                           const Word u{static_cast<int>(rng() % d)}, v{static_cast<int>(rng() % d)};
                           std::uniform_real_distribution<double> uni(0.0, 1.0);
                           const double t = 0.25 + 0.75 * uni(rng);
                           const double sv = t * uni(rng);
                           const double scale = std::max(1.0, spectral_norm(*hm_ptr));
                           const Mat hm = *hm_ptr / scale;
                           return detail::identity_report("", verify_duhamel(rep, hm, u, v, sv, t, 64, spec.tolerances.duhamel));
                         });
                       }});
      tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("commutator_bound" + tag, [&] {
                           std::mt19937_64 rng(s + 41);
                           Word u, v;
                           for (int k = 0; k < 1 + static_cast<int>(rng() % 2); ++k) u.push_back(static_cast<int>(rng() % d));
                           for (int k = 0; k < 1 + static_cast<int>(rng() % 2); ++k) v.push_back(static_cast<int>(rng() % d));
                           return detail::identity_report("", verify_commutator_bound(g, rep, fam, u, v, 32, s + 43));
                         });
                       }});
    }
    tasks.push_back({"identities", [=, &g, &rep, &fam, &spec] {
                       Report r;
                       bool isometric = true;
                       for (int k = 0; k < d && isometric; ++k)
                         isometric = equicontinuity_check(rep.matrices[k], fam, 0.0, 2.0, EquicontinuityMode::isometric, 16).pass;
                       if (!isometric) {
                         r.name = "growth_bound";
                         r.notes.push_back("skipped: the one-parameter groups are not isometric for this family");
                         return r;
                       }
                       return detail::guarded("growth_bound", [&] {
                         Report out;
                         for (int n = 0; n <= 2; ++n) {
                           for (int k = 0; k < d; ++k) {
                             const IdentityResult res =
                                 verify_growth_bound(g, rep, fam, AlgElement::basis(d, k), n, spec.grids.t, 32, seed + n);
                             const std::string key = "n" + std::to_string(n) + "_B" + std::to_string(k + 1);
                             out.residuals[key] = res.side_data["worst_slack"];
                             if (!res.converged) out.fail("bound violated for " + key);
                           }
                         }
                         return out;
                       });
                     }});
  }

  if (suite == Suite::estimates || suite == Suite::all) {
    tasks.push_back({"estimates", [=, &g, &rep, &fam, &spec] {
                       Report r;
                       r.name = "ellipticity";
                       const EllipticityResult e = ellipticity_check(spec.elliptic_operator);
                       r.residuals = e.to_json();
                       if (!e.strongly_elliptic) r.fail("elliptic operator is not strongly elliptic");
                       return r;
                     }});
    tasks.push_back({"estimates", [=, &g, &rep, &fam, &spec] {
                       return detail::guarded("semigroup_type", [&] {
                         const TypeData td = semigroup_type(-*hm_ptr, fam);
                         Report r;
                         r.constants = td.to_json();
                         if (!std::isfinite(td.bounded_type)) r.fail("type is not finite");
                         return r;
                       });
                     }});
    tasks.push_back({"estimates", [=, &g, &rep, &fam, &spec] {
                       return detail::guarded("smoothing", [&] {
                         const SmoothingFit fit = smoothing_fit(*hm_ptr, rep, fam, std::max(3, m - 1), m, spec.grids.smoothing_t);
                         Report r;
                         r.constants = fit.to_json();
                         for (const auto& c : fit.per_seminorm)
                           for (double v : c.constants)
                             if (!std::isfinite(v)) r.fail("smoothing constant is not finite");
                         return r;
                       });
                     }});
    for (int n = 1; n <= m - 1; ++n)
      tasks.push_back({"estimates", [=, &g, &rep, &fam, &spec] {
                         return detail::guarded("graph_estimate_n" + std::to_string(n), [&] {
                           const GraphEstimateFit fit =
                               graph_estimate_fit(*hm_ptr, rep, fam, n, m, spec.grids.eps, 128, seed + 101 * n);
                           Report r;
                           json per = json::array();
                           for (const auto& e : fit.per_seminorm) per.push_back(e.to_json());
                           r.constants["per_seminorm"] = per;
                           r.grids["eps"] = rvec_json(fit.eps_grid);
                           if (!fit.all_verified()) r.fail("graph estimate not verified on a fresh sample");
                           return r;
                         });
                       }});
    tasks.push_back({"estimates", [=, &g, &rep, &fam, &spec] {
                       return detail::guarded("analytic_radius", [&] {
                         Report r;
                         double min_radius = kInf;
                         for (int i = 0; i < rep.space_dim; ++i)
                           for (int k = 0; k < d; ++k) {
                             const AnalyticRadiusResult ar =
                                 analytic_radius(rep.matrices[k], Vec::Unit(rep.space_dim, i), fam);
                             for (const auto& e : ar.per_seminorm) min_radius = std::min(min_radius, e.radius);
                           }
                         r.constants["min_radius"] = num(min_radius);
                         if (!(min_radius > 0.0)) r.fail("zero analytic radius");
                         return r;
                       });
                     }});
  }

  if (suite == Suite::pipeline || suite == Suite::all) {
    tasks.push_back({"pipeline", [=, &g, &rep, &fam, &spec] {
                       return detail::guarded("exponentiability", [&] {
                         PipelineConfig cfg;
                         cfg.mu_grid = spec.grids.mu;
                         cfg.smoothing_grid = spec.grids.smoothing_t;
                         cfg.seed = seed;
                         const PipelineReport pr = check_exponentiability(g, rep, fam, spec.elliptic_operator, cfg);
                         Report r;
                         r.pass = pr.pass;
                         json j = pr.to_json();
                         r.residuals["checks"] = j["checks"];
                         r.constants["hypotheses_hold"] = pr.hypotheses;
                         r.constants["condition_isometric_group"] = pr.condition_isometry;
                         r.constants["condition_contractive_semigroup"] = pr.condition_contraction;
                         r.constants["analytic_vectors_dense"] = pr.analytic_density;
                         r.constants["conditions_agree"] = pr.consistent;
                         for (const auto& c : pr.checks)
                           if (!c.pass) r.notes.push_back("failed: " + c.name);
                         return r;
                       });
                     }});
  }
  return tasks;
}

/// Runs a suite and assembles the report. Tasks run on up to
/// `opts.threads` workers; results are placed by task index, so the report
/// does not depend on scheduling.
inline json run(const ProblemSpec& spec, const RunOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = opts.seed.value_or(spec.seed);
  const double tol = opts.tol.value_or(spec.tolerances.identity);
  const std::vector<CheckTask> tasks = build_tasks(spec, opts.suite, seed, tol, opts.draws);

  std::vector<Report> results(tasks.size());
  std::vector<double> times(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      results[i] = detail::guarded("", tasks[i].run);
      if (results[i].name.empty()) results[i].name = "check_" + std::to_string(i);
      times[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int workers = std::max(1, std::min<int>(opts.threads > 0 ? opts.threads : thread_budget(),
                                                static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  json canonical = emit_spec(spec);
  canonical["seed"] = seed;
  json report;
  report["schema"] = kReportSchema;
  report["suite"] = to_string(opts.suite);
  report["seed"] = seed;
  report["tolerance"] = tol;
  report["input_digest"] = fnv1a_hex(canonical.dump());
  report["spec"] = canonical;
  report["defaulted"] = spec.defaulted;
  json checks = json::array();
  json failed = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    json c = results[i].to_json();
    c["suite"] = tasks[i].suite;
    c["inputs_digest"] = report["input_digest"];
    c["wall_time_ms"] = times[i];
    checks.push_back(c);
    if (!results[i].pass) failed.push_back(results[i].name);
  }
  report["checks"] = checks;
  report["summary"] = json{{"total", results.size()}, {"passed", results.size() - failed.size()}, {"failed", failed}};
  report["outcome"] = failed.empty() ? "pass" : "fail";
  report["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Copy of a report with every wall_time_ms field removed.
inline json strip_timing(json j) {
  if (j.is_object()) {
    j.erase("wall_time_ms");
    for (auto& [k, v] : j.items()) v = strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timing(v);
  }
  return j;
}

}  // namespace liexp
