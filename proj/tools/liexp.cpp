// liexp command line: run check suites on a problem file, validate a problem
// file, list fixtures, print the problem schema.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "liexp/liexp.hpp"
#include "liexp/problem.hpp"
#include "liexp/runner.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;

int write_json(const liexp::json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return kExitPass;
  }
  std::ofstream f(out);
  if (!f) {
    std::cerr << "liexp: cannot write '" << out << "'\n";
    return kExitInputError;
  }
  f << text;
  return kExitPass;
}

liexp::json fixture_listing() {
  liexp::json j = liexp::json::object();
  for (const std::string& name : {"heisenberg", "so3", "sl2", "abelian-1", "abelian-<n>"})
    j[name] = liexp::fixtures::representation_names(name);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for exponentiating Lie algebra representations"};
  app.require_subcommand(1);

  std::string spec_path, suite_name = "all", out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  auto* check = app.add_subcommand("check", "Run a check suite and emit a report");
  check->add_option("--spec", spec_path, "Problem file (JSON)")->required();
  check->add_option("--suite", suite_name, "identities | estimates | pipeline | all");
  check->add_option("--out", out_path, "Write the report here instead of stdout");
  check->add_option("--seed", seed, "Override the problem seed");
  check->add_option("--tol", tol, "Override the identity residual tolerance");

  auto* verify = app.add_subcommand("verify", "Validate a problem file and print it with defaults filled in");
  verify->add_option("--spec", spec_path, "Problem file (JSON)")->required();
  verify->add_option("--out", out_path, "Write here instead of stdout");
  verify->add_option("--seed", seed, "Override the problem seed");

  auto* fixtures = app.add_subcommand("fixtures", "List built-in algebras and representations");
  auto* schema = app.add_subcommand("schema", "Print the JSON schema of problem files");
  schema->add_option("--out", out_path, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (fixtures->parsed()) return write_json(fixture_listing(), "");
    if (schema->parsed()) return write_json(liexp::problem_schema(), out_path);

    if (tol && !(*tol > 0.0)) throw liexp::SpecError("--tol", "must be positive");
    const liexp::Suite suite = liexp::parse_suite(suite_name);
    liexp::ProblemSpec spec = liexp::parse_spec_file(spec_path);
    if (verify->parsed()) {
      if (seed) spec.seed = *seed;
      liexp::json j = liexp::emit_spec(spec);
      j["defaulted"] = spec.defaulted;
      return write_json(j, out_path);
    }

    liexp::RunOptions opts;
    opts.suite = suite;
    opts.seed = seed;
    opts.tol = tol;
    const liexp::json report = liexp::run(spec, opts);
    if (const int rc = write_json(report, out_path); rc != kExitPass) return rc;
    if (report["outcome"] == "pass") return kExitPass;
    for (const auto& name : report["summary"]["failed"]) std::cerr << "liexp: failed check " << name.get<std::string>() << "\n";
    return kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "liexp: " << e.what() << "\n";
    return kExitInputError;
  }
}
