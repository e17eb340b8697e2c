// contract-sa: run experiments, property suites, bound curves and envelope
// evaluations from the command line.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "csa/error.hpp"
#include "csa/harness/commands.hpp"
#include "csa/harness/experiments.hpp"
#include "csa/harness/verify.hpp"
#include "csa/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

int cmd_run(const std::string &spec_file, const std::string &output_dir) {
  using namespace csa::harness;
  const ExperimentSpec spec = load_experiment(IniConfig::from_file(spec_file), output_dir);
  const ExperimentOutput out = compute_experiment(spec);
  for (const auto &p : write_experiment(spec, out))
    std::cout << p.string() << "\n";
  return kOk;
}

int cmd_verify(const std::string &suite, bool quick, bool json, std::optional<std::uint64_t> seed,
               unsigned threads) {
  using namespace csa::harness;
  VerifyOptions opt = quick ? VerifyOptions::quick() : VerifyOptions{};
  if (seed)
    opt.seed = *seed;
  opt.threads = threads;
  const auto results = run_suite(suite, opt);
  if (json)
    std::cout << report_json(results).dump(2) << "\n";
  else
    std::cout << format_report(results);
  return all_passed(results) ? kOk : kFailed;
}

int cmd_bounds(const std::string &theorem, const std::string &params, std::int64_t k_max, const std::string &output,
               bool show_info) {
  using namespace csa::harness;
  const BoundsResult r = compute_bounds(theorem, IniConfig::from_file(params), k_max);
  const std::string csv = to_csv(r.table);
  if (output.empty())
    std::cout << csv;
  else
    csa::write_file_atomic(output, csv);
  if (show_info)
    std::cerr << r.info.dump(2) << "\n";
  return kOk;
}

int cmd_envelope(const std::string &spec, const std::string &x, std::optional<double> tol) {
  using namespace csa::harness;
  std::cout << envelope_eval_csv(IniConfig::from_file(spec), csa::parse_csv_vector(x), tol);
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Contractive stochastic approximation: experiments, bounds and checks"};
  app.require_subcommand(1);

  std::string run_spec, run_out;
  auto *run = app.add_subcommand("run", "Run the experiment described by an INI spec");
  run->add_option("spec", run_spec, "Experiment spec file")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", run_out, "Output directory (default: $CONTRACT_SA_OUTPUT_DIR or cwd)");

  std::string suite = "all";
  bool quick = false, json = false;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  auto *verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("suite", suite, "sandwich, drift, contraction, noise, lipschitz, tightness or all");
  verify->add_flag("--quick", quick, "Reduced sample counts");
  verify->add_flag("--json", json, "Machine-readable report");
  verify->add_option("--seed", seed, "Root seed");
  verify->add_option("--threads", threads, "Worker threads (0 = hardware)");

  std::string theorem, params, bounds_out;
  std::int64_t k_max = 0;
  bool show_info = false;
  auto *bounds = app.add_subcommand("bounds", "Theoretical bound curves");
  bounds->require_subcommand(1);
  auto *compute = bounds->add_subcommand("compute", "Emit a bound curve as CSV");
  compute->add_option("--theorem", theorem, "1, c1, c2, c3, 2, 3, 4 or 5")->required();
  compute->add_option("--params", params, "INI file with a [params] section")->required()->check(CLI::ExistingFile);
  compute->add_option("--k-max", k_max, "Last iteration")->required()->check(CLI::NonNegativeNumber);
  compute->add_option("--output", bounds_out, "Write the CSV here instead of stdout");
  compute->add_flag("--info", show_info, "Print derived constants to stderr");

  std::string env_spec, env_x;
  std::optional<double> env_tol;
  auto *envelope = app.add_subcommand("envelope", "Generalized Moreau envelope");
  envelope->require_subcommand(1);
  auto *eval = envelope->add_subcommand("eval", "Evaluate M at a point");
  eval->add_option("--spec", env_spec, "INI file with an [envelope] section")->required()->check(CLI::ExistingFile);
  eval->add_option("--x", env_x, "Comma-separated point")->required();
  eval->add_option("--tol", env_tol, "Solver tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run)
      return cmd_run(run_spec, run_out);
    if (*verify)
      return cmd_verify(suite, quick, json, seed, threads);
    if (*compute)
      return cmd_bounds(theorem, params, k_max, bounds_out, show_info);
    if (*eval)
      return cmd_envelope(env_spec, env_x, env_tol);
  } catch (const csa::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
