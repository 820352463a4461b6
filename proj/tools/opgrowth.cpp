// opgrowth: command-line front end for the operator-growth experiments.
//
//   opgrowth run <spec.json>   run a named experiment, write artifacts
//   opgrowth list              list available experiment names
//   opgrowth check <report.json>  re-evaluate a saved report's checks

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "opgrowth/experiments.hpp"
#include "opgrowth/io.hpp"

namespace {

int resolve_threads(int cli_threads) {
  // The environment variable wins over the flag so batch schedulers can
  // pin the whole job without editing specs.
  if (const char* env = std::getenv("OPGROWTH_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<int>(v);
    std::cerr << "warning: ignoring malformed OPGROWTH_THREADS=\"" << env
              << "\"\n";
  }
  return cli_threads > 0 ? cli_threads : 1;
}

int cmd_run(const std::string& spec_path, int64_t seed_override,
            const std::string& out_override, int threads) {
  opgrowth::ExperimentSpec spec = opgrowth::load_experiment_spec(spec_path);
  if (seed_override >= 0) spec.seed = static_cast<uint64_t>(seed_override);
  if (!out_override.empty()) spec.output_dir = out_override;
  spec.overrides["threads"] = resolve_threads(threads);

  opgrowth::ExperimentReport rep = opgrowth::run_experiment(spec);
  for (const auto& c : rep.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
              << "  value=" << c.value << "  threshold=" << c.threshold;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  if (!spec.output_dir.empty())
    opgrowth::write_file(spec.output_dir + "/report.json",
                         rep.to_json().dump(2));
  std::cout << (rep.all_pass() ? "all checks passed" : "checks FAILED")
            << " [" << rep.name << ", seed " << rep.seed << "]\n";
  return rep.all_pass() ? 0 : 1;
}

int cmd_list() {
  for (const auto& name : opgrowth::experiment_names()) std::cout << name << "\n";
  return 0;
}

int cmd_check(const std::string& report_path) {
  nlohmann::json j =
      nlohmann::json::parse(opgrowth::read_file(report_path));
  if (!j.contains("checks") || !j["checks"].is_array() || j["checks"].empty()) {
    std::cerr << "error: report has no checks\n";
    return 2;
  }
  bool all = true;
  for (const auto& c : j["checks"]) {
    bool pass = c.at("pass").get<bool>();
    all = all && pass;
    std::cout << (pass ? "PASS " : "FAIL ")
              << c.at("name").get<std::string>() << "\n";
  }
  std::cout << (all ? "all checks passed" : "checks FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator growth in noisy quantum circuits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", opgrowth::kVersion);

  std::string spec_path, report_path, out_override;
  int64_t seed_override = -1;
  int threads = 0;

  auto* run = app.add_subcommand("run", "run a named experiment from a spec");
  run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
  run->add_option("--seed", seed_override, "override the spec's seed");
  run->add_option("--threads", threads,
                  "worker threads (OPGROWTH_THREADS overrides)");
  run->add_option("--out", out_override, "override the output directory");

  auto* list = app.add_subcommand("list", "list experiment names");

  auto* chk = app.add_subcommand("check", "re-evaluate a saved report");
  chk->add_option("report", report_path, "report.json to check")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(spec_path, seed_override, out_override,
                                      threads);
    if (list->parsed()) return cmd_list();
    return cmd_check(report_path);
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
}
