#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavityduo/error.hpp"
#include "cavityduo/harness/config.hpp"
#include "cavityduo/harness/run.hpp"

namespace {

constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two coupled dissipative modes: closed-form propagator and Lindblad oracle"};
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;

  app.add_option("scenario", scenario, "Scenario to run")
      ->required()
      ->check(CLI::IsMember(
          {"evolve-coherent", "evolve-cat", "sweep", "verify", "coefficients", "algebra-check"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--jobs", jobs, "Parallel sweep points")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--override", overrides, "key=value applied to the config before validation")
      ->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : kUsageError;
  }

  using namespace cavityduo;
  try {
    std::vector<std::string> all = {"scenario=\"" + scenario + "\""};
    all.insert(all.end(), overrides.begin(), overrides.end());
    if (*seed_opt) all.push_back("seed=" + std::to_string(seed));
    harness::RunConfig config = harness::parse_config(config_path, all);
    if (!out_dir.empty()) config.output = out_dir;
    return harness::run(config, {jobs}, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
