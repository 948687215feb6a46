// rans-lab: channel RANS runs, e_d sweeps and the validation suite.
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>

#include "ranslab/channel.hpp"
#include "ranslab/error.hpp"

namespace {

int cmd_run(ranslab::RunConfig cfg, const std::string& output_dir) {
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  auto r = ranslab::run_channel(cfg);
  std::printf("%s e_d=%g converged=%s iterations=%d u_tau=%.5f output=%s\n", r.model.c_str(), r.e_d,
              r.coupling.converged ? "yes" : "no", r.coupling.iterations, r.u_tau_reaction, cfg.output_dir.c_str());
  return r.coupling.finite ? 0 : 2;
}

int cmd_sweep(ranslab::RunConfig cfg, const std::string& output_dir) {
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  int failed = 0;
  ranslab::run_sweep(cfg, true, [&](const ranslab::RunResult& r) {
    if (!r.error.empty()) ++failed;
    std::printf("%-14s e_d=%-5g converged=%-3s iterations=%-3d %s\n", r.model.c_str(), r.e_d,
                r.coupling.converged ? "yes" : "no", r.coupling.iterations, r.error.c_str());
    std::fflush(stdout);
  });
  return failed ? 2 : 0;
}

int cmd_validate() {
  bool ok = true;
  for (const auto& c : ranslab::run_validation()) {
    std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady RANS channel solver with low-Reynolds k-epsilon models"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output_dir, log_level = "info", config;
  app.add_option("--output-dir", output_dir, "Override the output directory of the config");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  auto* run = app.add_subcommand("run", "Run one channel case");
  run->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "Run every model for e_d in {0, 0.25, 0.5, 0.75, 1}");
  sweep->add_option("config", config, "JSON base configuration")->required()->check(CLI::ExistingFile);
  auto* validate = app.add_subcommand("validate", "Run the manufactured-solution suite");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*validate) return cmd_validate();
    auto cfg = ranslab::load_run_config(config);
    if (*run) return cmd_run(cfg, output_dir);
    return cmd_sweep(cfg, output_dir);
  } catch (const ranslab::ConfigurationError& e) {
    spdlog::error("configuration: {}", e.what());
    return 64;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
