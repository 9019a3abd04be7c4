#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plr/plr.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInvalid = 2, kIo = 3, kSolverAbort = 4 };

plr::ExperimentConfig load_config(const std::string& path, const std::string& out,
                                  std::optional<std::uint64_t> seed, int threads) {
  auto kv = plr::KeyValueConfig::load(path);
  if (!out.empty()) kv.set("out", out);
  if (seed) kv.set("seed", std::to_string(*seed));
  if (threads > 0) kv.set("threads", std::to_string(threads));
  auto cfg = plr::ExperimentConfig::from(kv);
  cfg.base_dir = std::filesystem::path(path).parent_path();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson low-rank matrix recovery and completion"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (key=value)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides 'out')");
    sub->add_option("--seed", seed, "base seed (overrides 'seed')");
    sub->add_option("--threads", threads, "worker threads (fallback: PLR_THREADS)");
  };
  auto* synth = app.add_subcommand("synth", "write ground truth and observations");
  auto* solve = app.add_subcommand("solve", "run one solve and write metrics");
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter over trials");
  add_common(synth);
  add_common(solve);
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const auto cfg = load_config(config, out, seed, threads);
    if (synth->parsed()) {
      plr::cmd_synth(cfg);
    } else if (solve->parsed()) {
      const auto r = plr::cmd_solve(cfg);
      std::cout << r.metrics.format();
    } else {
      for (const auto& row : plr::cmd_sweep(cfg)) {
        std::cout << plr::detail::format_double(row.value) << " "
                  << plr::detail::format_double(row.mean) << " +- "
                  << plr::detail::format_double(row.stddev) << "\n";
      }
    }
  } catch (const plr::SolverAborted& e) {
    std::cerr << "plr: solver aborted: " << e.what() << "\n";
    return kSolverAbort;
  } catch (const plr::ParseError& e) {
    std::cerr << "plr: " << e.what() << "\n";
    return kInvalid;
  } catch (const plr::ParameterError& e) {
    std::cerr << "plr: " << e.what() << "\n";
    return kInvalid;
  } catch (const plr::DimensionError& e) {
    std::cerr << "plr: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "plr: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
