// Command-line front end: simulate | geometry | tabular | audit, driven by a
// key = value config file. Exit codes: 0 ok, 2 config error, 3 data error,
// 4 fixture check failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "frm/config.hpp"
#include "frm/errors.hpp"
#include "frm/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "experiment config file")->required();
  sub->add_option("--out", flags.out_dir, "output directory (overrides config)");
  sub->add_option("--seed", flags.seed, "master seed (overrides config)");
  sub->add_option("--workers", flags.workers, "parallel workers (overrides config)");
}

int run_mode(const CommonFlags& flags, frm::Mode expected) {
  frm::ExperimentConfig cfg = frm::ExperimentConfig::parse_file(flags.config_path);
  if (cfg.mode != expected)
    throw frm::ConfigError("config file mode does not match the subcommand");
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.workers) {
    if (*flags.workers < 1) throw frm::ConfigError("--workers must be >= 1");
    cfg.workers = *flags.workers;
  }
  frm::run(cfg, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair risk minimization under subpopulation shift"};
  app.require_subcommand(1);

  CommonFlags flags;
  frm::Mode mode = frm::Mode::Simulate;
  auto* simulate = app.add_subcommand("simulate", "synthetic Gaussian sweep over p_minor");
  auto* geometry = app.add_subcommand("geometry", "fixture checks and the harm-threshold sweep");
  auto* tabular = app.add_subcommand("tabular", "train/test protocol on a tabular CSV dataset");
  auto* audit = app.add_subcommand("audit", "recoverability report for profile/marginal files");
  for (auto* sub : {simulate, geometry, tabular, audit}) add_common(sub, flags);
  simulate->callback([&] { mode = frm::Mode::Simulate; });
  geometry->callback([&] { mode = frm::Mode::Geometry; });
  tabular->callback([&] { mode = frm::Mode::Tabular; });
  audit->callback([&] { mode = frm::Mode::Audit; });

  CLI11_PARSE(app, argc, argv);

  try {
    return run_mode(flags, mode);
  } catch (const frm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const frm::CheckFailure& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
