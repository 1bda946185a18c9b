// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: Monte-Carlo rate experiments for fixed and
// flexible antenna arrays, solver micro-benchmarks and a quick self test.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mabeam/harness.hpp"
#include "mabeam/selftest.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  std::string out;
  std::string somp;
  int threads = 0;
  std::string axis = "snr";
  std::vector<int> bench_rows{32, 48, 64};
  std::vector<int> bench_atoms{256, 512, 1024};
  std::vector<int> bench_columns{8, 8, 16};
  std::vector<int> bench_selected{16, 24, 64};
  double bench_ridge = 1.0;
  int bench_repeats = 3;
};

mabeam::ExperimentConfig load_config(const CliOptions& opt) {
  mabeam::ExperimentConfig config;
  if (!opt.config_path.empty())
    config = mabeam::config_from_json(opt.config_path);
  if (opt.seed_set) config.base_seed = opt.seed;
  if (opt.trials > 0) config.trials = opt.trials;
  if (!opt.out.empty()) config.out = opt.out;
  if (!opt.somp.empty()) {
    if (opt.somp == "naive")
      config.somp = mabeam::SompMode::naive;
    else if (opt.somp == "fast")
      config.somp = mabeam::SompMode::fast;
    else
      throw mabeam::ConfigError("--somp must be 'naive' or 'fast'");
  }
  if (opt.threads > 0) config.threads = opt.threads;
  return config;
}

int run_single(const CliOptions& opt) {
  const mabeam::ExperimentConfig config = load_config(opt);
  // Fail on unwritable outputs before burning compute, like sweep does.
  for (const std::string& p :
       {config.out, mabeam::summary_path(config.out)}) {
    std::ofstream probe(p, std::ios::trunc);
    if (!probe) throw mabeam::IoError("cannot open '" + p + "' for writing");
  }
  const auto records = mabeam::run_experiment(config);
  mabeam::write_records_csv(records, config.out);
  mabeam::write_summary_csv(records, mabeam::summary_path(config.out));
  std::cout << records.size() << " records -> " << config.out << " and "
            << mabeam::summary_path(config.out) << "\n";
  return 0;
}

int run_sweep(const CliOptions& opt) {
  const mabeam::ExperimentConfig config = load_config(opt);
  const auto axis = mabeam::sweep_axis_from_name(opt.axis);
  const auto records = mabeam::sweep(config, axis);
  std::cout << records.size() << " records -> " << config.out << " and "
            << mabeam::summary_path(config.out) << "\n";
  return 0;
}

int run_bench(const CliOptions& opt) {
  const std::size_t n = opt.bench_rows.size();
  if (opt.bench_atoms.size() != n || opt.bench_columns.size() != n ||
      opt.bench_selected.size() != n)
    throw mabeam::ConfigError(
        "bench: --rows, --atoms, --columns and --selected must have the same"
        " number of entries");
  std::vector<mabeam::BenchSize> sizes;
  for (std::size_t i = 0; i < n; ++i)
    sizes.push_back({opt.bench_rows[i], opt.bench_atoms[i],
                     opt.bench_columns[i], opt.bench_selected[i]});
  const std::uint64_t seed = opt.seed_set ? opt.seed : 1;
  const auto results =
      mabeam::bench_somp(sizes, opt.bench_ridge, seed, opt.bench_repeats);
  const std::string out = opt.out.empty() ? "bench.csv" : opt.out;
  mabeam::write_bench_csv(results, out);
  for (const auto& r : results) {
    std::cout << "rows=" << r.size.rows << " atoms=" << r.size.atoms
              << " columns=" << r.size.columns
              << " selected=" << r.size.selected << "  naive " << r.naive_ms
              << " ms, fast " << r.fast_ms << " ms\n";
  }
  std::cout << results.size() << " results -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flexible-antenna downlink beamforming experiments"};
  app.require_subcommand(1);
  // Let the shared overrides be written after the subcommand name too,
  // e.g. `mabeam run --trials 50`.
  app.fallthrough();

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON experiment config");
  app.add_option("--seed", opt.seed, "base seed override")
      ->each([&](const std::string&) { opt.seed_set = true; });
  app.add_option("--trials", opt.trials, "trial count override");
  app.add_option("--out", opt.out, "output CSV path override");
  app.add_option("--somp", opt.somp, "sparse solver variant: naive or fast");
  app.add_option("--threads", opt.threads, "worker thread count override");

  CLI::App* cmd_run = app.add_subcommand("run", "run one experiment config");
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run a sweep along one axis");
  cmd_sweep
      ->add_option("--axis", opt.axis,
                   "swept axis: snr, ur, ut, paths or iterations")
      ->required();
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "time the sparse solver variants");
  cmd_bench->add_option("--rows", opt.bench_rows, "dictionary rows per size");
  cmd_bench->add_option("--atoms", opt.bench_atoms,
                        "dictionary columns per size");
  cmd_bench->add_option("--columns", opt.bench_columns,
                        "measurement columns per size");
  cmd_bench->add_option("--selected", opt.bench_selected,
                        "atoms selected per size");
  cmd_bench->add_option("--ridge", opt.bench_ridge, "ridge level");
  cmd_bench->add_option("--repeats", opt.bench_repeats,
                        "instances per size");
  CLI::App* cmd_selftest =
      app.add_subcommand("selftest", "quick built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cmd_run->parsed()) return run_single(opt);
    if (cmd_sweep->parsed()) return run_sweep(opt);
    if (cmd_bench->parsed()) return run_bench(opt);
    if (cmd_selftest->parsed())
      return mabeam::selftest(std::cout, opt.seed_set ? opt.seed : 1) ? 0 : 2;
  } catch (const mabeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mabeam::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const mabeam::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
