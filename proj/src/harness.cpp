// SPDX-License-Identifier: Apache-2.0

#include "mabeam/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "mabeam/rng.hpp"
#include "mabeam/wmmse.hpp"

namespace mabeam {

namespace {

using steady = std::chrono::steady_clock;

double ms_between(steady::time_point a, steady::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_experiment(const ExperimentConfig& c) {
  if (c.methods.empty())
    throw ConfigError("experiment: methods list is empty");
  if (c.trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (c.iterations < 1)
    throw ConfigError("experiment: iterations must be >= 1");
  if (c.threads < 1) throw ConfigError("experiment: threads must be >= 1");
  if (c.snr_db.empty()) throw ConfigError("experiment: snr_db list is empty");
  if (c.paths.empty()) throw ConfigError("experiment: paths list is empty");
  if (c.regions.empty())
    throw ConfigError("experiment: regions list is empty");
  for (double s : c.snr_db)
    if (!std::isfinite(s))
      throw ConfigError("experiment: snr_db entries must be finite");

  // Dimension checks are delegated to the scenario sampler.
  ScenarioConfig sc;
  sc.users = c.users;
  sc.tx_antennas = c.tx_antennas;
  sc.rx_antennas = c.rx_antennas;
  sc.streams = c.streams;
  sc.paths = c.paths.front();
  sc.power = 1.0;
  sc.noise_power = c.noise_power;
  sc.priority = c.priority;
  (void)sample_scenario(sc, c.base_seed);
}

struct Cell {
  std::uint64_t trial = 0;
  double snr_db = 0.0;
  int paths = 0;
  RegionPair region;
};

std::vector<ExperimentRecord> run_cell(const ExperimentConfig& config,
                                       const Cell& cell) {
  std::vector<ExperimentRecord> out;
  const std::uint64_t trial_seed = config.base_seed ^ cell.trial;
  const std::uint64_t solver_seed = splitmix64(trial_seed);

  ScenarioConfig sc;
  sc.users = config.users;
  sc.tx_antennas = config.tx_antennas;
  sc.rx_antennas = config.rx_antennas;
  sc.streams = config.streams;
  sc.paths = cell.paths;
  sc.power = std::pow(10.0, cell.snr_db / 10.0);
  sc.noise_power = config.noise_power;
  sc.priority = config.priority;
  sc.tx_region = cell.region.tx;
  sc.rx_region = cell.region.rx;
  const Scenario scenario = sample_scenario(sc, trial_seed);

  ExperimentRecord base;
  base.trial = cell.trial;
  base.snr_db = cell.snr_db;
  base.paths = cell.paths;
  base.tx_region = cell.region.tx;
  base.rx_region = cell.region.rx;
  base.seed = trial_seed;

  // Fixed-array methods share the reference layout.
  ChannelSet fixed_channels;
  bool have_fixed = false;
  auto ensure_fixed = [&] {
    if (have_fixed) return;
    std::vector<AntennaPositions> rx(
        config.users, default_fixed_positions(config.rx_antennas));
    fixed_channels = assemble_channel(
        scenario, default_fixed_positions(config.tx_antennas), rx);
    have_fixed = true;
  };

  for (Method method : config.methods) {
    ExperimentRecord rec = base;
    rec.method = method;
    try {
      const auto t0 = steady::now();
      switch (method) {
        case Method::mmse: {
          ensure_fixed();
          const BeamformingState state = mmse_baseline(scenario, fixed_channels);
          rec.wall_ms =
              config.record_timing ? ms_between(t0, steady::now()) : 0.0;
          rec.iteration = 1;
          rec.sum_rate = sum_rate(fixed_channels, state.precoder, scenario,
                                  config.interference);
          out.push_back(rec);
          break;
        }
        case Method::wmmse: {
          ensure_fixed();
          const auto [state, trace] =
              run_wmmse(scenario, fixed_channels, config.iterations,
                        solver_seed, config.interference);
          const double wall =
              config.record_timing ? ms_between(t0, steady::now()) : 0.0;
          for (int it = 0; it < config.iterations; ++it) {
            rec.iteration = it + 1;
            rec.sum_rate = trace.sum_rate(it);
            rec.wall_ms = wall;
            out.push_back(rec);
          }
          break;
        }
        case Method::fwmmse: {
          FwmmseConfig fc;
          fc.iterations = config.iterations;
          fc.somp = config.somp;
          fc.tx_region = cell.region.tx;
          fc.rx_region = cell.region.rx;
          fc.interference = config.interference;
          const auto [state, trace] = run_fwmmse(scenario, fc, solver_seed);
          const double wall =
              config.record_timing ? ms_between(t0, steady::now()) : 0.0;
          for (int it = 0; it < config.iterations; ++it) {
            rec.iteration = it + 1;
            rec.sum_rate = trace.sum_rate(it);
            rec.wall_ms = wall;
            out.push_back(rec);
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      ExperimentRecord failed = base;
      failed.method = method;
      failed.iteration = 0;
      failed.sum_rate = std::numeric_limits<double>::quiet_NaN();
      failed.wall_ms = 0.0;
      failed.failed = true;
      failed.error = e.what();
      out.push_back(failed);
    }
  }
  return out;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::mmse: return "mmse";
    case Method::wmmse: return "wmmse";
    case Method::fwmmse: return "fwmmse";
  }
  throw ConfigError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "mmse") return Method::mmse;
  if (name == "wmmse") return Method::wmmse;
  if (name == "fwmmse") return Method::fwmmse;
  throw ConfigError("unknown method '" + name +
                    "' (expected mmse, wmmse or fwmmse)");
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  validate_experiment(config);

  std::vector<Cell> cells;
  for (int t = 0; t < config.trials; ++t)
    for (double snr : config.snr_db)
      for (int paths : config.paths)
        for (const RegionPair& region : config.regions)
          cells.push_back({static_cast<std::uint64_t>(t), snr, paths, region});

  std::vector<std::vector<ExperimentRecord>> slots(cells.size());
  const int workers =
      std::min<int>(config.threads, static_cast<int>(cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      slots[i] = run_cell(config, cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            slots[i] = run_cell(config, cells[i]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<ExperimentRecord> records;
  for (auto& slot : slots)
    records.insert(records.end(), slot.begin(), slot.end());
  return records;
}

void write_records_csv(const std::vector<ExperimentRecord>& records,
                       const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "trial,method,snr_db,L,Ut,Ur,iteration,sum_rate,wall_ms,seed\n";
  for (const auto& r : records) {
    f << r.trial << ',' << method_name(r.method) << ',' << fmt(r.snr_db)
      << ',' << r.paths << ',' << fmt(r.tx_region) << ',' << fmt(r.rx_region)
      << ',' << r.iteration << ',' << fmt(r.sum_rate) << ','
      << fmt(r.wall_ms) << ',' << r.seed << '\n';
  }
  if (!f.good()) throw IoError("short write to '" + path + "'");
}

std::string summary_path(const std::string& raw_path) {
  const std::size_t dot = raw_path.find_last_of('.');
  const std::size_t slash = raw_path.find_last_of("/\\");
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return raw_path + "_summary";
  return raw_path.substr(0, dot) + "_summary" + raw_path.substr(dot);
}

void write_summary_csv(const std::vector<ExperimentRecord>& records,
                       const std::string& path) {
  using Key = std::tuple<std::string, double, int, double, double, int>;
  struct Agg {
    std::vector<double> values;
    int failures = 0;
  };
  std::map<Key, Agg> groups;
  for (const auto& r : records) {
    Agg& a = groups[{method_name(r.method), r.snr_db, r.paths, r.tx_region,
                     r.rx_region, r.iteration}];
    if (r.failed)
      ++a.failures;
    else
      a.values.push_back(r.sum_rate);
  }

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "method,snr_db,L,Ut,Ur,iteration,count,failures,mean_sum_rate,"
       "stderr_sum_rate\n";
  for (const auto& [key, agg] : groups) {
    const auto& [method, snr, paths, ut, ur, iteration] = key;
    const std::size_t n = agg.values.size();
    double mean = 0.0, se = 0.0;
    if (n > 0) {
      for (double v : agg.values) mean += v;
      mean /= static_cast<double>(n);
      if (n > 1) {
        double ss = 0.0;
        for (double v : agg.values) ss += (v - mean) * (v - mean);
        se = std::sqrt(ss / static_cast<double>(n - 1) /
                       static_cast<double>(n));
      }
    }
    f << method << ',' << fmt(snr) << ',' << paths << ',' << fmt(ut) << ','
      << fmt(ur) << ',' << iteration << ',' << n << ',' << agg.failures << ','
      << fmt(mean) << ',' << fmt(se) << '\n';
  }
  if (!f.good()) throw IoError("short write to '" + path + "'");
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "snr") return SweepAxis::snr;
  if (name == "ur") return SweepAxis::rx_region;
  if (name == "ut") return SweepAxis::tx_region;
  if (name == "paths") return SweepAxis::paths;
  if (name == "iterations") return SweepAxis::iterations;
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected snr, ur, ut, paths or iterations)");
}

std::vector<ExperimentRecord> sweep(const ExperimentConfig& config,
                                    SweepAxis axis) {
  switch (axis) {
    case SweepAxis::snr:
      if (config.snr_db.size() < 2)
        throw ConfigError("sweep over snr needs at least 2 snr_db points");
      break;
    case SweepAxis::paths:
      if (config.paths.size() < 2)
        throw ConfigError("sweep over paths needs at least 2 path counts");
      break;
    case SweepAxis::rx_region:
    case SweepAxis::tx_region:
      if (config.regions.size() < 2)
        throw ConfigError("sweep over a region side needs at least 2 region"
                          " pairs");
      break;
    case SweepAxis::iterations:
      if (config.iterations < 2)
        throw ConfigError("sweep over iterations needs iterations >= 2");
      break;
  }

  // Fail on unwritable outputs before burning compute.
  const std::string sum_path = summary_path(config.out);
  for (const std::string& p : {config.out, sum_path}) {
    std::ofstream probe(p, std::ios::trunc);
    if (!probe) throw IoError("cannot open '" + p + "' for writing");
  }

  const std::vector<ExperimentRecord> records = run_experiment(config);
  write_records_csv(records, config.out);
  write_summary_csv(records, sum_path);
  return records;
}

std::vector<BenchResult> bench_somp(const std::vector<BenchSize>& sizes,
                                    double ridge, std::uint64_t base_seed,
                                    int repeats) {
  if (sizes.empty()) throw ConfigError("bench: size list is empty");
  if (repeats < 1) throw ConfigError("bench: repeats must be >= 1");
  std::vector<BenchResult> results;
  std::uint64_t counter = base_seed;
  for (const BenchSize& size : sizes) {
    for (int rep = 0; rep < repeats; ++rep) {
      counter = splitmix64(counter);
      Rng rng(counter);
      const arma::cx_mat dict = random_complex(rng, size.rows, size.atoms);
      const arma::cx_mat target = random_complex(rng, size.rows, size.columns);

      BenchResult r;
      r.size = size;
      r.ridge = ridge;
      r.seed = counter;

      const auto t0 = steady::now();
      const SparseSolution naive = rls_somp(target, dict, ridge, size.selected);
      const auto t1 = steady::now();
      FastSompWorkspace ws;
      const SparseSolution fast =
          rls_somp_fast(target, dict, ridge, size.selected, ws);
      const auto t2 = steady::now();

      r.naive_ms = ms_between(t0, t1);
      r.fast_ms = ms_between(t1, t2);
      r.naive_ms_per_step = r.naive_ms / size.selected;
      r.fast_ms_per_step = r.fast_ms / size.selected;
      r.dense_fallbacks = ws.dense_fallbacks;
      r.supports_match = arma::all(naive.support == fast.support);
      r.max_coeff_diff =
          arma::abs(naive.coeffs - fast.coeffs).max();
      if (!r.supports_match || !(r.max_coeff_diff <= 1e-8))
        throw SolverError("bench: solvers disagree on seed " +
                          std::to_string(r.seed) + " (max coefficient gap " +
                          fmt(r.max_coeff_diff) + ")");
      results.push_back(r);
    }
  }
  return results;
}

void write_bench_csv(const std::vector<BenchResult>& results,
                     const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "rows,atoms,columns,selected,ridge,seed,naive_ms,fast_ms,"
       "naive_ms_per_step,fast_ms_per_step,dense_fallbacks,max_coeff_diff\n";
  for (const auto& r : results) {
    f << r.size.rows << ',' << r.size.atoms << ',' << r.size.columns << ','
      << r.size.selected << ',' << fmt(r.ridge) << ',' << r.seed << ','
      << fmt(r.naive_ms) << ',' << fmt(r.fast_ms) << ','
      << fmt(r.naive_ms_per_step) << ',' << fmt(r.fast_ms_per_step) << ','
      << r.dense_fallbacks << ',' << fmt(r.max_coeff_diff) << '\n';
  }
  if (!f.good()) throw IoError("short write to '" + path + "'");
}

ExperimentConfig config_from_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config '" + path + "': top level must be an object");

  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "methods") {
        c.methods.clear();
        for (const auto& m : value)
          c.methods.push_back(method_from_name(m.get<std::string>()));
      } else if (key == "users") {
        c.users = value.get<int>();
      } else if (key == "tx_antennas") {
        c.tx_antennas = value.get<int>();
      } else if (key == "rx_antennas") {
        c.rx_antennas = value.get<int>();
      } else if (key == "streams") {
        c.streams = value.get<int>();
      } else if (key == "snr_db") {
        c.snr_db = value.get<std::vector<double>>();
      } else if (key == "paths") {
        c.paths = value.get<std::vector<int>>();
      } else if (key == "regions") {
        c.regions.clear();
        for (const auto& pair : value) {
          if (!pair.is_array() || pair.size() != 2)
            throw ConfigError("config: regions entries must be [tx, rx]"
                              " pairs");
          c.regions.push_back(
              {pair[0].get<double>(), pair[1].get<double>()});
        }
      } else if (key == "iterations") {
        c.iterations = value.get<int>();
      } else if (key == "trials") {
        c.trials = value.get<int>();
      } else if (key == "base_seed") {
        c.base_seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "somp") {
        const std::string s = value.get<std::string>();
        if (s == "naive")
          c.somp = SompMode::naive;
        else if (s == "fast")
          c.somp = SompMode::fast;
        else
          throw ConfigError("config: somp must be 'naive' or 'fast'");
      } else if (key == "threads") {
        c.threads = value.get<int>();
      } else if (key == "noise_power") {
        c.noise_power = arma::vec(value.get<std::vector<double>>());
      } else if (key == "priority") {
        c.priority = arma::vec(value.get<std::vector<double>>());
      } else if (key == "record_timing") {
        c.record_timing = value.get<bool>();
      } else if (key == "interference") {
        const std::string s = value.get<std::string>();
        if (s == "own")
          c.interference = InterferenceForm::own_channel;
        else if (s == "cross")
          c.interference = InterferenceForm::cross_channel;
        else
          throw ConfigError("config: interference must be 'own' or 'cross'");
      } else {
        throw ConfigError("config '" + path + "': unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return c;
}

}  // namespace mabeam
