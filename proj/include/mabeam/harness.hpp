// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mabeam/fwmmse.hpp"
#include "mabeam/metrics.hpp"
#include "mabeam/scenario.hpp"

namespace mabeam {

enum class Method { mmse, wmmse, fwmmse };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Transmit/receive placement region sides, wavelengths.
struct RegionPair {
  double tx = 0.0;
  double rx = 0.0;
};

// One Monte-Carlo campaign: the cartesian product of trials, SNR points,
// path counts and region pairs, run for every listed method. All methods of
// a given (trial, snr, paths) cell share one scenario draw and, where they
// are iterative, one initial precoder, so per-trial differences are paired.
struct ExperimentConfig {
  std::vector<Method> methods{Method::wmmse, Method::fwmmse};
  int users = 4;
  int tx_antennas = 16;
  int rx_antennas = 4;
  int streams = 4;
  std::vector<double> snr_db{10.0};
  std::vector<int> paths{10};
  std::vector<RegionPair> regions{{6.0, 3.0}};
  int iterations = 25;
  int trials = 100;
  std::uint64_t base_seed = 1;
  std::string out = "results.csv";
  SompMode somp = SompMode::fast;
  int threads = 1;
  arma::vec noise_power;  // empty means all ones
  arma::vec priority;     // empty means all ones
  // When false, wall_ms is written as 0 so repeated runs of the same config
  // produce byte-identical CSV files.
  bool record_timing = true;
  InterferenceForm interference = InterferenceForm::own_channel;
};

// One CSV row: the sum rate of one method after a given iteration of one
// trial. Iterative methods emit one record per iteration; the closed-form
// baseline emits a single record with iteration 1. A failed solve emits a
// single record with failed set and the rate NaN.
struct ExperimentRecord {
  std::uint64_t trial = 0;
  Method method = Method::wmmse;
  double snr_db = 0.0;
  int paths = 0;
  double tx_region = 0.0;
  double rx_region = 0.0;
  int iteration = 0;
  double sum_rate = 0.0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

// Raw per-record CSV with the fixed header
// trial,method,snr_db,L,Ut,Ur,iteration,sum_rate,wall_ms,seed.
void write_records_csv(const std::vector<ExperimentRecord>& records,
                       const std::string& path);

// Mean and standard error of sum_rate grouped by
// (method, snr_db, L, Ut, Ur, iteration); failed records are excluded and
// counted separately.
void write_summary_csv(const std::vector<ExperimentRecord>& records,
                       const std::string& path);

// Path of the summary file written next to a raw file ("x.csv" ->
// "x_summary.csv").
std::string summary_path(const std::string& raw_path);

enum class SweepAxis { snr, rx_region, tx_region, paths, iterations };

SweepAxis sweep_axis_from_name(const std::string& name);

// Validates that the swept axis has at least two points, checks both output
// paths are writable before any computation starts, then runs the campaign
// and writes raw and summary CSV files.
std::vector<ExperimentRecord> sweep(const ExperimentConfig& config,
                                    SweepAxis axis);

// One timing instance of the sparse solvers: rows x atoms dictionary,
// measurement columns, selected atoms per solve.
struct BenchSize {
  int rows = 32;
  int atoms = 256;
  int columns = 8;
  int selected = 16;
};

struct BenchResult {
  BenchSize size;
  double ridge = 1.0;
  std::uint64_t seed = 0;
  double naive_ms = 0.0;
  double fast_ms = 0.0;
  double naive_ms_per_step = 0.0;
  double fast_ms_per_step = 0.0;
  int dense_fallbacks = 0;
  double max_coeff_diff = 0.0;
  bool supports_match = false;
};

// Times both sparse solvers on random instances and cross-checks that they
// agree on supports and coefficients. Disagreement beyond 1e-8 max-abs is a
// SolverError naming the offending seed.
std::vector<BenchResult> bench_somp(const std::vector<BenchSize>& sizes,
                                    double ridge, std::uint64_t base_seed,
                                    int repeats = 3);

void write_bench_csv(const std::vector<BenchResult>& results,
                     const std::string& path);

// Loads an ExperimentConfig from a JSON file. Unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& path);

}  // namespace mabeam
