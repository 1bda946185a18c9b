// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cstdint>
#include <utility>
#include <vector>

#include "mabeam/metrics.hpp"
#include "mabeam/scenario.hpp"

namespace mabeam {

// Per-iteration diagnostics of the alternating solvers. sum_rate and
// objective are recorded once per full update sweep; combiner_reg and
// precoder_reg hold the ridge levels used by that sweep's receive- and
// transmit-side updates.
struct SolverTrace {
  arma::vec sum_rate;       // iterations
  arma::vec objective;      // iterations
  arma::mat combiner_reg;   // iterations x users
  arma::vec precoder_reg;   // iterations
  arma::uword best_iteration = 0;  // 0-based index into sum_rate
  double best_sum_rate = 0.0;
};

// Random complex Gaussian precoder scaled to the power budget.
arma::cx_mat init_precoder(const Scenario& scenario, std::uint64_t seed);

// Linear MMSE receive filter of one user for the current precoder, under the
// power-normalized noise model (noise scaled by trace(F F^H) / power).
arma::cx_mat update_combiner(const ChannelSet& channels,
                             const arma::cx_mat& precoder, int user,
                             double noise_power, double power);

// MSE-weight update: inverse of the error covariance implied by the current
// precoder and combiner. Returned as computed, without symmetrization.
arma::cx_mat update_weight(const ChannelSet& channels,
                           const arma::cx_mat& precoder,
                           const arma::cx_mat& combiner, int user);

// Joint precoder update for all users given combiners and weights; the ridge
// level is derived from the per-user noise-to-power ratios and combiner
// energies, which keeps the unnormalized solution aligned with the budget.
arma::cx_mat update_precoder(const ChannelSet& channels,
                             const std::vector<arma::cx_mat>& combiner,
                             const std::vector<arma::cx_mat>& weight,
                             const Scenario& scenario);

// Scales the precoder so trace(F F^H) equals the power budget exactly.
arma::cx_mat normalize_precoder(const arma::cx_mat& precoder, double power);

// Ridge level of the receive filter of one user (noise_power / power scaled
// by the precoder energy).
double combiner_ridge(const arma::cx_mat& precoder, double noise_power,
                      double power);

// Ridge level of the joint precoder update.
double precoder_ridge(const std::vector<arma::cx_mat>& combiner,
                      const std::vector<arma::cx_mat>& weight,
                      const Scenario& scenario);

// Alternating weighted-MMSE solver for fixed arrays: cycles combiner, weight
// and precoder updates for the given number of sweeps, then normalizes the
// precoder to the power budget. The trace records rate and objective after
// each sweep; form only affects the reported rates, not the updates.
std::pair<BeamformingState, SolverTrace> run_wmmse(
    const Scenario& scenario, const ChannelSet& channels, int iterations,
    std::uint64_t seed, InterferenceForm form = InterferenceForm::own_channel);

// Non-iterative baseline: per-user eigenbeam combiners, one joint precoder
// update with identity weights, then MMSE combiners for the result.
BeamformingState mmse_baseline(const Scenario& scenario,
                               const ChannelSet& channels);

}  // namespace mabeam
