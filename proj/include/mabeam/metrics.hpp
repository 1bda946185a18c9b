// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <vector>

#include "mabeam/scenario.hpp"

namespace mabeam {

// Which channel enters the inter-user interference term of the rate model.
// own_channel charges interference through the rated user's channel, which is
// what a linear receiver at that user actually sees and is the form the
// solvers optimize. cross_channel instead uses each interferer's own channel
// and is kept selectable for comparison experiments.
enum class InterferenceForm { own_channel, cross_channel };

// Full output of a beamforming solver. Support indices and positions are
// only populated by the flexible-antenna solver; the fixed-array solvers
// leave them empty.
struct BeamformingState {
  arma::cx_mat precoder;               // tx_antennas x (users * streams)
  std::vector<arma::cx_mat> combiner;  // users, rx_antennas x streams
  std::vector<arma::cx_mat> weight;    // users, streams x streams
  AntennaPositions tx_positions;
  std::vector<AntennaPositions> rx_positions;
  arma::uvec tx_support;               // selected transmit grid indices
  std::vector<arma::uvec> rx_support;  // selected receive grid indices
};

// Columns of the stacked precoder belonging to one user.
arma::cx_mat precoder_block(const arma::cx_mat& precoder, int user,
                            int streams);

// Achievable rate of one user in bits per channel use, with the total
// transmit power fixed to the budget by model (noise is scaled by
// trace(F F^H) / power instead of renormalizing F, so the value is invariant
// to a positive rescaling of the whole precoder).
double user_rate(const ChannelSet& channels, const arma::cx_mat& precoder,
                 int user, double noise_power, double power,
                 InterferenceForm form = InterferenceForm::own_channel);

// Priority-weighted sum of user rates.
double sum_rate(const ChannelSet& channels, const arma::cx_mat& precoder,
                const Scenario& scenario,
                InterferenceForm form = InterferenceForm::own_channel);

// Error covariance of one user's linear receive filter under the same
// power-normalized noise model as user_rate. Hermitian by construction.
arma::cx_mat equivalent_mse(const ChannelSet& channels,
                            const arma::cx_mat& precoder,
                            const arma::cx_mat& combiner, int user,
                            double noise_power, double power);

// Weighted MSE objective: sum_k priority_k (tr(W_k E_k) - ln det W_k),
// natural log. The solvers drive this downward; rates are reported in bits.
double wmmse_objective(const std::vector<arma::cx_mat>& weight,
                       const std::vector<arma::cx_mat>& mse,
                       const arma::vec& priority);

}  // namespace mabeam
