// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cstdint>
#include <utility>
#include <vector>

#include "mabeam/dictionary.hpp"
#include "mabeam/metrics.hpp"
#include "mabeam/rls_somp.hpp"
#include "mabeam/scenario.hpp"
#include "mabeam/wmmse.hpp"

namespace mabeam {

enum class SompMode { naive, fast };

struct FwmmseConfig {
  int iterations = 25;
  SompMode somp = SompMode::fast;
  // Placement region sides in wavelengths; zero means "use the scenario's".
  double tx_region = 0.0;
  double rx_region = 0.0;
  bool record_trace = true;
  // Rate form used for the trace only; the updates are form-independent.
  InterferenceForm interference = InterferenceForm::own_channel;
};

// One user's receive-side result: combiner rows are ordered like support,
// i.e. row n belongs to the n-th selected antenna location.
struct ReceiveUpdate {
  arma::cx_mat combiner;     // rx_antennas x streams
  arma::uvec support;        // selected grid indices, selection order
  arma::cx_mat rx_response;  // rx_antennas x paths at the selected locations
  AntennaPositions positions;
};

// Joint transmit-side result shared by all users.
struct TransmitUpdate {
  arma::cx_mat precoder;  // tx_antennas x (users * streams)
  arma::uvec support;
  std::vector<arma::cx_mat> tx_response;  // users, tx_antennas x paths
  AntennaPositions positions;
};

// Receive-side sensing matrix of one user: how every candidate antenna
// location maps, through that user's paths and the current transmit side,
// onto the stacked stream space. Column g equals
// (precoder^H tx_response) conj(path_gain) .* rx_atoms column g.
arma::cx_mat build_rx_sensing(const arma::cx_mat& precoder,
                              const arma::cx_mat& tx_response,
                              const arma::cx_vec& path_gain,
                              const arma::cx_mat& rx_atoms);

// Transmit-side sensing matrix: user block k of column g maps candidate
// location g through user k's departure paths, current receive side and
// weight square root.
arma::cx_mat build_tx_sensing(const std::vector<arma::cx_mat>& weight_sqrt,
                              const std::vector<arma::cx_mat>& combiner,
                              const std::vector<arma::cx_mat>& rx_response,
                              const std::vector<arma::cx_vec>& path_gain,
                              const arma::cx_mat& tx_atoms,
                              const arma::vec& priority);

// Jointly reselects one user's antenna locations and combiner by sparse
// recovery of the stream indicator against the receive sensing matrix.
ReceiveUpdate update_receive(const Scenario& scenario, int user,
                             const arma::cx_mat& precoder,
                             const arma::cx_mat& tx_response,
                             const arma::cx_vec& path_gain,
                             const PositionDictionary& rx_dict, SompMode mode,
                             FastSompWorkspace& workspace);

// MSE-weight update evaluated directly on the factored channel of the
// current positions (no assembled channel matrix needed).
arma::cx_mat update_weight_flexible(const arma::cx_mat& precoder_block_k,
                                    const arma::cx_mat& tx_response,
                                    const arma::cx_vec& path_gain,
                                    const arma::cx_mat& rx_response,
                                    const arma::cx_mat& combiner);

// Jointly reselects the shared transmit antenna locations and the precoder
// by sparse recovery of the block weight root against the transmit sensing
// matrix.
TransmitUpdate update_transmit(const Scenario& scenario,
                               const std::vector<arma::cx_mat>& weight,
                               const std::vector<arma::cx_mat>& combiner,
                               const std::vector<arma::cx_mat>& rx_response,
                               const PositionDictionary& tx_dict,
                               SompMode mode, FastSompWorkspace& workspace);

// Alternating flexible-antenna solver: starts from a random precoder on the
// reference array, then cycles receive-side, weight and transmit-side
// updates. Positions and filters always move together, so every iterate is
// consistent with an actual antenna placement. The trace is evaluated on
// channels rebuilt from the current positions after each sweep.
std::pair<BeamformingState, SolverTrace> run_fwmmse(const Scenario& scenario,
                                                    const FwmmseConfig& config,
                                                    std::uint64_t seed);

}  // namespace mabeam
