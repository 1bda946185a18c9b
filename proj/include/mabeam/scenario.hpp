// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "mabeam/errors.hpp"
#include "mabeam/rng.hpp"

namespace mabeam {

// Antenna location in the x-z plane, expressed in carrier wavelengths.
struct Position {
  double x = 0.0;
  double z = 0.0;
};

using AntennaPositions = std::vector<Position>;

// Virtual direction cosines of one propagation path, each in [-1, 1].
struct PathAngles {
  double theta = 0.0;  // elevation cosine
  double phi = 0.0;    // azimuth cosine
};

// Dimensions and physical parameters of a downlink instance.
struct ScenarioConfig {
  int users = 0;
  int tx_antennas = 0;
  int rx_antennas = 0;        // per user
  int streams = 0;            // per user
  int paths = 0;              // per user
  double power = 1.0;         // total transmit power budget, linear
  arma::vec noise_power;      // per-user noise variance; empty means all ones
  arma::vec priority;         // per-user rate weight; empty means all ones
  double tx_region = 0.0;     // transmit placement region side, wavelengths
  double rx_region = 0.0;     // receive placement region side, wavelengths
};

// A fully sampled multipath instance: geometry draws plus the parameters the
// solvers need. Channel matrices are not stored here because they depend on
// antenna positions, which the flexible solver keeps moving; see
// assemble_channel.
struct Scenario {
  int users = 0;
  int tx_antennas = 0;
  int rx_antennas = 0;
  int streams = 0;
  int paths = 0;
  double power = 1.0;
  arma::vec noise_power;  // users
  arma::vec priority;     // users
  double tx_region = 0.0;
  double rx_region = 0.0;
  std::uint64_t seed = 0;

  // departure[k][l] / arrival[k][l]: angles of path l of user k.
  std::vector<std::vector<PathAngles>> departure;
  std::vector<std::vector<PathAngles>> arrival;
  // path_gain(k, l): complex gain of path l of user k, before the 1/sqrt(L)
  // normalization applied when channels are assembled.
  arma::cx_mat path_gain;
};

// Channel matrices for one set of antenna positions, factored per user into
// array responses and a diagonal of normalized path gains.
struct ChannelSet {
  std::vector<arma::cx_mat> tx_response;   // users, tx_antennas x paths
  std::vector<arma::cx_mat> rx_response;   // users, rx_antennas x paths
  std::vector<arma::cx_vec> path_gain;     // users, paths (includes 1/sqrt(L))
  std::vector<arma::cx_mat> channel;       // users, rx_antennas x tx_antennas
};

// Draws path angles (virtual direction cosines, uniform on [-1, 1]) and
// complex Gaussian path gains for every user. The draw order is fixed per
// (user, path): departure theta, departure phi, arrival theta, arrival phi,
// then one complex gain; this makes scenarios a portable function of the seed.
Scenario sample_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Array response of a set of antennas toward one direction. Entry n is
// exp(+j 2 pi (phi x_n + theta z_n)) with positions in wavelengths.
arma::cx_vec array_angle_manifold(const AntennaPositions& positions,
                                  double theta, double phi);

// Response of a single candidate location across a set of paths, the
// conjugate counterpart of array_angle_manifold: entry l is
// exp(-j 2 pi (phi_l x + theta_l z)).
arma::cx_vec array_position_manifold(double x, double z,
                                     const std::vector<PathAngles>& paths);

// Builds per-user channels H_k = A_rx diag(g) A_tx^H for the given transmit
// array and per-user receive arrays, where g carries the 1/sqrt(L) factor.
ChannelSet assemble_channel(const Scenario& scenario,
                            const AntennaPositions& tx_positions,
                            const std::vector<AntennaPositions>& rx_positions);

// Square uniform planar array with the given element spacing (wavelengths),
// anchored at the origin corner. count must be a perfect square.
AntennaPositions upa_positions(int count, double spacing);

// Reference layout for conventional (non-movable) arrays: a square array when
// count is a perfect square, otherwise a compact grid with floor(sqrt(count))
// rows, filled row by row.
AntennaPositions default_fixed_positions(int count, double spacing = 0.5);

}  // namespace mabeam
