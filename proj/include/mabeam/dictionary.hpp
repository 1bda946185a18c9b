// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <vector>

#include "mabeam/scenario.hpp"

namespace mabeam {

// Candidate antenna locations of one placement region together with their
// path responses. For the receive side atoms has one row per path of the
// addressed user; for the transmit side it has users * paths rows, with the
// block of user k occupying rows [k * paths, (k + 1) * paths).
struct PositionDictionary {
  std::vector<Position> grid;  // candidate locations, grid order
  arma::cx_mat atoms;          // rows x grid.size() path responses
  double region = 0.0;         // square region side, wavelengths
  int points_per_side = 0;
};

// Half-wavelength candidate grid covering a region x region square anchored
// at the origin: points (0.5 i, 0.5 j) for i, j in [0, 2 region), listed with
// i fastest. region must be a positive integer multiple of 0.5 wavelengths.
std::vector<Position> build_grid(double region);

// Receive-side dictionary of one user: column g holds the response of
// candidate location g across that user's arrival paths.
PositionDictionary build_rx_dictionary(const Scenario& scenario, int user,
                                       const std::vector<Position>& grid,
                                       double region = 0.0);

// Transmit-side dictionary shared by all users: column g stacks, user by
// user, the response of candidate location g across each user's departure
// paths.
PositionDictionary build_tx_dictionary(const Scenario& scenario,
                                       const std::vector<Position>& grid,
                                       double region = 0.0);

}  // namespace mabeam
