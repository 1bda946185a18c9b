// SPDX-License-Identifier: Apache-2.0

#include "mabeam/dictionary.hpp"

#include <cmath>
#include <string>

namespace mabeam {

std::vector<Position> build_grid(double region) {
  if (!(region > 0.0))
    throw ConfigError("build_grid: region must be positive, got " +
                      std::to_string(region));
  const double steps = region / 0.5;
  const int side = static_cast<int>(std::lround(steps));
  if (std::abs(steps - side) > 1e-9)
    throw ConfigError("build_grid: region (" + std::to_string(region) +
                      " wavelengths) must be a multiple of the half-wavelength"
                      " grid step");
  std::vector<Position> grid;
  grid.reserve(static_cast<std::size_t>(side) * side);
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i)
      grid.push_back({0.5 * i, 0.5 * j});
  return grid;
}

PositionDictionary build_rx_dictionary(const Scenario& scenario, int user,
                                       const std::vector<Position>& grid,
                                       double region) {
  if (user < 0 || user >= scenario.users)
    throw ConfigError("build_rx_dictionary: user index out of range");
  if (grid.empty()) throw ConfigError("build_rx_dictionary: empty grid");
  if (static_cast<int>(grid.size()) < scenario.rx_antennas)
    throw ConfigError("build_rx_dictionary: grid has " +
                      std::to_string(grid.size()) +
                      " candidates, need at least rx_antennas (" +
                      std::to_string(scenario.rx_antennas) + ")");

  PositionDictionary d;
  d.grid = grid;
  d.region = region;
  d.points_per_side =
      static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid.size()))));
  d.atoms.set_size(scenario.paths, grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    d.atoms.col(g) = array_position_manifold(grid[g].x, grid[g].z,
                                             scenario.arrival[user]);
  return d;
}

PositionDictionary build_tx_dictionary(const Scenario& scenario,
                                       const std::vector<Position>& grid,
                                       double region) {
  if (grid.empty()) throw ConfigError("build_tx_dictionary: empty grid");
  if (static_cast<int>(grid.size()) < scenario.tx_antennas)
    throw ConfigError("build_tx_dictionary: grid has " +
                      std::to_string(grid.size()) +
                      " candidates, need at least tx_antennas (" +
                      std::to_string(scenario.tx_antennas) + ")");

  PositionDictionary d;
  d.grid = grid;
  d.region = region;
  d.points_per_side =
      static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid.size()))));
  const int L = scenario.paths;
  d.atoms.set_size(static_cast<arma::uword>(scenario.users) * L, grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int k = 0; k < scenario.users; ++k) {
      d.atoms.col(g).subvec(static_cast<arma::uword>(k) * L,
                            static_cast<arma::uword>(k + 1) * L - 1) =
          array_position_manifold(grid[g].x, grid[g].z, scenario.departure[k]);
    }
  }
  return d;
}

}  // namespace mabeam
