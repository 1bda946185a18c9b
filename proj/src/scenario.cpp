// SPDX-License-Identifier: Apache-2.0

#include "mabeam/scenario.hpp"

#include <cmath>
#include <string>

namespace mabeam {

namespace {

void validate_config(const ScenarioConfig& c) {
  if (c.users < 1)
    throw ConfigError("scenario: users must be >= 1, got " +
                      std::to_string(c.users));
  if (c.tx_antennas < 1 || c.rx_antennas < 1)
    throw ConfigError("scenario: antenna counts must be >= 1");
  if (c.rx_antennas >= c.tx_antennas)
    throw ConfigError("scenario: rx_antennas (" +
                      std::to_string(c.rx_antennas) +
                      ") must be < tx_antennas (" +
                      std::to_string(c.tx_antennas) + ")");
  if (c.streams < 1 || c.streams > c.rx_antennas)
    throw ConfigError("scenario: streams (" + std::to_string(c.streams) +
                      ") must satisfy 1 <= streams <= rx_antennas (" +
                      std::to_string(c.rx_antennas) + ")");
  if (c.paths < 1)
    throw ConfigError("scenario: paths must be >= 1, got " +
                      std::to_string(c.paths));
  if (!(c.power > 0.0))
    throw ConfigError("scenario: power must be positive");
  if (!c.noise_power.empty()) {
    if (static_cast<int>(c.noise_power.n_elem) != c.users)
      throw ConfigError("scenario: noise_power must have one entry per user");
    if (c.noise_power.min() <= 0.0)
      throw ConfigError("scenario: noise_power entries must be positive");
  }
  if (!c.priority.empty()) {
    if (static_cast<int>(c.priority.n_elem) != c.users)
      throw ConfigError("scenario: priority must have one entry per user");
    if (c.priority.min() < 0.0)
      throw ConfigError("scenario: priority entries must be >= 0");
  }
}

}  // namespace

Scenario sample_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  validate_config(config);

  Scenario s;
  s.users = config.users;
  s.tx_antennas = config.tx_antennas;
  s.rx_antennas = config.rx_antennas;
  s.streams = config.streams;
  s.paths = config.paths;
  s.power = config.power;
  s.noise_power = config.noise_power.empty()
                      ? arma::vec(config.users, arma::fill::ones)
                      : config.noise_power;
  s.priority = config.priority.empty()
                   ? arma::vec(config.users, arma::fill::ones)
                   : config.priority;
  s.tx_region = config.tx_region;
  s.rx_region = config.rx_region;
  s.seed = seed;

  Rng rng(seed);
  s.departure.assign(s.users, std::vector<PathAngles>(s.paths));
  s.arrival.assign(s.users, std::vector<PathAngles>(s.paths));
  s.path_gain.set_size(s.users, s.paths);
  for (int k = 0; k < s.users; ++k) {
    for (int l = 0; l < s.paths; ++l) {
      s.departure[k][l].theta = rng.uniform_pm1();
      s.departure[k][l].phi = rng.uniform_pm1();
      s.arrival[k][l].theta = rng.uniform_pm1();
      s.arrival[k][l].phi = rng.uniform_pm1();
      s.path_gain(k, l) = rng.complex_normal();
    }
  }
  return s;
}

arma::cx_vec array_angle_manifold(const AntennaPositions& positions,
                                  double theta, double phi) {
  if (positions.empty())
    throw ConfigError("array_angle_manifold: empty antenna layout");
  arma::cx_vec v(positions.size());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const double phase =
        2.0 * M_PI * (phi * positions[n].x + theta * positions[n].z);
    v(n) = std::polar(1.0, phase);
  }
  return v;
}

arma::cx_vec array_position_manifold(double x, double z,
                                     const std::vector<PathAngles>& paths) {
  if (paths.empty())
    throw ConfigError("array_position_manifold: empty path list");
  arma::cx_vec v(paths.size());
  for (std::size_t l = 0; l < paths.size(); ++l) {
    const double phase = -2.0 * M_PI * (paths[l].phi * x + paths[l].theta * z);
    v(l) = std::polar(1.0, phase);
  }
  return v;
}

ChannelSet assemble_channel(const Scenario& scenario,
                            const AntennaPositions& tx_positions,
                            const std::vector<AntennaPositions>& rx_positions) {
  if (static_cast<int>(tx_positions.size()) != scenario.tx_antennas)
    throw ConfigError("assemble_channel: got " +
                      std::to_string(tx_positions.size()) +
                      " transmit positions, expected " +
                      std::to_string(scenario.tx_antennas));
  if (static_cast<int>(rx_positions.size()) != scenario.users)
    throw ConfigError("assemble_channel: need one receive layout per user");
  for (const auto& q : rx_positions)
    if (static_cast<int>(q.size()) != scenario.rx_antennas)
      throw ConfigError("assemble_channel: got a receive layout with " +
                        std::to_string(q.size()) + " positions, expected " +
                        std::to_string(scenario.rx_antennas));

  const int L = scenario.paths;
  const double scale = std::sqrt(1.0 / static_cast<double>(L));

  ChannelSet set;
  set.tx_response.resize(scenario.users);
  set.rx_response.resize(scenario.users);
  set.path_gain.resize(scenario.users);
  set.channel.resize(scenario.users);
  for (int k = 0; k < scenario.users; ++k) {
    arma::cx_mat at(scenario.tx_antennas, L);
    arma::cx_mat ar(scenario.rx_antennas, L);
    for (int l = 0; l < L; ++l) {
      at.col(l) = array_angle_manifold(tx_positions, scenario.departure[k][l].theta,
                                       scenario.departure[k][l].phi);
      ar.col(l) = array_angle_manifold(rx_positions[k],
                                       scenario.arrival[k][l].theta,
                                       scenario.arrival[k][l].phi);
    }
    set.tx_response[k] = std::move(at);
    set.rx_response[k] = std::move(ar);
    set.path_gain[k] = scale * scenario.path_gain.row(k).st();
    set.channel[k] = set.rx_response[k] * arma::diagmat(set.path_gain[k]) *
                     set.tx_response[k].t();
  }
  return set;
}

AntennaPositions upa_positions(int count, double spacing) {
  if (count < 1) throw ConfigError("upa_positions: count must be >= 1");
  if (!(spacing > 0.0))
    throw ConfigError("upa_positions: spacing must be positive");
  const int side = static_cast<int>(std::lround(std::sqrt(count)));
  if (side * side != count)
    throw ConfigError("upa_positions: count " + std::to_string(count) +
                      " is not a perfect square");
  AntennaPositions p;
  p.reserve(count);
  // Row-major over z, then x, matching the candidate-grid ordering used by
  // the placement dictionaries.
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i)
      p.push_back({spacing * i, spacing * j});
  return p;
}

AntennaPositions default_fixed_positions(int count, double spacing) {
  if (count < 1)
    throw ConfigError("default_fixed_positions: count must be >= 1");
  if (!(spacing > 0.0))
    throw ConfigError("default_fixed_positions: spacing must be positive");
  const int side = static_cast<int>(std::lround(std::sqrt(count)));
  if (side * side == count) return upa_positions(count, spacing);
  const int rows = std::max(1, static_cast<int>(std::floor(std::sqrt(count))));
  const int cols = (count + rows - 1) / rows;
  AntennaPositions p;
  p.reserve(count);
  for (int j = 0; j < rows && static_cast<int>(p.size()) < count; ++j)
    for (int i = 0; i < cols && static_cast<int>(p.size()) < count; ++i)
      p.push_back({spacing * i, spacing * j});
  return p;
}

}  // namespace mabeam
