// SPDX-License-Identifier: Apache-2.0

#include "mabeam/selftest.hpp"

#include <armadillo>
#include <functional>
#include <string>

#include "mabeam/dictionary.hpp"
#include "mabeam/fwmmse.hpp"
#include "mabeam/metrics.hpp"
#include "mabeam/rls_somp.hpp"
#include "mabeam/rng.hpp"
#include "mabeam/scenario.hpp"
#include "mabeam/wmmse.hpp"

namespace mabeam {

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.users = 2;
  c.tx_antennas = 8;
  c.rx_antennas = 2;
  c.streams = 2;
  c.paths = 5;
  c.power = std::pow(10.0, 0.5);
  c.tx_region = 3.0;
  c.rx_region = 1.5;
  return c;
}

bool check_manifold_duality(std::uint64_t seed) {
  Rng rng(seed);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<PathAngles> paths(6);
    for (auto& p : paths) p = {rng.uniform_pm1(), rng.uniform_pm1()};
    const Position pos{2.0 * rng.uniform(), 2.0 * rng.uniform()};
    const arma::cx_vec by_position =
        array_position_manifold(pos.x, pos.z, paths);
    for (std::size_t l = 0; l < paths.size(); ++l) {
      const arma::cx_vec by_angle =
          array_angle_manifold({pos}, paths[l].theta, paths[l].phi);
      if (std::abs(std::conj(by_position(l)) - by_angle(0)) > 1e-13)
        return false;
    }
  }
  return true;
}

bool check_channel_assembly(std::uint64_t seed) {
  const Scenario s = sample_scenario(small_config(), seed);
  const AntennaPositions tx = default_fixed_positions(s.tx_antennas);
  const std::vector<AntennaPositions> rx(
      s.users, default_fixed_positions(s.rx_antennas));
  const ChannelSet set = assemble_channel(s, tx, rx);
  for (int k = 0; k < s.users; ++k) {
    arma::cx_mat sum(s.rx_antennas, s.tx_antennas, arma::fill::zeros);
    for (int l = 0; l < s.paths; ++l)
      sum += set.path_gain[k](l) *
             array_angle_manifold(rx[k], s.arrival[k][l].theta,
                                  s.arrival[k][l].phi) *
             array_angle_manifold(tx, s.departure[k][l].theta,
                                  s.departure[k][l].phi)
                 .t();
    if (arma::abs(sum - set.channel[k]).max() > 1e-11) return false;
  }
  return true;
}

bool check_update_identities(std::uint64_t seed) {
  const Scenario s = sample_scenario(small_config(), seed);
  const AntennaPositions tx = default_fixed_positions(s.tx_antennas);
  const std::vector<AntennaPositions> rx(
      s.users, default_fixed_positions(s.rx_antennas));
  const ChannelSet set = assemble_channel(s, tx, rx);
  const arma::cx_mat f = init_precoder(s, splitmix64(seed));

  // The per-user receive filter solves a ridge regression whose dictionary
  // is the precoded channel seen in stream space.
  for (int k = 0; k < s.users; ++k) {
    const arma::cx_mat w =
        update_combiner(set, f, k, s.noise_power(k), s.power);
    arma::cx_mat target(
        static_cast<arma::uword>(s.users) * s.streams, s.streams,
        arma::fill::zeros);
    target.rows(static_cast<arma::uword>(k) * s.streams,
                static_cast<arma::uword>(k + 1) * s.streams - 1) =
        arma::eye<arma::cx_mat>(s.streams, s.streams);
    const arma::cx_mat dict = f.t() * set.channel[k].t();
    const arma::cx_mat w2 = rls_solve(
        dict, target, combiner_ridge(f, s.noise_power(k), s.power));
    if (arma::abs(w - w2).max() > 1e-9) return false;
  }
  return true;
}

bool check_sparse_agreement(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (int rep = 0; rep < 20; ++rep) {
    state = splitmix64(state);
    Rng rng(state);
    const int m = 6 + static_cast<int>(rng.uniform() * 10);
    const int g = 24 + static_cast<int>(rng.uniform() * 40);
    const int cols = 1 + static_cast<int>(rng.uniform() * 6);
    const int atoms = 1 + static_cast<int>(rng.uniform() * (m - 1));
    const double ridge = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    const arma::cx_mat dict = random_complex(rng, m, g);
    const arma::cx_mat target = random_complex(rng, m, cols);
    const SparseSolution naive = rls_somp(target, dict, ridge, atoms);
    const SparseSolution fast = rls_somp_fast(target, dict, ridge, atoms);
    if (!arma::all(naive.support == fast.support)) return false;
    if (arma::abs(naive.coeffs - fast.coeffs).max() > 1e-8) return false;
  }
  return true;
}

bool check_descent(std::uint64_t seed) {
  const Scenario s = sample_scenario(small_config(), seed);
  const AntennaPositions tx = default_fixed_positions(s.tx_antennas);
  const std::vector<AntennaPositions> rx(
      s.users, default_fixed_positions(s.rx_antennas));
  const ChannelSet set = assemble_channel(s, tx, rx);
  const auto [state, trace] = run_wmmse(s, set, 15, splitmix64(seed));
  for (arma::uword i = 1; i < trace.objective.n_elem; ++i)
    if (trace.objective(i) > trace.objective(i - 1) + 1e-8) return false;
  return true;
}

}  // namespace

bool selftest(std::ostream& os, std::uint64_t seed) {
  const std::pair<const char*, std::function<bool(std::uint64_t)>> checks[] = {
      {"manifold duality", check_manifold_duality},
      {"channel assembly", check_channel_assembly},
      {"receive update identity", check_update_identities},
      {"sparse solver agreement", check_sparse_agreement},
      {"objective descent", check_descent},
  };
  bool all = true;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    std::string note;
    try {
      ok = fn(seed);
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    os << (ok ? "PASS" : "FAIL") << "  " << name << note << "\n";
    all = all && ok;
  }
  os << (all ? "selftest passed" : "selftest FAILED") << "\n";
  return all;
}

}  // namespace mabeam
