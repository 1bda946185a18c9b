// SPDX-License-Identifier: Apache-2.0

#include "mabeam/fwmmse.hpp"

#include <cmath>
#include <string>

#include "mabeam/linalg.hpp"

namespace mabeam {

namespace {

// Stacked stream indicator of one user: zeros with an identity block at that
// user's rows. Serves as the recovery target of the receive-side problem.
arma::cx_mat stream_indicator(int users, int streams, int user) {
  arma::cx_mat t(static_cast<arma::uword>(users) * streams, streams,
                 arma::fill::zeros);
  t.rows(static_cast<arma::uword>(user) * streams,
         static_cast<arma::uword>(user + 1) * streams - 1) =
      arma::eye<arma::cx_mat>(streams, streams);
  return t;
}

double frob_sq(const arma::cx_mat& m) {
  const double n = arma::norm(m, "fro");
  return n * n;
}

}  // namespace

arma::cx_mat build_rx_sensing(const arma::cx_mat& precoder,
                              const arma::cx_mat& tx_response,
                              const arma::cx_vec& path_gain,
                              const arma::cx_mat& rx_atoms) {
  if (tx_response.n_rows != precoder.n_rows)
    throw ConfigError("build_rx_sensing: transmit response rows must match"
                      " precoder rows");
  if (tx_response.n_cols != path_gain.n_elem ||
      rx_atoms.n_rows != path_gain.n_elem)
    throw ConfigError("build_rx_sensing: path counts disagree");
  arma::cx_mat scaled = rx_atoms;
  scaled.each_col() %= arma::conj(path_gain);
  return (precoder.t() * tx_response) * scaled;
}

arma::cx_mat build_tx_sensing(const std::vector<arma::cx_mat>& weight_sqrt,
                              const std::vector<arma::cx_mat>& combiner,
                              const std::vector<arma::cx_mat>& rx_response,
                              const std::vector<arma::cx_vec>& path_gain,
                              const arma::cx_mat& tx_atoms,
                              const arma::vec& priority) {
  const std::size_t users = weight_sqrt.size();
  if (combiner.size() != users || rx_response.size() != users ||
      path_gain.size() != users || priority.n_elem != users)
    throw ConfigError("build_tx_sensing: per-user inputs disagree in length");
  if (users == 0) throw ConfigError("build_tx_sensing: no users");
  const arma::uword paths = path_gain[0].n_elem;
  if (tx_atoms.n_rows != users * paths)
    throw ConfigError("build_tx_sensing: atom rows must equal users * paths");
  const arma::uword streams = weight_sqrt[0].n_cols;

  arma::cx_mat phi(users * streams, tx_atoms.n_cols);
  for (std::size_t k = 0; k < users; ++k) {
    // Map of user k from a transmit candidate's path response to its streams,
    // weighted for the joint objective.
    arma::cx_mat mk = std::sqrt(priority(k)) * weight_sqrt[k] *
                      combiner[k].t() * rx_response[k];
    mk.each_row() %= path_gain[k].st();
    phi.rows(k * streams, (k + 1) * streams - 1) =
        mk * tx_atoms.rows(k * paths, (k + 1) * paths - 1);
  }
  return phi;
}

ReceiveUpdate update_receive(const Scenario& scenario, int user,
                             const arma::cx_mat& precoder,
                             const arma::cx_mat& tx_response,
                             const arma::cx_vec& path_gain,
                             const PositionDictionary& rx_dict, SompMode mode,
                             FastSompWorkspace& workspace) {
  const arma::cx_mat phi =
      build_rx_sensing(precoder, tx_response, path_gain, rx_dict.atoms);
  const arma::cx_mat target =
      stream_indicator(scenario.users, scenario.streams, user);
  const double ridge = combiner_ridge(precoder, scenario.noise_power(user),
                                      scenario.power);
  const SparseSolution sol =
      mode == SompMode::fast
          ? rls_somp_fast(target, phi, ridge, scenario.rx_antennas, workspace)
          : rls_somp(target, phi, ridge, scenario.rx_antennas);

  ReceiveUpdate out;
  out.combiner = sol.coeffs;
  out.support = sol.support;
  out.rx_response = arma::cx_mat(rx_dict.atoms.cols(sol.support)).t();
  out.positions.reserve(sol.support.n_elem);
  for (arma::uword n = 0; n < sol.support.n_elem; ++n)
    out.positions.push_back(rx_dict.grid[sol.support(n)]);
  return out;
}

arma::cx_mat update_weight_flexible(const arma::cx_mat& precoder_block_k,
                                    const arma::cx_mat& tx_response,
                                    const arma::cx_vec& path_gain,
                                    const arma::cx_mat& rx_response,
                                    const arma::cx_mat& combiner) {
  const arma::uword streams = precoder_block_k.n_cols;
  const arma::cx_mat gain = combiner.t() * rx_response *
                            arma::diagmat(path_gain) * tx_response.t() *
                            precoder_block_k;
  const arma::cx_mat err = arma::eye<arma::cx_mat>(streams, streams) - gain;
  arma::cx_mat w;
  if (!arma::inv(w, err))
    throw SolverError("update_weight_flexible: error matrix is singular");
  return w;
}

TransmitUpdate update_transmit(const Scenario& scenario,
                               const std::vector<arma::cx_mat>& weight,
                               const std::vector<arma::cx_mat>& combiner,
                               const std::vector<arma::cx_mat>& rx_response,
                               const PositionDictionary& tx_dict,
                               SompMode mode, FastSompWorkspace& workspace) {
  const int users = scenario.users;
  const int streams = scenario.streams;
  const int paths = scenario.paths;
  const double scale = std::sqrt(1.0 / static_cast<double>(paths));

  std::vector<arma::cx_mat> weight_sqrt(users);
  std::vector<arma::cx_vec> gains(users);
  arma::cx_mat target(static_cast<arma::uword>(users) * streams,
                      static_cast<arma::uword>(users) * streams,
                      arma::fill::zeros);
  for (int k = 0; k < users; ++k) {
    weight_sqrt[k] = hermitian_sqrt(weight[k]);
    gains[k] = scale * scenario.path_gain.row(k).st();
    target.submat(static_cast<arma::uword>(k) * streams,
                  static_cast<arma::uword>(k) * streams,
                  static_cast<arma::uword>(k + 1) * streams - 1,
                  static_cast<arma::uword>(k + 1) * streams - 1) =
        std::sqrt(scenario.priority(k)) * weight_sqrt[k];
  }

  const arma::cx_mat phi =
      build_tx_sensing(weight_sqrt, combiner, rx_response, gains,
                       tx_dict.atoms, scenario.priority);
  const double ridge = precoder_ridge(combiner, weight, scenario);
  if (!(ridge > 0.0))
    throw SolverError("update_transmit: degenerate update, all combiners have"
                      " zero energy");
  const SparseSolution sol =
      mode == SompMode::fast
          ? rls_somp_fast(target, phi, ridge, scenario.tx_antennas, workspace)
          : rls_somp(target, phi, ridge, scenario.tx_antennas);

  TransmitUpdate out;
  out.precoder = sol.coeffs;
  out.support = sol.support;
  out.tx_response.resize(users);
  const arma::cx_mat picked = tx_dict.atoms.cols(sol.support);
  for (int k = 0; k < users; ++k)
    out.tx_response[k] =
        arma::cx_mat(picked.rows(static_cast<arma::uword>(k) * paths,
                                 static_cast<arma::uword>(k + 1) * paths - 1))
            .t();
  out.positions.reserve(sol.support.n_elem);
  for (arma::uword n = 0; n < sol.support.n_elem; ++n)
    out.positions.push_back(tx_dict.grid[sol.support(n)]);
  return out;
}

std::pair<BeamformingState, SolverTrace> run_fwmmse(const Scenario& scenario,
                                                    const FwmmseConfig& config,
                                                    std::uint64_t seed) {
  if (config.iterations < 1)
    throw ConfigError("run_fwmmse: iterations must be >= 1");
  const double tx_region =
      config.tx_region > 0.0 ? config.tx_region : scenario.tx_region;
  const double rx_region =
      config.rx_region > 0.0 ? config.rx_region : scenario.rx_region;

  const std::vector<Position> tx_grid = build_grid(tx_region);
  const std::vector<Position> rx_grid = build_grid(rx_region);
  const PositionDictionary tx_dict =
      build_tx_dictionary(scenario, tx_grid, tx_region);
  std::vector<PositionDictionary> rx_dict;
  rx_dict.reserve(scenario.users);
  for (int k = 0; k < scenario.users; ++k)
    rx_dict.push_back(build_rx_dictionary(scenario, k, rx_grid, rx_region));

  const int users = scenario.users;
  const int iterations = config.iterations;

  // The starting transmit side is the reference fixed array, so the first
  // receive update sees a meaningful channel.
  BeamformingState state;
  state.precoder = init_precoder(scenario, seed);
  state.combiner.assign(users, arma::cx_mat());
  state.weight.assign(users, arma::cx_mat());
  state.rx_positions.assign(users, AntennaPositions());
  state.rx_support.assign(users, arma::uvec());
  state.tx_positions = default_fixed_positions(scenario.tx_antennas);

  std::vector<arma::cx_mat> tx_response(users);
  std::vector<arma::cx_mat> rx_response(users);
  std::vector<arma::cx_vec> gains(users);
  const double scale = std::sqrt(1.0 / static_cast<double>(scenario.paths));
  for (int k = 0; k < users; ++k) {
    arma::cx_mat at(scenario.tx_antennas, scenario.paths);
    for (int l = 0; l < scenario.paths; ++l)
      at.col(l) = array_angle_manifold(state.tx_positions,
                                       scenario.departure[k][l].theta,
                                       scenario.departure[k][l].phi);
    tx_response[k] = std::move(at);
    gains[k] = scale * scenario.path_gain.row(k).st();
  }

  SolverTrace trace;
  if (config.record_trace) {
    trace.sum_rate.set_size(iterations);
    trace.objective.set_size(iterations);
    trace.combiner_reg.set_size(iterations, users);
    trace.precoder_reg.set_size(iterations);
  }

  FastSompWorkspace workspace;
  for (int it = 0; it < iterations; ++it) {
    try {
      for (int k = 0; k < users; ++k) {
        if (config.record_trace)
          trace.combiner_reg(it, k) = combiner_ridge(
              state.precoder, scenario.noise_power(k), scenario.power);
        ReceiveUpdate ru =
            update_receive(scenario, k, state.precoder, tx_response[k],
                           gains[k], rx_dict[k], config.somp, workspace);
        state.combiner[k] = std::move(ru.combiner);
        state.rx_support[k] = std::move(ru.support);
        state.rx_positions[k] = std::move(ru.positions);
        rx_response[k] = std::move(ru.rx_response);
      }
      for (int k = 0; k < users; ++k)
        state.weight[k] = update_weight_flexible(
            precoder_block(state.precoder, k, scenario.streams),
            tx_response[k], gains[k], rx_response[k], state.combiner[k]);
      if (config.record_trace)
        trace.precoder_reg(it) =
            precoder_ridge(state.combiner, state.weight, scenario);
      TransmitUpdate tu =
          update_transmit(scenario, state.weight, state.combiner, rx_response,
                          tx_dict, config.somp, workspace);
      state.precoder = std::move(tu.precoder);
      state.tx_support = std::move(tu.support);
      state.tx_positions = std::move(tu.positions);
      tx_response = std::move(tu.tx_response);
    } catch (const SolverError& e) {
      throw SolverError("run_fwmmse: sweep " + std::to_string(it + 1) + ": " +
                        e.what());
    }

    if (config.record_trace) {
      const ChannelSet channels =
          assemble_channel(scenario, state.tx_positions, state.rx_positions);
      trace.sum_rate(it) =
          sum_rate(channels, state.precoder, scenario, config.interference);
      std::vector<arma::cx_mat> mse(users);
      for (int k = 0; k < users; ++k)
        mse[k] =
            equivalent_mse(channels, state.precoder, state.combiner[k], k,
                           scenario.noise_power(k), scenario.power);
      trace.objective(it) =
          wmmse_objective(state.weight, mse, scenario.priority);
      if (it == 0 || trace.sum_rate(it) > trace.best_sum_rate) {
        trace.best_sum_rate = trace.sum_rate(it);
        trace.best_iteration = it;
      }
    }
  }

  state.precoder = normalize_precoder(state.precoder, scenario.power);
  return {std::move(state), std::move(trace)};
}

}  // namespace mabeam
