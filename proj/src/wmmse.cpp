// SPDX-License-Identifier: Apache-2.0

#include "mabeam/wmmse.hpp"

#include <cmath>
#include <string>

#include "mabeam/linalg.hpp"
#include "mabeam/rng.hpp"

namespace mabeam {

namespace {

double frob_sq(const arma::cx_mat& m) {
  const double n = arma::norm(m, "fro");
  return n * n;
}

}  // namespace

arma::cx_mat init_precoder(const Scenario& scenario, std::uint64_t seed) {
  Rng rng(seed);
  arma::cx_mat f = random_complex(
      rng, scenario.tx_antennas,
      static_cast<arma::uword>(scenario.users) * scenario.streams);
  return normalize_precoder(f, scenario.power);
}

double combiner_ridge(const arma::cx_mat& precoder, double noise_power,
                      double power) {
  return noise_power / power * frob_sq(precoder);
}

arma::cx_mat update_combiner(const ChannelSet& channels,
                             const arma::cx_mat& precoder, int user,
                             double noise_power, double power) {
  const arma::cx_mat& h = channels.channel[user];
  const int users = static_cast<int>(channels.channel.size());
  const int streams = static_cast<int>(precoder.n_cols) / users;
  const arma::cx_mat hf = h * precoder;  // rx_antennas x (users * streams)
  arma::cx_mat cov = hermitian_part(hf * hf.t());
  cov.diag() +=
      arma::cx_double(combiner_ridge(precoder, noise_power, power), 0.0);
  arma::cx_mat w;
  if (!arma::solve(w, cov, h * precoder_block(precoder, user, streams),
                   arma::solve_opts::likely_sympd))
    throw SolverError("update_combiner: received covariance is singular for"
                      " user " + std::to_string(user));
  return w;
}

arma::cx_mat update_weight(const ChannelSet& channels,
                           const arma::cx_mat& precoder,
                           const arma::cx_mat& combiner, int user) {
  const arma::cx_mat& h = channels.channel[user];
  const int users = static_cast<int>(channels.channel.size());
  const int streams = static_cast<int>(precoder.n_cols) / users;
  const arma::cx_mat gain =
      combiner.t() * h * precoder_block(precoder, user, streams);
  const arma::cx_mat err =
      arma::eye<arma::cx_mat>(streams, streams) - gain;
  arma::cx_mat w;
  if (!arma::inv(w, err))
    throw SolverError("update_weight: error matrix is singular for user " +
                      std::to_string(user));
  return w;
}

double precoder_ridge(const std::vector<arma::cx_mat>& combiner,
                      const std::vector<arma::cx_mat>& weight,
                      const Scenario& scenario) {
  double ridge = 0.0;
  for (int k = 0; k < scenario.users; ++k) {
    const arma::cx_mat wb = combiner[k] * hermitian_part(weight[k]);
    ridge += scenario.priority(k) * scenario.noise_power(k) / scenario.power *
             arma::trace(wb * combiner[k].t()).real();
  }
  return ridge;
}

arma::cx_mat update_precoder(const ChannelSet& channels,
                             const std::vector<arma::cx_mat>& combiner,
                             const std::vector<arma::cx_mat>& weight,
                             const Scenario& scenario) {
  const int nt = scenario.tx_antennas;
  const double ridge = precoder_ridge(combiner, weight, scenario);
  if (!(ridge > 0.0))
    throw SolverError("update_precoder: degenerate update, all combiners have"
                      " zero energy");

  arma::cx_mat normal(nt, nt, arma::fill::zeros);
  for (int k = 0; k < scenario.users; ++k) {
    const arma::cx_mat wh = combiner[k].t() * channels.channel[k];
    normal += scenario.priority(k) *
              (wh.t() * hermitian_part(weight[k]) * wh);
  }
  normal = hermitian_part(normal);
  normal.diag() += arma::cx_double(ridge, 0.0);

  arma::cx_mat rhs(nt,
                   static_cast<arma::uword>(scenario.users) * scenario.streams,
                   arma::fill::zeros);
  for (int k = 0; k < scenario.users; ++k) {
    rhs.cols(static_cast<arma::uword>(k) * scenario.streams,
             static_cast<arma::uword>(k + 1) * scenario.streams - 1) =
        scenario.priority(k) * channels.channel[k].t() * combiner[k] *
        weight[k];
  }
  arma::cx_mat f;
  if (!arma::solve(f, normal, rhs, arma::solve_opts::likely_sympd))
    throw SolverError("update_precoder: normal matrix is singular");
  return f;
}

arma::cx_mat normalize_precoder(const arma::cx_mat& precoder, double power) {
  if (!(power > 0.0))
    throw ConfigError("normalize_precoder: power must be positive");
  const double energy = frob_sq(precoder);
  if (!(energy > 0.0))
    throw SolverError("normalize_precoder: zero precoder cannot be scaled to"
                      " the power budget");
  return std::sqrt(power / energy) * precoder;
}

std::pair<BeamformingState, SolverTrace> run_wmmse(const Scenario& scenario,
                                                   const ChannelSet& channels,
                                                   int iterations,
                                                   std::uint64_t seed,
                                                   InterferenceForm form) {
  if (iterations < 1)
    throw ConfigError("run_wmmse: iterations must be >= 1");
  const int users = scenario.users;

  BeamformingState state;
  state.precoder = init_precoder(scenario, seed);
  state.combiner.assign(users, arma::cx_mat());
  state.weight.assign(users, arma::cx_mat());

  SolverTrace trace;
  trace.sum_rate.set_size(iterations);
  trace.objective.set_size(iterations);
  trace.combiner_reg.set_size(iterations, users);
  trace.precoder_reg.set_size(iterations);

  for (int it = 0; it < iterations; ++it) {
    try {
      for (int k = 0; k < users; ++k) {
        trace.combiner_reg(it, k) = combiner_ridge(
            state.precoder, scenario.noise_power(k), scenario.power);
        state.combiner[k] =
            update_combiner(channels, state.precoder, k,
                            scenario.noise_power(k), scenario.power);
      }
      for (int k = 0; k < users; ++k)
        state.weight[k] =
            update_weight(channels, state.precoder, state.combiner[k], k);
      trace.precoder_reg(it) =
          precoder_ridge(state.combiner, state.weight, scenario);
      state.precoder =
          update_precoder(channels, state.combiner, state.weight, scenario);
    } catch (const SolverError& e) {
      throw SolverError("run_wmmse: sweep " + std::to_string(it + 1) + ": " +
                        e.what());
    }

    trace.sum_rate(it) = sum_rate(channels, state.precoder, scenario, form);
    std::vector<arma::cx_mat> mse(users);
    for (int k = 0; k < users; ++k)
      mse[k] = equivalent_mse(channels, state.precoder, state.combiner[k], k,
                              scenario.noise_power(k), scenario.power);
    trace.objective(it) =
        wmmse_objective(state.weight, mse, scenario.priority);
    if (it == 0 || trace.sum_rate(it) > trace.best_sum_rate) {
      trace.best_sum_rate = trace.sum_rate(it);
      trace.best_iteration = it;
    }
  }

  state.precoder = normalize_precoder(state.precoder, scenario.power);
  return {std::move(state), std::move(trace)};
}

BeamformingState mmse_baseline(const Scenario& scenario,
                               const ChannelSet& channels) {
  const int users = scenario.users;
  const int streams = scenario.streams;

  BeamformingState state;
  state.combiner.assign(users, arma::cx_mat());
  state.weight.assign(users, arma::cx_mat());
  std::vector<arma::cx_mat> eigenbeams(users);
  for (int k = 0; k < users; ++k) {
    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd(u, s, v, channels.channel[k]))
      throw SolverError("mmse_baseline: SVD failed for user " +
                        std::to_string(k));
    eigenbeams[k] = u.cols(0, streams - 1);
    state.weight[k] = arma::eye<arma::cx_mat>(streams, streams);
  }
  state.precoder =
      update_precoder(channels, eigenbeams, state.weight, scenario);
  state.precoder = normalize_precoder(state.precoder, scenario.power);
  for (int k = 0; k < users; ++k)
    state.combiner[k] =
        update_combiner(channels, state.precoder, k, scenario.noise_power(k),
                        scenario.power);
  return state;
}

}  // namespace mabeam
