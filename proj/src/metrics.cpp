// SPDX-License-Identifier: Apache-2.0

#include "mabeam/metrics.hpp"

#include <cmath>
#include <string>

#include "mabeam/linalg.hpp"

namespace mabeam {

namespace {

double frob_sq(const arma::cx_mat& m) {
  const double n = arma::norm(m, "fro");
  return n * n;
}

}  // namespace

arma::cx_mat precoder_block(const arma::cx_mat& precoder, int user,
                            int streams) {
  if (streams < 1) throw ConfigError("precoder_block: streams must be >= 1");
  const arma::uword first = static_cast<arma::uword>(user) * streams;
  const arma::uword last = first + streams - 1;
  if (user < 0 || last >= precoder.n_cols)
    throw ConfigError("precoder_block: user " + std::to_string(user) +
                      " out of range for " + std::to_string(precoder.n_cols) +
                      " precoder columns");
  return precoder.cols(first, last);
}

double user_rate(const ChannelSet& channels, const arma::cx_mat& precoder,
                 int user, double noise_power, double power,
                 InterferenceForm form) {
  if (user < 0 || user >= static_cast<int>(channels.channel.size()))
    throw ConfigError("user_rate: user index out of range");
  if (!(power > 0.0)) throw ConfigError("user_rate: power must be positive");
  if (!(noise_power > 0.0))
    throw ConfigError("user_rate: noise_power must be positive");

  const arma::cx_mat& own = channels.channel[user];
  if (precoder.n_rows != own.n_cols)
    throw ConfigError("user_rate: precoder rows do not match channel columns");
  const int users = static_cast<int>(channels.channel.size());
  if (precoder.n_cols % users != 0)
    throw ConfigError("user_rate: precoder columns not divisible by users");
  const int streams = static_cast<int>(precoder.n_cols) / users;

  const double total = frob_sq(precoder);
  const arma::uword nr = own.n_rows;
  arma::cx_mat denom(nr, nr, arma::fill::zeros);
  denom.diag() += arma::cx_double(noise_power / power * total, 0.0);
  for (int i = 0; i < users; ++i) {
    if (i == user) continue;
    const arma::cx_mat& h =
        form == InterferenceForm::own_channel ? own : channels.channel[i];
    const arma::cx_mat hf = h * precoder_block(precoder, i, streams);
    denom += hf * hf.t();
  }
  const arma::cx_mat sig = own * precoder_block(precoder, user, streams);

  double ld_denom = 0.0;
  try {
    ld_denom = log_det_hermitian_pd(denom);
  } catch (const SolverError&) {
    throw SolverError("user_rate: interference-plus-noise matrix is singular"
                      " (zero precoder?)");
  }
  const double ld_full = log_det_hermitian_pd(denom + sig * sig.t());
  return (ld_full - ld_denom) / std::log(2.0);
}

double sum_rate(const ChannelSet& channels, const arma::cx_mat& precoder,
                const Scenario& scenario, InterferenceForm form) {
  double total = 0.0;
  for (int k = 0; k < scenario.users; ++k) {
    if (scenario.priority(k) == 0.0) continue;
    total += scenario.priority(k) * user_rate(channels, precoder, k,
                                              scenario.noise_power(k),
                                              scenario.power, form);
  }
  return total;
}

arma::cx_mat equivalent_mse(const ChannelSet& channels,
                            const arma::cx_mat& precoder,
                            const arma::cx_mat& combiner, int user,
                            double noise_power, double power) {
  if (user < 0 || user >= static_cast<int>(channels.channel.size()))
    throw ConfigError("equivalent_mse: user index out of range");
  if (!(power > 0.0))
    throw ConfigError("equivalent_mse: power must be positive");

  const arma::cx_mat& h = channels.channel[user];
  if (combiner.n_rows != h.n_rows)
    throw ConfigError("equivalent_mse: combiner rows do not match channel");
  const int users = static_cast<int>(channels.channel.size());
  const int streams = static_cast<int>(precoder.n_cols) / users;
  if (static_cast<int>(combiner.n_cols) != streams)
    throw ConfigError("equivalent_mse: combiner columns must equal streams");

  // Interference is charged through the served user's channel, matching the
  // rate model this code optimizes.
  const arma::cx_mat wh = combiner.t() * h;  // streams x tx_antennas
  const arma::cx_mat err =
      arma::eye<arma::cx_mat>(streams, streams) -
      wh * precoder_block(precoder, user, streams);
  arma::cx_mat e = err * err.t();
  for (int i = 0; i < users; ++i) {
    if (i == user) continue;
    const arma::cx_mat x = wh * precoder_block(precoder, i, streams);
    e += x * x.t();
  }
  e += noise_power / power * frob_sq(precoder) * (combiner.t() * combiner);
  return hermitian_part(e);
}

double wmmse_objective(const std::vector<arma::cx_mat>& weight,
                       const std::vector<arma::cx_mat>& mse,
                       const arma::vec& priority) {
  if (weight.size() != mse.size() || weight.size() != priority.n_elem)
    throw ConfigError("wmmse_objective: per-user inputs disagree in length");
  double total = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    const double tr = arma::trace(weight[k] * mse[k]).real();
    arma::cx_double ld;
    try {
      ld = arma::log_det(weight[k]);
    } catch (const std::exception&) {
      throw SolverError("wmmse_objective: singular weight matrix for user " +
                        std::to_string(k));
    }
    total += priority(k) * (tr - ld.real());
  }
  return total;
}

}  // namespace mabeam
