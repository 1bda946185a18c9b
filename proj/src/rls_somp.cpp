// SPDX-License-Identifier: Apache-2.0

#include "mabeam/rls_somp.hpp"

#include <string>

#include "mabeam/errors.hpp"
#include "mabeam/linalg.hpp"

namespace mabeam {

namespace {

void validate_inputs(const arma::cx_mat& target, const arma::cx_mat& dict,
                     double ridge, int atoms) {
  if (dict.n_rows == 0 || dict.n_cols == 0)
    throw ConfigError("sparse recovery: empty dictionary");
  if (target.n_rows != dict.n_rows)
    throw ConfigError("sparse recovery: target has " +
                      std::to_string(target.n_rows) +
                      " rows but dictionary has " +
                      std::to_string(dict.n_rows));
  if (target.n_cols == 0)
    throw ConfigError("sparse recovery: target has no columns");
  if (atoms < 1)
    throw ConfigError("sparse recovery: atom count must be >= 1, got " +
                      std::to_string(atoms));
  if (static_cast<arma::uword>(atoms) > dict.n_cols)
    throw ConfigError("sparse recovery: atom count " + std::to_string(atoms) +
                      " exceeds dictionary size " +
                      std::to_string(dict.n_cols));
  if (!(ridge >= 0.0))
    throw ConfigError("sparse recovery: ridge must be >= 0");
}

// Index of the largest residual-correlation energy among unselected atoms;
// the lowest index wins ties so selection order is deterministic.
arma::uword pick_atom(const arma::vec& scores,
                      const std::vector<char>& selected) {
  arma::uword best = scores.n_elem;
  double best_score = -1.0;
  for (arma::uword g = 0; g < scores.n_elem; ++g) {
    if (selected[g]) continue;
    if (scores(g) > best_score) {
      best_score = scores(g);
      best = g;
    }
  }
  if (best == scores.n_elem)
    throw SolverError("sparse recovery: no selectable atom left");
  return best;
}

arma::vec row_energies(const arma::cx_mat& m) {
  return arma::sum(arma::square(arma::abs(m)), 1);
}

}  // namespace

arma::cx_mat rls_solve(const arma::cx_mat& dict, const arma::cx_mat& target,
                       double ridge) {
  if (dict.n_rows != target.n_rows)
    throw ConfigError("rls_solve: dictionary and target row counts differ");
  if (!(ridge >= 0.0)) throw ConfigError("rls_solve: ridge must be >= 0");
  arma::cx_mat normal = hermitian_part(dict.t() * dict);
  normal.diag() += arma::cx_double(ridge, 0.0);
  arma::cx_mat x;
  if (!arma::solve(x, normal, dict.t() * target,
                   arma::solve_opts::likely_sympd))
    throw SolverError("rls_solve: regularized normal equations are singular");
  return x;
}

SparseSolution rls_somp(const arma::cx_mat& target, const arma::cx_mat& dict,
                        double ridge, int atoms) {
  validate_inputs(target, dict, ridge, atoms);

  SparseSolution sol;
  sol.support.set_size(atoms);
  std::vector<char> selected(dict.n_cols, 0);
  arma::cx_mat residual = target;
  for (int n = 0; n < atoms; ++n) {
    const arma::uword pick = pick_atom(row_energies(dict.t() * residual),
                                       selected);
    selected[pick] = 1;
    sol.support(n) = pick;
    const arma::cx_mat sub = dict.cols(sol.support.head(n + 1));
    sol.coeffs = rls_solve(sub, target, ridge);
    residual = target - sub * sol.coeffs;
  }
  sol.residual_norm = arma::norm(residual, "fro");
  return sol;
}

void FastSompWorkspace::reset() {
  gram_sel.reset();
  dy.reset();
  inv.reset();
  basis.reset();
  coeffs.reset();
  fitted.reset();
  dense_fallbacks = 0;
  used_full_gram = false;
}

SparseSolution rls_somp_fast(const arma::cx_mat& target,
                             const arma::cx_mat& dict, double ridge, int atoms,
                             FastSompWorkspace& ws) {
  validate_inputs(target, dict, ridge, atoms);

  const arma::uword m = dict.n_rows;
  const arma::uword g_total = dict.n_cols;
  ws.reset();
  ws.dy = dict.t() * target;  // g_total x M
  if (ws.precompute_gram &&
      g_total * g_total * sizeof(arma::cx_double) <= ws.gram_budget_bytes) {
    ws.gram = dict.t() * dict;
    ws.used_full_gram = true;
  }
  ws.gram_sel.set_size(g_total, 0);

  SparseSolution sol;
  sol.support.set_size(atoms);
  std::vector<char> selected(g_total, 0);

  for (int n = 0; n < atoms; ++n) {
    // Correlation energies against the current residual, computed from the
    // cached products: D^H R = D^H Y - (D^H D_S) X.
    const arma::vec scores =
        n == 0 ? row_energies(ws.dy)
               : row_energies(ws.dy - ws.gram_sel * ws.coeffs);
    const arma::uword pick = pick_atom(scores, selected);
    selected[pick] = 1;
    sol.support(n) = pick;

    const arma::cx_vec gcol =
        ws.used_full_gram ? arma::cx_vec(ws.gram.col(pick))
                          : arma::cx_vec(dict.t() * dict.col(pick));
    const double atom_energy = gcol(pick).real();
    const arma::uvec prev = sol.support.head(n);

    // Schur-complement pivot of the bordered normal matrix. When it has lost
    // all significant digits the rank-one update would amplify noise, so the
    // step is redone with a dense factorization instead.
    double denom = atom_energy + ridge;
    arma::cx_vec b, v;
    if (n > 0) {
      b = gcol(prev);
      v = ws.inv * b;
      denom -= arma::cdot(b, v).real();
    }
    ws.gram_sel.insert_cols(n, gcol);

    if (denom <= 1e-12 * (atom_energy + ridge)) {
      ++ws.dense_fallbacks;
      const arma::uvec cur = sol.support.head(n + 1);
      arma::cx_mat normal = hermitian_part(ws.gram_sel.rows(cur));
      normal.diag() += arma::cx_double(ridge, 0.0);
      if (!arma::inv_sympd(ws.inv, normal))
        throw SolverError(
            "sparse recovery: regularized Gram matrix is singular at step " +
            std::to_string(n + 1));
      ws.coeffs = ws.inv * ws.dy.rows(cur);
      const arma::cx_mat sub = dict.cols(cur);
      ws.basis = sub * ws.inv;
      ws.fitted = sub * ws.coeffs;
      continue;
    }

    const double eta = 1.0 / denom;
    const arma::cx_vec d = dict.col(pick);
    arma::cx_vec t;
    arma::cx_mat thy;  // 1 x M row t^H Y, from cached products
    if (n == 0) {
      t = -d;
      thy = -ws.dy.row(pick);
      ws.inv.set_size(1, 1);
      ws.inv(0, 0) = arma::cx_double(eta, 0.0);
      ws.coeffs = -eta * thy;
      ws.basis = -eta * t;
      ws.fitted = eta * t * thy;
      continue;
    }

    t = dict.cols(prev) * v - d;
    thy = v.t() * ws.dy.rows(prev) - ws.dy.row(pick);

    arma::cx_mat inv_next(n + 1, n + 1);
    inv_next.submat(0, 0, n - 1, n - 1) = ws.inv + eta * v * v.t();
    inv_next.submat(0, n, n - 1, n) = -eta * v;
    inv_next.submat(n, 0, n, n - 1) = -eta * v.t();
    inv_next(n, n) = arma::cx_double(eta, 0.0);
    ws.inv = std::move(inv_next);

    arma::cx_mat coeffs_next(n + 1, target.n_cols);
    coeffs_next.rows(0, n - 1) = ws.coeffs + eta * v * thy;
    coeffs_next.row(n) = -eta * thy;
    ws.coeffs = std::move(coeffs_next);

    arma::cx_mat basis_next(m, n + 1);
    basis_next.cols(0, n - 1) = ws.basis + eta * t * v.t();
    basis_next.col(n) = -eta * t;
    ws.basis = std::move(basis_next);

    ws.fitted += eta * t * thy;
  }

  sol.coeffs = ws.coeffs;
  sol.residual_norm = arma::norm(target - ws.fitted, "fro");
  return sol;
}

SparseSolution rls_somp_fast(const arma::cx_mat& target,
                             const arma::cx_mat& dict, double ridge,
                             int atoms) {
  FastSompWorkspace ws;
  return rls_somp_fast(target, dict, ridge, atoms, ws);
}

}  // namespace mabeam
