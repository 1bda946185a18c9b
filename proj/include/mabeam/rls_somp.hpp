// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <cstddef>

namespace mabeam {

// Result of a greedy ridge-regularized sparse recovery. Row n of coeffs is
// the coefficient row of the n-th selected atom, so support and coeffs share
// their ordering.
struct SparseSolution {
  arma::cx_mat coeffs;   // selected x measurement columns
  arma::uvec support;    // dictionary column indices, in selection order
  double residual_norm = 0.0;  // Frobenius norm of Y - D_S X
};

// Scratch state of the accelerated solver. Reusable across calls; reset() is
// called internally at the start of every solve.
//
// Atom cross-products (columns of D^H D) are gathered lazily for selected
// atoms only, which is the cheaper choice whenever far fewer atoms are
// selected than the dictionary holds. Setting precompute_gram materializes
// the full Gram matrix up front instead (useful when one dictionary is
// solved against many targets), unless its footprint would exceed
// gram_budget_bytes.
struct FastSompWorkspace {
  bool precompute_gram = false;
  std::size_t gram_budget_bytes = std::size_t(1) << 30;

  arma::cx_mat gram;       // full D^H D, only in precompute mode
  arma::cx_mat gram_sel;   // D^H d_g for selected atoms g, one column per step
  arma::cx_mat dy;         // D^H Y
  arma::cx_mat inv;        // (D_S^H D_S + ridge I)^{-1}, grown per step
  arma::cx_mat basis;      // D_S * inv, grown per step
  arma::cx_mat coeffs;     // current solution, grown per step
  arma::cx_mat fitted;     // D_S * coeffs, kept in sync with coeffs

  // Number of steps where the rank-one recursion was abandoned for a dense
  // refactorization because the pivot lost all significant digits.
  int dense_fallbacks = 0;
  bool used_full_gram = false;

  void reset();
};

// Ridge-regularized least squares on a fixed dictionary:
// argmin_X ||target - dict X||_F^2 + ridge ||X||_F^2,
// solved through the Hermitian normal equations.
arma::cx_mat rls_solve(const arma::cx_mat& dict, const arma::cx_mat& target,
                       double ridge);

// Greedy simultaneous recovery: selects `atoms` dictionary columns one at a
// time, each step picking the unselected column with the largest summed
// correlation energy against the current residual (lowest index wins ties)
// and re-solving the ridge problem on the enlarged support.
SparseSolution rls_somp(const arma::cx_mat& target, const arma::cx_mat& dict,
                        double ridge, int atoms);

// Same selections and coefficients as rls_somp (up to rounding), computed
// with rank-one updates: the regularized Gram inverse, the solution and the
// fitted matrix are all carried forward between steps, so no step solves a
// linear system from scratch. Falls back to a dense refactorization for any
// step whose Schur-complement pivot underflows the stability guard.
SparseSolution rls_somp_fast(const arma::cx_mat& target,
                             const arma::cx_mat& dict, double ridge, int atoms,
                             FastSompWorkspace& workspace);
SparseSolution rls_somp_fast(const arma::cx_mat& target,
                             const arma::cx_mat& dict, double ridge,
                             int atoms);

}  // namespace mabeam
