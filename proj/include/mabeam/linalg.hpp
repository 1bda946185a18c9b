// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>

namespace mabeam {

// (A + A^H) / 2. Used to strip the rounding-level skew that matrix products
// leave on quantities that are Hermitian in exact arithmetic.
arma::cx_mat hermitian_part(const arma::cx_mat& a);

// Hermitian square root of a positive semidefinite matrix via its eigen
// decomposition. Eigenvalues below zero (rounding noise) are clamped.
arma::cx_mat hermitian_sqrt(const arma::cx_mat& a);

// ln det of a Hermitian positive definite matrix. Throws SolverError when the
// matrix is not positive definite.
double log_det_hermitian_pd(const arma::cx_mat& a);

}  // namespace mabeam
