// SPDX-License-Identifier: Apache-2.0

#include "mabeam/linalg.hpp"

#include "mabeam/errors.hpp"

namespace mabeam {

arma::cx_mat hermitian_part(const arma::cx_mat& a) { return 0.5 * (a + a.t()); }

arma::cx_mat hermitian_sqrt(const arma::cx_mat& a) {
  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, hermitian_part(a)))
    throw SolverError("hermitian_sqrt: eigen decomposition failed");
  eigval.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
  return eigvec * arma::diagmat(eigval) * eigvec.t();
}

double log_det_hermitian_pd(const arma::cx_mat& a) {
  double val = 0.0;
  if (!arma::log_det_sympd(val, hermitian_part(a)))
    throw SolverError(
        "log_det_hermitian_pd: matrix is not positive definite");
  return val;
}

}  // namespace mabeam
