// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mabeam/errors.hpp"
#include "mabeam/linalg.hpp"
#include "mabeam/rls_somp.hpp"
#include "mabeam/rng.hpp"

using namespace mabeam;

namespace {

double ridge_objective(const arma::cx_mat& target, const arma::cx_mat& dict,
                       const arma::uvec& support, const arma::cx_mat& coeffs,
                       double ridge) {
  const arma::cx_mat sub = dict.cols(support);
  return std::pow(arma::norm(target - sub * coeffs, "fro"), 2) +
         ridge * std::pow(arma::norm(coeffs, "fro"), 2);
}

}  // namespace

TEST_CASE("rls_solve fixed points") {
  Rng rng(1);
  const arma::cx_mat y = random_complex(rng, 4, 3);

  // Identity dictionary with unit ridge shrinks the target by half.
  const arma::cx_mat eye = arma::eye<arma::cx_mat>(4, 4);
  CHECK(arma::abs(rls_solve(eye, y, 1.0) - 0.5 * y).max() < 1e-12);

  // Square invertible dictionary with no ridge solves exactly.
  const arma::cx_mat d = random_complex(rng, 4, 4);
  CHECK(arma::abs(d * rls_solve(d, y, 0.0) - y).max() < 1e-10);
}

TEST_CASE("rls_solve solves the regularized normal equations") {
  Rng rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const arma::cx_mat d = random_complex(rng, 8, 3);
    const arma::cx_mat y = random_complex(rng, 8, 4);
    const double ridge = std::pow(10.0, -2.0 + rep);
    const arma::cx_mat x = rls_solve(d, y, ridge);
    const arma::cx_mat lhs = (d.t() * d + ridge * arma::eye<arma::cx_mat>(3, 3)) * x;
    const arma::cx_mat rhs = d.t() * y;
    CHECK(arma::abs(lhs - rhs).max() / arma::abs(rhs).max() < 1e-10);
  }
}

TEST_CASE("rls_solve with orthonormal columns and no ridge is a projection") {
  Rng rng(3);
  arma::cx_mat q, r;
  REQUIRE(arma::qr_econ(q, r, random_complex(rng, 8, 3)));
  const arma::cx_mat y = random_complex(rng, 8, 2);
  CHECK(arma::abs(rls_solve(q, y, 0.0) - q.t() * y).max() < 1e-12);
}

TEST_CASE("solution shrinks monotonically in the ridge level") {
  Rng rng(4);
  const arma::cx_mat d = random_complex(rng, 8, 32);
  const arma::cx_mat y = random_complex(rng, 8, 2);
  double last = 1e300;
  for (double ridge : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
    const SparseSolution sol = rls_somp(y, d, ridge, 4);
    const double norm = arma::norm(sol.coeffs, "fro");
    CHECK(norm < last + 1e-12);
    last = norm;
  }
}

TEST_CASE("a single scaled atom is recovered exactly") {
  Rng rng(5);
  const arma::cx_mat d = random_complex(rng, 8, 16);
  const arma::cx_double scale(2.5, -1.0);
  const arma::cx_mat y = scale * d.col(11);
  const SparseSolution sol = rls_somp(y, d, 0.0, 1);
  REQUIRE(sol.support.n_elem == 1);
  CHECK(sol.support(0) == 11);
  CHECK(std::abs(sol.coeffs(0, 0) - scale) < 1e-10);
  CHECK(sol.residual_norm < 1e-10);
}

TEST_CASE("ties break toward the lowest atom index") {
  Rng rng(6);
  arma::cx_mat d = random_complex(rng, 6, 10);
  d.col(7) = d.col(3);  // exact duplicate
  const arma::cx_mat y = d.col(3) * arma::cx_double(1.0, 0.5);
  const SparseSolution sol = rls_somp(y, d, 0.5, 1);
  CHECK(sol.support(0) == 3);
  const SparseSolution fast = rls_somp_fast(y, d, 0.5, 1);
  CHECK(fast.support(0) == 3);
}

TEST_CASE("atom count validation") {
  Rng rng(7);
  const arma::cx_mat d = random_complex(rng, 4, 6);
  const arma::cx_mat y = random_complex(rng, 4, 1);
  CHECK_THROWS_AS(rls_somp(y, d, 1.0, 7), ConfigError);
  CHECK_THROWS_AS(rls_somp(y, d, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(rls_somp_fast(y, d, 1.0, 7), ConfigError);
  CHECK_THROWS_AS(rls_somp(random_complex(rng, 5, 1), d, 1.0, 2),
                  ConfigError);
  CHECK_THROWS_AS(rls_somp(y, d, -1.0, 2), ConfigError);
}

TEST_CASE("greedy objective never increases when the support grows") {
  Rng rng(8);
  const arma::cx_mat d = random_complex(rng, 10, 40);
  const arma::cx_mat y = random_complex(rng, 10, 3);
  for (double ridge : {0.0, 0.3, 3.0}) {
    double last = 1e300;
    for (int atoms = 1; atoms <= 8; ++atoms) {
      const SparseSolution sol = rls_somp(y, d, ridge, atoms);
      const double obj =
          ridge_objective(y, d, sol.support, sol.coeffs, ridge);
      CHECK(obj <= last + 1e-9);
      last = obj;
    }
  }
}

TEST_CASE("greedy result lies within the exhaustive bracket") {
  // Brute-force oracle over every two-atom support of a small dictionary:
  // greedy can be suboptimal, but it must never be worse than the poorest
  // two-atom support that keeps the best single atom.
  for (int rep = 0; rep < 10; ++rep) {
    Rng rng(splitmix64(9000 + rep));
    const int g = 6;
    const arma::cx_mat d = random_complex(rng, 5, g);
    const arma::cx_mat y = random_complex(rng, 5, 2);
    const double ridge = 0.4;

    double best_pair = 1e300;
    for (int a = 0; a < g; ++a)
      for (int b = a + 1; b < g; ++b) {
        const arma::uvec support{static_cast<arma::uword>(a),
                                 static_cast<arma::uword>(b)};
        const arma::cx_mat x = rls_solve(d.cols(support), y, ridge);
        best_pair =
            std::min(best_pair, ridge_objective(y, d, support, x, ridge));
      }

    const SparseSolution sol = rls_somp(y, d, ridge, 2);
    const double got =
        ridge_objective(y, d, sol.support, sol.coeffs, ridge);

    // The result is, by construction, one of the supports that contain the
    // first selected atom, so its objective is bracketed by the exhaustive
    // minimum over all pairs and the worst pair keeping that first atom.
    const arma::uword first = sol.support(0);
    double worst_extension = -1e300;
    for (int b = 0; b < g; ++b) {
      if (static_cast<arma::uword>(b) == first) continue;
      const arma::uvec support{first, static_cast<arma::uword>(b)};
      const arma::cx_mat x = rls_solve(d.cols(support), y, ridge);
      worst_extension =
          std::max(worst_extension, ridge_objective(y, d, support, x, ridge));
    }
    CHECK(got >= best_pair - 1e-9);
    CHECK(got <= worst_extension + 1e-9);
  }
}

TEST_CASE("selection matches the gradient criterion on every step") {
  // Replays the greedy loop and checks that the residual-correlation pick
  // coincides with the steepest unselected row of the full-solution
  // gradient 2 D^H (D X - Y) + 2 ridge X.
  Rng rng(10);
  for (int rep = 0; rep < 8; ++rep) {
    const int m = 8, g = 30, cols = 3, atoms = 6;
    const double ridge = rep % 2 == 0 ? 0.05 : 2.0;
    const arma::cx_mat d = random_complex(rng, m, g);
    const arma::cx_mat y = random_complex(rng, m, cols);

    arma::uvec support;
    std::vector<char> selected(g, 0);
    for (int n = 0; n < atoms; ++n) {
      arma::cx_mat full(g, cols, arma::fill::zeros);
      arma::cx_mat residual = y;
      if (n > 0) {
        const arma::cx_mat sub = d.cols(support);
        const arma::cx_mat x = rls_solve(sub, y, ridge);
        full.rows(support) = x;
        residual = y - sub * x;
      }
      const arma::cx_mat grad = 2.0 * d.t() * (d * full - y) + 2.0 * ridge * full;
      // Among unselected atoms the gradient row energy and the residual
      // correlation energy must rank identically (they differ by factor 4).
      arma::uword grad_pick = g, corr_pick = g;
      double grad_best = -1.0, corr_best = -1.0;
      for (arma::uword i = 0; i < g; ++i) {
        if (selected[i]) continue;
        const double ge = std::pow(arma::norm(grad.row(i), "fro"), 2);
        const double ce =
            std::pow(arma::norm(arma::cx_mat(d.col(i).t() * residual), "fro"), 2);
        CHECK(ge == doctest::Approx(4.0 * ce).epsilon(1e-8));
        if (ge > grad_best) {
          grad_best = ge;
          grad_pick = i;
        }
        if (ce > corr_best) {
          corr_best = ce;
          corr_pick = i;
        }
      }
      CHECK(grad_pick == corr_pick);
      const SparseSolution sol = rls_somp(y, d, ridge, n + 1);
      CHECK(sol.support(n) == corr_pick);
      support = sol.support.head(n + 1);
      for (arma::uword i = 0; i <= static_cast<arma::uword>(n); ++i)
        selected[sol.support(i)] = 1;
    }
  }
}

TEST_CASE("fast solver reproduces the naive solver exactly") {
  std::uint64_t state = 1111;
  for (int rep = 0; rep < 30; ++rep) {
    state = splitmix64(state);
    Rng rng(state);
    const int m = 4 + static_cast<int>(rng.uniform() * 28);
    const int g = m + 4 + static_cast<int>(rng.uniform() * 60);
    const int cols = 1 + static_cast<int>(rng.uniform() * 7);
    const int atoms = 1 + static_cast<int>(rng.uniform() * (m - 1));
    const double ridge =
        rep % 5 == 0 ? 0.0 : std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    const arma::cx_mat d = random_complex(rng, m, g);
    const arma::cx_mat y = random_complex(rng, m, cols);

    const SparseSolution naive = rls_somp(y, d, ridge, atoms);
    FastSompWorkspace ws;
    const SparseSolution fast = rls_somp_fast(y, d, ridge, atoms, ws);

    REQUIRE(arma::all(naive.support == fast.support));
    CHECK(arma::abs(naive.coeffs - fast.coeffs).max() < 1e-8);
    CHECK(std::abs(naive.residual_norm - fast.residual_norm) < 1e-8);
    CHECK(ws.dense_fallbacks == 0);

    // The carried inverse and basis must match their from-scratch values.
    const arma::cx_mat sub = d.cols(fast.support);
    arma::cx_mat normal = hermitian_part(sub.t() * sub);
    normal.diag() += arma::cx_double(ridge, 0.0);
    const arma::cx_mat direct = arma::inv_sympd(normal);
    CHECK(arma::abs(ws.inv - direct).max() < 1e-8);
    CHECK(arma::abs(ws.basis - sub * direct).max() < 1e-8);
    CHECK(arma::abs(ws.fitted - sub * fast.coeffs).max() < 1e-8);
  }
}

TEST_CASE("workspace reuse does not leak state between solves") {
  Rng rng(12);
  FastSompWorkspace ws;
  const arma::cx_mat d1 = random_complex(rng, 8, 24);
  const arma::cx_mat y1 = random_complex(rng, 8, 2);
  const arma::cx_mat d2 = random_complex(rng, 12, 40);
  const arma::cx_mat y2 = random_complex(rng, 12, 5);
  (void)rls_somp_fast(y1, d1, 0.7, 5, ws);
  const SparseSolution reused = rls_somp_fast(y2, d2, 0.2, 7, ws);
  const SparseSolution fresh = rls_somp_fast(y2, d2, 0.2, 7);
  REQUIRE(arma::all(reused.support == fresh.support));
  CHECK(arma::abs(reused.coeffs - fresh.coeffs).max() == 0.0);
}

TEST_CASE("precomputed Gram mode is equivalent and respects its budget") {
  Rng rng(13);
  const arma::cx_mat d = random_complex(rng, 10, 50);
  const arma::cx_mat y = random_complex(rng, 10, 3);
  FastSompWorkspace ws;
  ws.precompute_gram = true;
  const SparseSolution with_gram = rls_somp_fast(y, d, 0.9, 6, ws);
  CHECK(ws.used_full_gram);
  const SparseSolution lazy = rls_somp_fast(y, d, 0.9, 6);
  REQUIRE(arma::all(with_gram.support == lazy.support));
  CHECK(arma::abs(with_gram.coeffs - lazy.coeffs).max() < 1e-10);

  ws.gram_budget_bytes = 100;  // far below 50*50*16 bytes
  const SparseSolution capped = rls_somp_fast(y, d, 0.9, 6, ws);
  CHECK(!ws.used_full_gram);
  REQUIRE(arma::all(capped.support == lazy.support));
}

TEST_CASE("rank-deficient support falls back to a dense refactorization") {
  // Two orthonormal atoms plus their normalized sum: the third selection is
  // linearly dependent, so the rank-one pivot collapses to ~2*ridge and the
  // guard forces the dense path. The result must still fit the data.
  arma::cx_mat d(4, 3, arma::fill::zeros);
  d(0, 0) = 1.0;
  d(1, 1) = 1.0;
  d(0, 2) = M_SQRT1_2;
  d(1, 2) = M_SQRT1_2;
  arma::cx_mat y(4, 1, arma::fill::zeros);
  y(0, 0) = 3.0;
  y(1, 0) = 1.0;
  const double ridge = 1e-13;

  FastSompWorkspace ws;
  const SparseSolution fast = rls_somp_fast(y, d, ridge, 3, ws);
  CHECK(ws.dense_fallbacks == 1);
  // Any instance that trips the guard has condition around 1 / ridge, so
  // only modest fit accuracy can be demanded of it.
  const arma::cx_mat fitted = d.cols(fast.support) * fast.coeffs;
  CHECK(arma::abs(fitted - y).max() < 1e-3);

  // With exactly dependent atoms and no ridge the dense path has nothing to
  // invert and reports the failure.
  CHECK_THROWS_AS(rls_somp_fast(y, d, 0.0, 3), SolverError);
}
