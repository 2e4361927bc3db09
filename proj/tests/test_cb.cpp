#include "opsysindex/cb.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace opsys;
using testutil::random_complex;
using testutil::random_psd;

namespace {

// x |-> c tr(x)/n * I on the full matrix space.
SubspaceMap scaled_trace_map(int n, double c) {
  SubspaceMap u;
  u.domain = full_matrix_space(n);
  u.out_dim = n;
  for (const CMat& b : u.domain.basis)
    u.images.push_back(CMat(c * b.trace() / double(n) * CMat::Identity(n, n)));
  return u;
}

SubspaceMap transpose_map(int n) {
  SubspaceMap u;
  u.domain = full_matrix_space(n);
  u.out_dim = n;
  for (const CMat& b : u.domain.basis) u.images.push_back(b.transpose());
  return u;
}

SubspaceMap entrywise_product_map(const CMat& a) {
  const int n = int(a.rows());
  SubspaceMap u;
  u.domain = full_matrix_space(n);
  u.out_dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      u.images.push_back(CMat(a(i, j) * matrix_unit(n, i, j)));
  return u;
}

SubspaceMap random_map(int n, std::mt19937_64& rng) {
  SubspaceMap u;
  u.domain = full_matrix_space(n);
  u.out_dim = n;
  for (int k = 0; k < n * n; ++k) u.images.push_back(random_complex(n, n, rng));
  return u;
}

SubspaceMap combine(const SubspaceMap& u, const SubspaceMap& v, Cplx alpha, Cplx beta) {
  SubspaceMap w = u;
  for (size_t k = 0; k < w.images.size(); ++k)
    w.images[k] = alpha * u.images[k] + beta * v.images[k];
  return w;
}

SubspaceMap minus_lambda_identity(const SubspaceMap& u, double lambda) {
  SubspaceMap w = u;
  for (size_t k = 0; k < w.images.size(); ++k)
    w.images[k] -= lambda * u.domain.basis[k];
  return w;
}

}  // namespace

TEST_CASE("operator subspaces validate their bases") {
  CHECK(full_matrix_space(2).dim() == 4);
  CHECK(full_matrix_space(3).dim() == 9);
  CHECK(scalar_matrix_space(3).dim() == 1);

  // Dependent spanning sets are rejected.
  std::vector<CMat> dep = {CMat::Identity(2, 2), 2.0 * CMat::Identity(2, 2)};
  CHECK_THROWS_AS(operator_subspace(2, dep), std::invalid_argument);

  SubspaceMap bad;
  bad.domain = scalar_matrix_space(2);
  bad.out_dim = 2;
  bad.images = {CMat::Identity(3, 3)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("cb norm of the identity map is one") {
  const double v = cb_norm(identity_map(full_matrix_space(2)));
  CHECK(std::abs(v - 1.0) <= 1e-7);
}

TEST_CASE("cb norm of the transpose map on two-by-two matrices is two") {
  const double v = cb_norm(transpose_map(2));
  CHECK(std::abs(v - 2.0) <= 1e-5);
}

TEST_CASE("cb norm of an entrywise multiplier by a PSD matrix is its largest diagonal entry") {
  std::mt19937_64 rng(501);
  for (int trial = 0; trial < 2; ++trial) {
    const CMat a = random_psd(3, rng);
    const double v = cb_norm(entrywise_product_map(a));
    CHECK(std::abs(v - a.diagonal().real().maxCoeff()) <= 1e-6);
  }
}

TEST_CASE("cb norm is subadditive and absolutely homogeneous") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const SubspaceMap u = random_map(2, rng);
    const SubspaceMap v = random_map(2, rng);
    const double nu = cb_norm(u);
    const double nv = cb_norm(v);
    const double nsum = cb_norm(combine(u, v, 1.0, 1.0));
    CHECK(nsum <= nu + nv + 1e-6);
    const Cplx alpha(-1.3, 0.4);
    const double nscaled = cb_norm(combine(u, u, alpha, 0.0));
    CHECK(std::abs(nscaled - std::abs(alpha) * nu) <= 1e-6 * (1.0 + nu));
  }
}

TEST_CASE("cb norm of the zero map is zero and the zero map is never an index witness") {
  SubspaceMap z = scaled_trace_map(2, 0.0);
  CHECK(cb_norm(z) == 0.0);
  // ||0 - id|| = 1 exceeds ||0|| - 1, so the defining constraint fails.
  const double dist = cb_norm(minus_lambda_identity(z, 1.0));
  CHECK(std::abs(dist - 1.0) <= 1e-6);
  CHECK(dist > cb_norm(z) - 1.0 + 1e-6);
}

TEST_CASE("corner-scaled trace maps have known norms and distances to the identity") {
  // x |-> c tr(x)/2 on M_2: the norm is c; the distance to the identity is
  // 2 at c = 2 (the difference is a conjugated transpose) and c - 1 for c >= 4.
  CHECK(std::abs(cb_norm(scaled_trace_map(2, 2.0)) - 2.0) <= 1e-5);
  CHECK(std::abs(cb_norm(minus_lambda_identity(scaled_trace_map(2, 2.0), 1.0)) - 2.0) <= 1e-5);
  CHECK(std::abs(cb_norm(scaled_trace_map(2, 4.0)) - 4.0) <= 1e-5);
  CHECK(std::abs(cb_norm(minus_lambda_identity(scaled_trace_map(2, 4.0), 1.0)) - 3.0) <= 1e-5);
}

TEST_CASE("index witnesses over the scalars: the doubled trace map fails, the quadrupled one works") {
  // u = 2 tr(.)/2 * I has ||u|| = 2 but ||u - id|| = 2 > ||u|| - 1: infeasible.
  const double d2 = cb_norm(minus_lambda_identity(scaled_trace_map(2, 2.0), 1.0));
  CHECK(d2 > cb_norm(scaled_trace_map(2, 2.0)) - 1.0 + 1e-6);
  // u = 4 tr(.)/2 * I has ||u|| = 4 and ||u - id|| = 3 = ||u|| - 1: feasible.
  const double d4 = cb_norm(minus_lambda_identity(scaled_trace_map(2, 4.0), 1.0));
  CHECK(d4 <= cb_norm(scaled_trace_map(2, 4.0)) - 1.0 + 1e-6);
}

TEST_CASE("dc search returns the identity for a trivial inclusion") {
  const OperatorSubspace x = full_matrix_space(2);
  const CbIndexReport rep = cb_index_dc(x, x, 2, 11);
  REQUIRE(rep.feasible);
  CHECK(rep.value >= 1.0 - 1e-6);
  CHECK(rep.value <= 1.0 + 1e-4);
  // Independent re-verification of the reported witness.
  const double wn = cb_norm(rep.witness);
  const double wd = cb_norm(minus_lambda_identity(rep.witness, 1.0));
  CHECK(std::abs(wn - rep.witness_norm) <= 1e-7);
  CHECK(wd <= wn - 1.0 + 1e-6);
}

TEST_CASE("dc search over the scalars inside two-by-two matrices finds a certified witness") {
  const CbIndexReport rep = cb_index_dc(full_matrix_space(2), scalar_matrix_space(2), 2, 7);
  REQUIRE(rep.feasible);
  MESSAGE("scalar inclusion upper bound: ", rep.value);
  CHECK(rep.value >= 1.0 + 1e-3);   // the inclusion is proper, so 1 is unreachable
  CHECK(rep.value <= 4.0 + 1e-3);   // the quadrupled trace map certifies 4
  const double wn = cb_norm(rep.witness);
  const double wd = cb_norm(minus_lambda_identity(rep.witness, 1.0));
  CHECK(wd <= wn - 1.0 + 1e-6);
  CHECK(std::abs(wn - rep.value) <= 1e-6 * (1.0 + rep.value));
  for (double rv : rep.restart_values)
    if (rv > 0.0) CHECK(rv >= rep.value - 1e-9);
}

TEST_CASE("dc search rejects bad inclusions") {
  CHECK_THROWS_AS(cb_index_dc(scalar_matrix_space(2), full_matrix_space(2), 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cb_index_dc(full_matrix_space(2), scalar_matrix_space(3), 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(cb_index_dc(full_matrix_space(2), full_matrix_space(2), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("dc search is deterministic for a fixed seed") {
  const CbIndexReport a = cb_index_dc(full_matrix_space(2), scalar_matrix_space(2), 2, 13);
  const CbIndexReport b = cb_index_dc(full_matrix_space(2), scalar_matrix_space(2), 2, 13);
  CHECK(a.feasible == b.feasible);
  CHECK(a.value == b.value);
  CHECK(a.restart_values == b.restart_values);
}

TEST_CASE("fixed-scale corner feasibility matches the computed cb norm") {
  // A norm-one witness: half the transpose map on M_2.
  SubspaceMap u = transpose_map(2);
  for (CMat& y : u.images) y *= 0.5;
  REQUIRE(std::abs(cb_norm(u) - 1.0) <= 1e-6);
  for (double lambda : {0.1, 0.5, 0.9}) {
    const SubspaceMap v = minus_lambda_identity(u, lambda);
    const double nv = cb_norm(v);
    // Any norm-one map stays at distance at least 1 - lambda from lambda id.
    CHECK(nv >= 1.0 - lambda - 1e-6);
    // The fixed-scale extension problem flips from infeasible to feasible at
    // the computed norm.
    CHECK(paulsen_cp_feasible(v, nv + 0.05));
    CHECK_FALSE(paulsen_cp_feasible(v, nv - 0.05));
    // Consistency against the budget 1 - lambda whenever the value is safely
    // off the feasibility boundary.
    const double budget = 1.0 - lambda;
    if (std::abs(nv - budget) > 1e-3)
      CHECK(paulsen_cp_feasible(v, budget) == (nv <= budget));
  }
}

TEST_CASE("bounded index of the constants in the n-point sup-norm space is n") {
  for (int n = 2; n <= 6; ++n) CHECK(std::abs(bounded_index_linf(n) - double(n)) <= 1e-9);
  CHECK_THROWS_AS(bounded_index_linf(1), std::invalid_argument);
}

TEST_CASE("sup-norm coefficient family evaluators") {
  // c = (1,...,1) is the boundary witness: norm n, distance n - 1.
  for (int n = 2; n <= 5; ++n) {
    const RVec ones = RVec::Constant(n, 1.0);
    CHECK(linf_functional_norm(ones) == double(n));
    CHECK(linf_functional_minus_id_norm(ones) == double(n - 1));
    // Slightly shrunk coefficients violate the defining constraint.
    const RVec shrunk = RVec::Constant(n, 0.999);
    CHECK(linf_functional_minus_id_norm(shrunk) >
          linf_functional_norm(shrunk) - 1.0 + 1e-9);
  }
  // The zero functional sits at distance one from the identity.
  CHECK(linf_functional_minus_id_norm(RVec::Zero(3)) == 1.0);
}
