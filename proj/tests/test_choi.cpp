#include "doctest.h"
#include "opsysindex/choi.hpp"
#include "test_util.hpp"

using namespace opsys;

TEST_CASE("identity map") {
  MatrixMap id = identity_map(2);
  CHECK((id.choi - choi_of_identity(2)).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 rng(2);
  CMat x = testutil::random_complex(2, 2, rng);
  CHECK((apply_map(id, x) - x).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(is_cp(id));
}

TEST_CASE("transpose map acts correctly and is not CP") {
  MatrixMap t = transpose_map(3);
  std::mt19937_64 rng(9);
  CMat x = testutil::random_complex(3, 3, rng);
  CHECK((apply_map(t, x) - x.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(!is_cp(t));
  CHECK(lambda_min(t.choi) == doctest::Approx(-1.0));
}

TEST_CASE("schur multipliers") {
  // all-ones mask is the identity map
  MatrixMap ones = schur_multiplier(ones_matrix(2));
  CHECK((ones.choi - choi_of_identity(2)).cwiseAbs().maxCoeff() < 1e-15);

  CMat a(2, 2);
  a << 1.0, 0.5, 0.5, 1.0;
  MatrixMap ma = schur_multiplier(a);
  CHECK(is_cp(ma));  // PSD mask => CP
  std::mt19937_64 rng(4);
  CMat x = testutil::random_hermitian(2, rng);
  CMat y = apply_map(ma, x);
  CHECK(y(0, 1) == x(0, 1) * 0.5);
  CHECK(y(0, 0) == x(0, 0));

  CMat bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // not PSD
  CHECK(!is_cp(schur_multiplier(bad)));
}

TEST_CASE("trace-pairing adjoint") {
  std::mt19937_64 rng(13);
  // a generic linear map out of random unit images
  std::vector<CMat> img;
  for (int k = 0; k < 9; ++k) img.push_back(testutil::random_complex(2, 2, rng));
  MatrixMap phi = map_from_action(3, 2, [&](int i, int j) { return img[size_t(3 * i + j)]; });
  MatrixMap psi = dual_map(phi);
  CHECK(psi.in_dim == 2);
  CHECK(psi.out_dim == 3);
  for (int rep = 0; rep < 3; ++rep) {
    CMat x = testutil::random_complex(3, 3, rng);
    CMat y = testutil::random_complex(2, 2, rng);
    Cplx lhs = (apply_map(phi, x) * y).trace();
    Cplx rhs = (x * apply_map(psi, y)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  // involution
  MatrixMap back = dual_map(psi);
  CHECK((back.choi - phi.choi).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("entrywise expectation matrix of a CP map") {
  CMat a(2, 2);
  a << 2.0, Cplx(0.3, 0.1), Cplx(0.3, -0.1), 1.0;
  REQUIRE(lambda_min(a) > 0);
  MatrixMap ma = schur_multiplier(a);
  CHECK((choi_expectation(ma) - a).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(choi_expectation(transpose_map(2)), std::invalid_argument);

  // identity map: expectation matrix is all ones
  CHECK((choi_expectation(identity_map(3)) - ones_matrix(3)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("map composition through choi matrices stays consistent") {
  std::mt19937_64 rng(17);
  MatrixMap phi = map_from_function(2, 2, [](const CMat& x) {
    CMat u(2, 2);
    u << 0, 1, 1, 0;
    return CMat(u * x * u.adjoint());
  });
  CHECK(is_cp(phi));
  CMat x = testutil::random_hermitian(2, rng);
  CHECK(apply_map(phi, x)(0, 0) == x(1, 1));
}
