#include "doctest.h"
#include "dstc/cxmat.hpp"
#include "dstc/errors.hpp"
#include "test_util.hpp"

using namespace dstc;

TEST_CASE("matmul basics") {
  CMatrix A = tu::random(2, 2);
  CHECK(tu::maxdiff(CMatrix::identity(2) * A, A) == 0.0);
  CMatrix P{{0, 1}, {1, 0}};
  CHECK(P * P == CMatrix::identity(2));
  CMatrix a = tu::random(3, 3), b = tu::random(3, 3), c = tu::random(3, 3);
  CHECK(tu::maxdiff((a * b) * c, a * (b * c)) < 1e-12);
  CHECK(tu::maxdiff(a * b, tu::naive_mul(a, b)) < 1e-13);
  CHECK_THROWS_AS(matmul(tu::random(2, 3), tu::random(2, 3)), ShapeError);
}

TEST_CASE("hermitian and transpose") {
  CHECK(hermitian(CMatrix::identity(3)) == CMatrix::identity(3));
  CMatrix j{{cd(0, 1)}};
  CHECK(hermitian(j)(0, 0) == cd(0, -1));
  CMatrix A = tu::random(4, 2);
  CHECK(hermitian(hermitian(A)) == A);
  CMatrix H = hermitian(A);
  CHECK(H.rows() == 2);
  CHECK(H(1, 3) == std::conj(A(3, 1)));
}

TEST_CASE("trace") {
  CHECK(trace(CMatrix::identity(3)) == cd(3, 0));
  CMatrix A = tu::random(3, 3);
  CHECK(std::abs(trace(A + hermitian(A)) - 2 * trace(A).real()) < 1e-12);
  for (int k = 0; k < 20; ++k) {
    CMatrix a = tu::random(2, 2), b = tu::random(2, 2), c = tu::random(2, 2);
    CHECK(std::abs(trace(a * b * c) - trace(c * a * b)) < 1e-12);
  }
  CHECK_THROWS_AS(trace(tu::random(2, 3)), ShapeError);
}

TEST_CASE("frobenius norm") {
  CHECK(frobenius_norm_sq(CMatrix::identity(2)) == 2.0);
  CHECK(frobenius_norm_sq(CMatrix::zeros(3, 3)) == 0.0);
  CMatrix A = tu::random(3, 3);
  double s = 0;
  for (auto v : A.values()) s += std::norm(v);
  CHECK(frobenius_norm_sq(A) == doctest::Approx(s).epsilon(1e-14));
  CHECK(std::abs(frobenius_norm_sq(A) - trace(hermitian(A) * A).real()) < 1e-12);
}

TEST_CASE("determinant") {
  CHECK(determinant(CMatrix::diag({2, 3})) == cd(6, 0));
  for (int k = 0; k < 200; ++k) {
    CMatrix A = tu::random(2, 3), B = tu::random(3, 2);
    cd l = determinant(CMatrix::identity(2) + A * B), r = determinant(CMatrix::identity(3) + B * A);
    CHECK(std::abs(l - r) <= 1e-9 * std::max(1.0, std::abs(l)));
  }
  CHECK(std::abs(std::abs(determinant(tu::random_unitary(4))) - 1.0) < 1e-12);
  // cofactor expansion oracle on 3x3
  CMatrix m = tu::random(3, 3);
  cd cof = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  CHECK(std::abs(determinant(m) - cof) < 1e-12);
  CHECK_THROWS_AS(determinant(tu::random(2, 3)), ShapeError);
}

TEST_CASE("rank") {
  CHECK(rank(CMatrix::diag({1, 0})) == 1);
  CHECK(rank(CMatrix::zeros(2, 2)) == 0);
  // rank-2 4x3 from two outer products
  CMatrix A = tu::random(4, 1) * tu::random(1, 3) + tu::random(4, 1) * tu::random(1, 3);
  CHECK(rank(A) == 2);
  CHECK(rank(hermitian(A) * A) == 2);
  CHECK(rank(tu::random(4, 4) * A * tu::random(3, 3)) == 2);
  CHECK(rank(tu::random(3, 5)) == 3);
}

TEST_CASE("eig_hermitian") {
  auto e = eig_hermitian(CMatrix::identity(3));
  REQUIRE(e.size() == 3);
  for (double v : e) CHECK(v == doctest::Approx(1.0));
  e = eig_hermitian(CMatrix::diag({1, 4}));
  CHECK(e[0] == doctest::Approx(4.0));
  CHECK(e[1] == doctest::Approx(1.0));
  for (int k = 0; k < 50; ++k) {
    CMatrix A = tu::random(3, 3);
    CMatrix G = hermitian(A) * A;
    auto ev = eig_hermitian(G);
    auto sv = singular_values(A);
    double sum = 0, prod = 1;
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(ev[i] - sv[i] * sv[i]) < 1e-9 * std::max(1.0, ev[0]));
      sum += ev[i];
      prod *= ev[i];
    }
    CHECK(sum == doctest::Approx(frobenius_norm_sq(A)).epsilon(1e-9));
    CHECK(prod == doctest::Approx(determinant(G).real()).epsilon(1e-9));
    CHECK(ev[0] >= ev[1]);
    CHECK(ev[1] >= ev[2]);
  }
  CHECK_THROWS_AS(eig_hermitian(CMatrix{{1, 2}, {0, 1}}), ContractError);
}

TEST_CASE("singular values") {
  auto s = singular_values(CMatrix::identity(2));
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.0));
  s = singular_values(CMatrix::diag({3, 0}));
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(0.0));
  CMatrix U = tu::random_unitary(4), V = tu::random_unitary(4);
  CMatrix M = U * CMatrix::diag({5, 2, 1, 0.5}) * hermitian(V);
  s = singular_values(M);
  CHECK(s[0] == doctest::Approx(5).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(2).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(1).epsilon(1e-12));
  CHECK(s[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(singular_values(tu::random(2, 5)).size() == 2);
}

TEST_CASE("inverse") {
  CHECK(tu::maxdiff(inverse(CMatrix::identity(4)), CMatrix::identity(4)) == 0.0);
  CHECK(tu::maxdiff(inverse(CMatrix::diag({2, 4})), CMatrix::diag({0.5, 0.25})) < 1e-15);
  for (int k = 0; k < 20; ++k) {
    CMatrix A = tu::random(3, 3);
    CHECK(tu::maxdiff(inverse(A) * A, CMatrix::identity(3)) < 1e-9);
  }
  CHECK_THROWS_AS(inverse(CMatrix{{1, 2}, {2, 4}}), SingularityError);
  CHECK_THROWS_AS(inverse(CMatrix{{1, 0}, {0, 1e-14}}), SingularityError);
}

TEST_CASE("cholesky tolerates semidefinite input") {
  CMatrix A = tu::random(3, 3);
  CMatrix P = A * hermitian(A);
  CMatrix L = cholesky(P, 0.0);
  CHECK(tu::maxdiff(L * hermitian(L), P) < 1e-10);
  CMatrix ones(3, 3);
  for (auto i = 0; i < 3; ++i)
    for (auto j = 0; j < 3; ++j) ones(i, j) = 1.0;
  L = cholesky(ones);
  CHECK(tu::maxdiff(L * hermitian(L), ones) < 1e-6);
}

TEST_CASE("block helpers and scaled unitary") {
  CMatrix a = tu::random(2, 2), b = tu::random(2, 2);
  CMatrix bd = blockdiag(a, b);
  CHECK(bd(0, 2) == cd(0));
  CHECK(bd(3, 3) == b(1, 1));
  CMatrix m = blocks2x2(a, b, b, a);
  CHECK(m.block(2, 0, 2, 2) == b);
  CHECK(vstack(a, b).rows() == 4);
  double s2 = 0;
  CHECK(is_scaled_unitary(2.0 * tu::random_unitary(3), s2));
  CHECK(s2 == doctest::Approx(4.0));
  CHECK_FALSE(is_scaled_unitary(tu::random(3, 3), s2));
  CHECK(is_hermitian(a + hermitian(a)));
}
