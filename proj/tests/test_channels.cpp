#include <cmath>

#include "doctest.h"
#include "dstc/channels.hpp"
#include "dstc/errors.hpp"
#include "test_util.hpp"

using namespace dstc;

TEST_CASE("jakes correlation") {
  CHECK(jakes_phi(0, 0.02) == 1.0);
  CHECK(jakes_phi(3, 0.0) == 1.0);
  double x = 2 * M_PI * 0.02;
  CHECK(std::abs(jakes_phi(1, 0.02) - tu::j0_series(x)) < 1e-10);
  CHECK(jakes_phi(1, 0.02) == doctest::Approx(0.99606).epsilon(1e-5));
  for (int m = 1; m < 40; ++m) CHECK(std::abs(jakes_phi(m, 0.05) - tu::j0_series(2 * M_PI * m * 0.05)) < 1e-10);
  CHECK(jakes_phi(-2, 0.02) == jakes_phi(2, 0.02));
  CHECK_THROWS_AS(jakes_phi(1, 1.5), ParameterError);
}

TEST_CASE("rff covariance") {
  auto c0 = rff_covariance(4, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(c0(i, j) == cd(1.0));
  auto c = rff_covariance(5, 0.02);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      CHECK(c(i, j) == c(j, i));
      if (i > 0 && j > 0) CHECK(c(i, j) == c(i - 1, j - 1));
    }
  for (int i = 0; i < 5; ++i) CHECK(c(i, i) == cd(1.0));
  auto c2 = rff_covariance(2, 0.02);
  CHECK(c2(0, 1).real() == doctest::Approx(0.99606).epsilon(1e-5));
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(5, 9), b(5, 9), c(5, 10);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differ |= x != c.next_u64();
  }
  CHECK(differ);
  RngStream u(1, 0);
  double s = 0;
  for (int i = 0; i < 100000; ++i) {
    double v = u.uniform();
    CHECK((v > 0 && v < 1));
    s += v;
  }
  CHECK(s / 1e5 == doctest::Approx(0.5).epsilon(0.01));
  RngStream k(2, 0);
  std::vector<int> hist(6);
  for (int i = 0; i < 60000; ++i) hist[k.below(6)]++;
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("channel draws") {
  RngStream rng(11, 0);
  for (int i = 0; i < 100; ++i) {
    auto ch = draw_channel({ChannelKind::AWGN_PHASE, 0, 150}, 1, 1, 1, rng);
    CHECK(std::abs(std::abs(ch.H(0, 0)) - 1.0) < 1e-15);
  }
  double v = 0;
  int n = 100000;
  for (int i = 0; i < n; ++i) v += std::norm(draw_channel({}, 1, 1, 1, rng).H(0, 0));
  CHECK(std::abs(v / n - 1) < 0.02);

  // lag-1 correlation of the fast-fading gains
  cd corr = 0;
  double p = 0, p1 = 0;
  ChannelModel rff{ChannelKind::RFF, 0.02, 150};
  for (int i = 0; i < n; ++i) {
    auto ch = draw_channel(rff, 1, 1, 2, rng);
    corr += ch.h_t[1] * std::conj(ch.h_t[0]);
    p += std::norm(ch.h_t[0]);
    p1 += std::norm(ch.h_t[1]);
  }
  CHECK(std::abs(corr.real() / std::sqrt(p * p1) - 0.996) < 0.005);
  CHECK(std::abs(p / n - 1) < 0.02);
  CHECK_THROWS_AS(draw_channel(rff, 2, 1, 2, rng), UnsupportedError);
}

TEST_CASE("transmit") {
  RngStream rng(3, 0);
  CMatrix S = tu::random(4, 2);
  ChannelRealization ch;
  ch.kind = ChannelKind::RBF;
  ch.H = CMatrix::identity(2);
  auto Y = transmit(S, ch, 4.0, rng, false);
  CHECK(max_abs_diff(Y, 2.0 * S) == 0.0);

  // S = 0 gives the noise itself, and reproducibly so
  CMatrix Z(3, 2);
  RngStream r1(8, 1), r2(8, 1);
  auto W = transmit(Z, ch, 4.0, r1);
  CMatrix Wref(3, 2);
  for (std::size_t k = 0; k < 6; ++k) Wref.data()[k] = r2.cn();
  CHECK(max_abs_diff(W, Wref) == 0.0);

  // rho = 0: unit noise power per entry
  double e = 0;
  int n = 100000;
  CMatrix S1 = tu::random(2, 2);
  for (int i = 0; i < n; ++i) e += frobenius_norm_sq(transmit(S1, ch, 0.0, rng));
  CHECK(std::abs(e / (n * 4.0) - 1) < 0.02);
  CHECK_THROWS_AS(transmit(tu::random(2, 3), ch, 1.0, rng), ShapeError);
  CHECK_THROWS_AS(transmit(S1, ch, -1.0, rng), ParameterError);
}
