#pragma once
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dstc/cxmat.hpp"

namespace tu {

using dstc::cd;
using dstc::CMatrix;

inline std::mt19937_64& gen() {
  static std::mt19937_64 g(12345);
  return g;
}

inline cd rnd_cd() {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(gen()), n(gen())};
}

inline CMatrix random(std::size_t r, std::size_t c) {
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rnd_cd();
  return m;
}

// Gram-Schmidt on a random square matrix
inline CMatrix random_unitary(std::size_t n) {
  CMatrix a = random(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cd d = 0;
      for (std::size_t i = 0; i < n; ++i) d += std::conj(a(i, k)) * a(i, j);
      for (std::size_t i = 0; i < n; ++i) a(i, j) -= d * a(i, k);
    }
    double nn = 0;
    for (std::size_t i = 0; i < n; ++i) nn += std::norm(a(i, j));
    nn = std::sqrt(nn);
    for (std::size_t i = 0; i < n; ++i) a(i, j) /= nn;
  }
  return a;
}

// naive triple loop, independent of the library product
inline CMatrix naive_mul(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cd s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline double maxdiff(const CMatrix& a, const CMatrix& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

// I0 by its power series, sum (z/2)^{2k}/(k!)^2
inline double i0_series(double z) {
  double term = 1, sum = 1;
  for (int k = 1; k < 500; ++k) {
    term *= (z / 2) * (z / 2) / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// J0 by its power series, fine for small arguments
inline double j0_series(double x) {
  double term = 1, sum = 1;
  for (int k = 1; k < 200; ++k) {
    term *= -(x / 2) * (x / 2) / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

}  // namespace tu
