#pragma once
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace dstc {

using cd = std::complex<double>;

namespace tol {
inline constexpr double rank_rel = 1e-9;        // singular values below rank_rel*smax count as zero
inline constexpr double hermitian = 1e-10;      // eig_hermitian input check
inline constexpr double max_condition = 1e12;   // inverse() refuses beyond this
inline constexpr double cholesky_jitter = 1e-12;
inline constexpr double unitary = 1e-10;
inline constexpr int jacobi_sweeps = 100;
}  // namespace tol

// dense row-major complex matrix
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> data);
  CMatrix(std::initializer_list<std::initializer_list<cd>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
  static CMatrix diag(const std::vector<cd>& d);
  static CMatrix column(const std::vector<cd>& v);

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  bool square() const { return r_ == c_; }
  bool empty() const { return d_.empty(); }

  cd& operator()(std::size_t i, std::size_t j) { return d_[i * c_ + j]; }
  const cd& operator()(std::size_t i, std::size_t j) const { return d_[i * c_ + j]; }
  cd* data() { return d_.data(); }
  const cd* data() const { return d_.data(); }
  const std::vector<cd>& values() const { return d_; }

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cd s);
  CMatrix& operator/=(cd s) { return *this *= (1.0 / s); }

  bool operator==(const CMatrix& o) const { return r_ == o.r_ && c_ == o.c_ && d_ == o.d_; }
  bool operator!=(const CMatrix& o) const { return !(*this == o); }

  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<cd> d_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a);
CMatrix operator*(CMatrix a, cd s);
CMatrix operator*(cd s, CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);

CMatrix matmul(const CMatrix& a, const CMatrix& b);
CMatrix hermitian(const CMatrix& a);
CMatrix transpose(const CMatrix& a);
CMatrix conj(const CMatrix& a);
cd trace(const CMatrix& a);
double frobenius_norm_sq(const CMatrix& a);
cd determinant(const CMatrix& a);
// singular values above tol*smax
int rank(const CMatrix& a, double rel_tol = tol::rank_rel);
// descending
std::vector<double> eig_hermitian(const CMatrix& a);
std::vector<double> singular_values(const CMatrix& a);
CMatrix inverse(const CMatrix& a);
// lower-triangular L with L L^H = a + jitter*I; tolerates semidefinite input
CMatrix cholesky(const CMatrix& a, double jitter = tol::cholesky_jitter);

CMatrix blockdiag(const CMatrix& a, const CMatrix& b);
// [[a, b], [c, d]]
CMatrix blocks2x2(const CMatrix& a, const CMatrix& b, const CMatrix& c, const CMatrix& d);
CMatrix vstack(const CMatrix& a, const CMatrix& b);

bool is_hermitian(const CMatrix& a, double eps = tol::hermitian);
bool is_scaled_unitary(const CMatrix& a, double& scale2, double eps = tol::unitary);
double max_abs_diff(const CMatrix& a, const CMatrix& b);

}  // namespace dstc
