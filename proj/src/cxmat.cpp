#include "dstc/cxmat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dstc/errors.hpp"

namespace dstc {

namespace {
std::string dims(const CMatrix& a) { return std::to_string(a.rows()) + "x" + std::to_string(a.cols()); }

void require_square(const CMatrix& a, const char* op) {
  if (!a.square()) throw ShapeError(std::string(op) + ": matrix is " + dims(a) + ", expected square");
}

void require_same(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": " + dims(a) + " vs " + dims(b));
}

double norm1(const CMatrix& a) {
  double best = 0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// rotation that zeroes the (p,q) entry of a Hermitian pair block
struct Rot {
  double c, s;
  cd e;  // phase of the off-diagonal entry
  bool skip;
};

Rot jacobi_rotation(double app, double aqq, cd apq) {
  double g = std::abs(apq);
  if (g == 0.0) return {1, 0, 1, true};
  cd e = apq / g;
  double tau = (aqq - app) / (2 * g);
  double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
  double c = 1 / std::sqrt(1 + t * t);
  return {c, t * c, e, false};
}
}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), d_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> data)
    : r_(rows), c_(cols), d_(std::move(data)) {
  if (d_.size() != r_ * c_) throw ShapeError("CMatrix: data length does not match " + dims(*this));
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cd>> rows) {
  r_ = rows.size();
  c_ = r_ ? rows.begin()->size() : 0;
  d_.reserve(r_ * c_);
  for (auto& row : rows) {
    if (row.size() != c_) throw ShapeError("CMatrix: ragged initializer");
    d_.insert(d_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diag(const std::vector<cd>& d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::column(const std::vector<cd>& v) { return CMatrix(v.size(), 1, v); }

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same(*this, o, "add");
  for (std::size_t k = 0; k < d_.size(); ++k) d_[k] += o.d_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same(*this, o, "sub");
  for (std::size_t k = 0; k < d_.size(); ++k) d_[k] -= o.d_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cd s) {
  for (auto& x : d_) x *= s;
  return *this;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > r_ || c0 + nc > c_) throw ShapeError("block: out of range of " + dims(*this));
  CMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
  if (r0 + b.rows() > r_ || c0 + b.cols() > c_) throw ShapeError("set_block: out of range of " + dims(*this));
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }
CMatrix operator*(CMatrix a, cd s) { return a *= s; }
CMatrix operator*(cd s, CMatrix a) { return a *= s; }
CMatrix operator*(const CMatrix& a, const CMatrix& b) { return matmul(a, b); }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: " + dims(a) + " times " + dims(b));
  CMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      cd aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

CMatrix hermitian(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = std::conj(a(i, j));
  return r;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

CMatrix conj(const CMatrix& a) {
  CMatrix r = a;
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) r.data()[k] = std::conj(a.data()[k]);
  return r;
}

cd trace(const CMatrix& a) {
  require_square(a, "trace");
  cd s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

double frobenius_norm_sq(const CMatrix& a) {
  double s = 0;
  for (const auto& x : a.values()) s += std::norm(x);
  return s;
}

cd determinant(const CMatrix& a) {
  require_square(a, "determinant");
  const std::size_t n = a.rows();
  CMatrix m = a;
  cd det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      cd f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

std::vector<double> eig_hermitian(const CMatrix& a) {
  require_square(a, "eig_hermitian");
  if (!is_hermitian(a)) throw ContractError("eig_hermitian: input is not Hermitian");
  const std::size_t n = a.rows();
  CMatrix m = a;
  for (std::size_t i = 0; i < n; ++i) m(i, i) = m(i, i).real();
  double scale = std::sqrt(frobenius_norm_sq(m));
  for (int sweep = 0; sweep < tol::jacobi_sweeps; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(m(p, q));
    if (std::sqrt(off) <= 1e-300 || std::sqrt(off) <= 1e-17 * scale) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        Rot r = jacobi_rotation(m(p, p).real(), m(q, q).real(), m(p, q));
        if (r.skip) continue;
        // J = [[c, s], [-s*conj(e), c*conj(e)]] on (p,q); m <- J^H m J
        cd ec = std::conj(r.e);
        for (std::size_t k = 0; k < n; ++k) {  // columns
          cd mp = m(k, p), mq = m(k, q);
          m(k, p) = r.c * mp - r.s * ec * mq;
          m(k, q) = r.s * mp + r.c * ec * mq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // rows
          cd mp = m(p, k), mq = m(q, k);
          m(p, k) = r.c * mp - r.s * r.e * mq;
          m(q, k) = r.s * mp + r.c * r.e * mq;
        }
        m(p, q) = 0;
        m(q, p) = 0;
        m(p, p) = m(p, p).real();
        m(q, q) = m(q, q).real();
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i).real();
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> singular_values(const CMatrix& a_in) {
  // one-sided Jacobi on the columns of the taller orientation
  CMatrix a = a_in.rows() >= a_in.cols() ? a_in : hermitian(a_in);
  const std::size_t m = a.rows(), n = a.cols();
  for (int sweep = 0; sweep < tol::jacobi_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0;
        cd gamma = 0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += std::norm(a(k, p));
          beta += std::norm(a(k, q));
          gamma += std::conj(a(k, p)) * a(k, q);
        }
        if (std::abs(gamma) <= 1e-16 * std::sqrt(alpha * beta) || std::abs(gamma) == 0.0) continue;
        rotated = true;
        Rot r = jacobi_rotation(alpha, beta, gamma);
        cd ec = std::conj(r.e);
        for (std::size_t k = 0; k < m; ++k) {
          cd ap = a(k, p), aq = a(k, q);
          a(k, p) = r.c * ap - r.s * ec * aq;
          a(k, q) = r.s * ap + r.c * ec * aq;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t k = 0; k < m; ++k) s += std::norm(a(k, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

int rank(const CMatrix& a, double rel_tol) {
  if (rel_tol < 0) throw ParameterError("rank: negative tolerance");
  if (a.empty()) return 0;
  auto sv = singular_values(a);
  if (sv.empty() || sv[0] == 0.0) return 0;
  int r = 0;
  for (double s : sv)
    if (s > rel_tol * sv[0]) ++r;
  return r;
}

CMatrix inverse(const CMatrix& a) {
  require_square(a, "inverse");
  const std::size_t n = a.rows();
  CMatrix m = a, inv = CMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) throw SingularityError("inverse: matrix is singular");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    cd d = 1.0 / m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) *= d;
      inv(k, j) *= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0.0) continue;
      cd f = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  double cond = norm1(a) * norm1(inv);
  if (!std::isfinite(cond) || cond > tol::max_condition)
    throw SingularityError("inverse: condition estimate " + std::to_string(cond) + " exceeds limit");
  return inv;
}

CMatrix cholesky(const CMatrix& a, double jitter) {
  require_square(a, "cholesky");
  const std::size_t n = a.rows();
  CMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real() + jitter;
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (d <= 0) continue;  // semidefinite direction: leave column zero
    double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cd s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

CMatrix blockdiag(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

CMatrix blocks2x2(const CMatrix& a, const CMatrix& b, const CMatrix& c, const CMatrix& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols())
    throw ShapeError("blocks2x2: incompatible blocks");
  CMatrix r(a.rows() + c.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  r.set_block(a.rows(), 0, c);
  r.set_block(a.rows(), a.cols(), d);
  return r;
}

CMatrix vstack(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("vstack: " + dims(a) + " over " + dims(b));
  CMatrix r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

bool is_hermitian(const CMatrix& a, double eps) {
  if (!a.square()) return false;
  double scale = std::max(1.0, std::sqrt(frobenius_norm_sq(a)));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > eps * scale) return false;
  return true;
}

bool is_scaled_unitary(const CMatrix& a, double& scale2, double eps) {
  if (!a.square()) return false;
  CMatrix g = hermitian(a) * a;
  scale2 = trace(g).real() / static_cast<double>(a.rows());
  double ref = std::max(1.0, scale2);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      cd want = i == j ? cd(scale2) : cd(0);
      if (std::abs(g(i, j) - want) > eps * ref) return false;
    }
  return true;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same(a, b, "max_abs_diff");
  double m = 0;
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace dstc
