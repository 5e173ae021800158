#include "dstc/diff_stbc.hpp"

#include <cmath>
#include <string>

#include "dstc/errors.hpp"

namespace dstc {

namespace {
constexpr long kJointGuard = 1L << 16;

void check_blocks(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code) {
  if (Y_prev.rows() != static_cast<std::size_t>(code.T) || Y_cur.rows() != Y_prev.rows() ||
      Y_cur.cols() != Y_prev.cols())
    throw ShapeError("received blocks must both be T x N with T = " + std::to_string(code.T));
}

void check_alphabets(const STCode& code, const Alphabets& alph) {
  if (static_cast<int>(alph.size()) != code.K)
    throw ParameterError("need " + std::to_string(code.K) + " alphabets, got " + std::to_string(alph.size()));
}

template <class F>
int argmax_points(const Constellation& c, F f) {
  int arg = 0;
  double best = -INFINITY;
  for (int k = 0; k < c.size(); ++k) {
    double m = f(c.points[k]);
    if (m > best) {
      best = m;
      arg = k;
    }
  }
  return arg;
}

int argmax_pam(const std::vector<double>& pam, double w, double c) {
  int arg = 0;
  double best = -INFINITY;
  for (std::size_t k = 0; k < pam.size(); ++k) {
    double m = w * pam[k] - c * pam[k] * pam[k];
    if (m > best) {
      best = m;
      arg = static_cast<int>(k);
    }
  }
  return arg;
}
}  // namespace

Alphabets same_alphabet(const STCode& code, const Constellation& c) { return Alphabets(code.K, c); }

std::pair<CMatrix, DiffState> encode_unitary(const CMatrix& V, const DiffState& state) {
  double s2;
  if (!is_scaled_unitary(V, s2) || std::abs(s2 - 1) > tol::unitary)
    throw ContractError("encode_unitary: information matrix is not unitary");
  CMatrix S = V * state.S_prev;
  return {S, DiffState{S, 1.0}};
}

std::pair<CMatrix, DiffState> encode_nonunitary(const CMatrix& V, const DiffState& state) {
  double s2;
  if (!is_scaled_unitary(V, s2)) throw ContractError("encode_nonunitary: V^H V is not a multiple of I");
  if (!(state.a_prev > 0)) throw DegenerateBlockError("encode_nonunitary: previous amplitude is zero");
  CMatrix S = V * state.S_prev;
  S *= 1.0 / state.a_prev;
  return {S, DiffState{S, std::sqrt(s2)}};
}

double info_amplitude(const STCode& code, const std::vector<cd>& x) {
  double e = 0;
  for (auto& v : x) e += std::norm(v);
  return std::sqrt(e / code.p);
}

std::vector<cd> symbol_statistics(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code) {
  CMatrix Z = Y_prev * hermitian(Y_cur);
  std::vector<cd> xt(code.K);
  const std::size_t n = Z.rows();
  for (int i = 0; i < code.K; ++i) {
    cd ta = 0, tb = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        ta += code.A[i](r, c) * Z(c, r);
        tb += code.B[i](r, c) * Z(c, r);
      }
    xt[i] = ta + std::conj(tb);
  }
  return xt;
}

std::vector<int> decode_fast_ml_unitary(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code,
                                        const Alphabets& alph) {
  check_blocks(Y_prev, Y_cur, code);
  check_alphabets(code, alph);
  for (auto& c : alph)
    if (!c.constant_envelope(1e-9))
      throw UnsupportedError("fast ML decoding needs constant-envelope alphabets; use the near-optimal decoder");
  auto xt = symbol_statistics(Y_prev, Y_cur, code);
  std::vector<int> out(code.K);
  for (int i = 0; i < code.K; ++i) out[i] = argmax_points(alph[i], [&](cd x) { return (xt[i] * x).real(); });
  return out;
}

std::vector<int> decode_near_optimal(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code,
                                     const Alphabets& alph, double a_prev) {
  check_blocks(Y_prev, Y_cur, code);
  check_alphabets(code, alph);
  if (!(a_prev > 0)) throw DegenerateBlockError("decode_near_optimal: previous amplitude is zero");
  auto xt = symbol_statistics(Y_prev, Y_cur, code);
  double yt = frobenius_norm_sq(Y_prev);
  double c = yt / (2 * a_prev * std::sqrt(code.p));
  std::vector<int> out(code.K);
  for (int i = 0; i < code.K; ++i)
    out[i] = argmax_points(alph[i], [&](cd x) {
      return (xt[i].real() * x.real() - xt[i].imag() * x.imag()) - c * (x.real() * x.real() + x.imag() * x.imag());
    });
  return out;
}

std::vector<int> decode_srsd(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code, const Alphabets& alph,
                             double a_prev) {
  check_blocks(Y_prev, Y_cur, code);
  check_alphabets(code, alph);
  for (auto& a : alph)
    if (!a.rectangular) throw UnsupportedError("SRSD needs rectangular QAM alphabets");
  if (!(a_prev > 0)) throw DegenerateBlockError("decode_srsd: previous amplitude is zero");
  auto xt = symbol_statistics(Y_prev, Y_cur, code);
  double c = frobenius_norm_sq(Y_prev) / (2 * a_prev * std::sqrt(code.p));
  std::vector<int> out(code.K);
  for (int i = 0; i < code.K; ++i) {
    const auto& pam = alph[i].pam;
    int ir = argmax_pam(pam, xt[i].real(), c);
    int ii = argmax_pam(pam, -xt[i].imag(), c);
    out[i] = ir * static_cast<int>(pam.size()) + ii;
  }
  return out;
}

long search_space_scsd(const Alphabets& alph) {
  long s = 0;
  for (auto& a : alph) s += a.size();
  return s;
}

long search_space_srsd(const Alphabets& alph) {
  long s = 0;
  for (auto& a : alph) s += a.rectangular ? 2 * static_cast<long>(a.pam.size()) : a.size();
  return s;
}

NonunitaryMlDecoder::NonunitaryMlDecoder(const STCode& code, const Alphabets& alph) : code_(code) {
  check_alphabets(code, alph);
  long total = 1;
  for (auto& a : alph) {
    total *= a.size();
    if (total > kJointGuard) throw CapacityError("joint ML search space exceeds 2^16 candidates");
  }
  std::vector<int> digits(code.K, 0);
  for (long n = 0; n < total; ++n) {
    long rem = n;
    for (int i = code.K - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rem % alph[i].size());
      rem /= alph[i].size();
    }
    std::vector<cd> x(code.K);
    for (int i = 0; i < code.K; ++i) x[i] = alph[i].points[digits[i]];
    index_.push_back(digits);
    VH_.push_back(hermitian(assemble(code, x)));
    a2_.push_back(info_amplitude(code, x) * info_amplitude(code, x));
  }
}

std::vector<int> NonunitaryMlDecoder::decode(const CMatrix& Y_prev, const CMatrix& Y_cur, double rho,
                                             double a_prev) const {
  check_blocks(Y_prev, Y_cur, code_);
  if (!(rho > 0)) throw ParameterError("decode_ml_nonunitary: rho must be positive");
  const std::size_t T = Y_prev.rows(), N = Y_prev.cols();
  const double MN = static_cast<double>(code_.M * N);
  const double ap2 = a_prev * a_prev;
  std::size_t arg = 0;
  double best = -INFINITY;
  for (std::size_t l = 0; l < VH_.size(); ++l) {
    const CMatrix& vh = VH_[l];
    double f = 0;
    for (std::size_t r = 0; r < T; ++r)
      for (std::size_t n = 0; n < N; ++n) {
        cd acc = a_prev * Y_prev(r, n);
        for (std::size_t k = 0; k < T; ++k) acc += vh(r, k) * Y_cur(k, n);
        f += std::norm(acc);
      }
    double g = 1 + rho * (ap2 + a2_[l]);
    double m = rho / g * f - MN * std::log(g);
    if (m > best) {
      best = m;
      arg = l;
    }
  }
  return index_[arg];
}

std::vector<int> decode_ml_nonunitary(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code,
                                      const Alphabets& alph, double rho, double a_prev) {
  return NonunitaryMlDecoder(code, alph).decode(Y_prev, Y_cur, rho, a_prev);
}

int decode_matrix_ml_general(const CMatrix& Y_prev, const CMatrix& Y_cur, const std::vector<CMatrix>& candidates,
                             double rho) {
  if (candidates.empty()) throw ParameterError("decode_matrix_ml_general: no candidates");
  if (!(rho > 0)) throw ParameterError("decode_matrix_ml_general: rho must be positive");
  CMatrix Y = vstack(Y_prev, Y_cur);
  const double N = static_cast<double>(Y.cols());
  int arg = 0;
  double best = -INFINITY;
  for (std::size_t l = 0; l < candidates.size(); ++l) {
    const CMatrix& S = candidates[l];
    if (S.rows() != Y.rows()) throw ShapeError("decode_matrix_ml_general: candidate rows differ from stacked Y");
    CMatrix SH = hermitian(S);
    CMatrix G = CMatrix::identity(S.cols()) + rho * (SH * S);
    CMatrix P = hermitian(Y) * S;  // N x M
    double m = rho * trace(P * inverse(G) * hermitian(P)).real() - N * std::log(determinant(G).real());
    if (m > best) {
      best = m;
      arg = static_cast<int>(l);
    }
  }
  return arg;
}

}  // namespace dstc
