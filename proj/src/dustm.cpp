#include "dstc/dustm.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "dstc/alphabets.hpp"
#include "dstc/errors.hpp"
#include "dstc/parallel.hpp"

namespace dstc {

namespace {
constexpr long kSearchGuard = 1L << 24;

cd unit_root(long k, int L) {
  k %= L;
  if (k < 0) k += L;
  if (4 * k % L == 0) {
    static const cd axis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return axis[4 * k / L];
  }
  return std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / L);
}

double sin2_term(long lu, int L) {
  long k = lu % L;
  if (k == 0) return 0.0;
  double s = std::sin(std::numbers::pi * static_cast<double>(k) / L);
  return 4 * s * s;
}
}  // namespace

std::vector<cd> CyclicCode::diagonal(long l) const {
  std::vector<cd> d(M);
  for (int m = 0; m < M; ++m) d[m] = unit_root(static_cast<long>(u[m]) * (l % L), L);
  return d;
}

CMatrix CyclicCode::codeword(long l) const { return CMatrix::diag(diagonal(l)); }

CyclicCode make_cyclic(const std::vector<int>& u, int L) {
  if (L < 2) throw ParameterError("make_cyclic: L must be at least 2");
  if (u.empty()) throw ParameterError("make_cyclic: empty u");
  for (int x : u)
    if (x < 0 || x >= L) throw ParameterError("make_cyclic: u entry " + std::to_string(x) + " outside [0, L)");
  CyclicCode c;
  c.M = static_cast<int>(u.size());
  c.L = L;
  c.u = u;
  c.G = c.codeword(1);
  return c;
}

int encode_index(int z, int x_prev, int L) {
  if (z < 0 || z >= L || x_prev < 0 || x_prev >= L) throw ParameterError("encode_index: index outside [0, L)");
  return (z + x_prev) % L;
}

double coding_gain_u(const std::vector<int>& u, int L) {
  if (L < 2 || u.empty()) throw ParameterError("coding_gain_u: bad arguments");
  for (int x : u)
    if (x < 0 || x >= L) throw ParameterError("coding_gain_u: u entry outside [0, L)");
  const double inv_m = 1.0 / static_cast<double>(u.size());
  double best = INFINITY;
  for (long l = 1; l < L; ++l) {
    double prod = 1;
    for (int x : u) prod *= sin2_term(l * x, L);
    best = std::min(best, std::pow(prod, inv_m));
    if (best == 0.0) break;
  }
  return best;
}

SearchUResult search_u(int M, int L, int workers) {
  if (M < 1 || L < 2) throw ParameterError("search_u: need M >= 1 and L >= 2");
  // u1 = 1, remaining entries sorted, units of Z_L up to L/2
  std::vector<int> units;
  for (int x = 1; x <= L / 2; ++x)
    if (std::gcd(x, L) == 1) units.push_back(x);
  std::vector<std::vector<int>> cands;
  std::vector<int> cur{1};
  long count = 0;
  // count multisets of size M-1 from units before materializing
  {
    double c = 1;
    int n = static_cast<int>(units.size()), k = M - 1;
    for (int i = 0; i < k; ++i) c = c * (n + i) / (i + 1);
    if (c > static_cast<double>(kSearchGuard))
      throw CapacityError("search_u: " + std::to_string(static_cast<long long>(c)) + " candidates exceed 2^24");
  }
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(cur.size()) == M) {
      cands.push_back(cur);
      ++count;
      return;
    }
    for (std::size_t k = start; k < units.size(); ++k) {
      cur.push_back(units[k]);
      rec(k);
      cur.pop_back();
    }
  };
  rec(0);
  std::vector<double> cg(cands.size());
  parallel_for(cands.size(), workers, [&](std::size_t i) { cg[i] = coding_gain_u(cands[i], L); });
  SearchUResult r;
  r.M = M;
  r.L = L;
  r.candidates_scanned = count;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cg[i] > cg[arg] * (1 + 1e-12) + 1e-300) arg = i;
  r.u = cands[arg];
  r.coding_gain = cg[arg];
  return r;
}

int dustm_ml_decode(const CMatrix& Y_prev, const CMatrix& Y_cur, const CyclicCode& code) {
  if (Y_prev.rows() != static_cast<std::size_t>(code.M) || Y_cur.rows() != Y_prev.rows() ||
      Y_cur.cols() != Y_prev.cols())
    throw ShapeError("dustm_ml_decode: received blocks must both be M x N");
  const std::size_t N = Y_prev.cols();
  std::vector<cd> d(code.M);
  for (int m = 0; m < code.M; ++m)
    for (std::size_t n = 0; n < N; ++n) d[m] += Y_prev(m, n) * std::conj(Y_cur(m, n));
  int arg = 0;
  double best = -INFINITY;
  for (int l = 0; l < code.L; ++l) {
    double s = 0;
    for (int m = 0; m < code.M; ++m) s += (unit_root(static_cast<long>(code.u[m]) * l, code.L) * d[m]).real();
    if (s > best) {
      best = s;
      arg = l;
    }
  }
#ifndef NDEBUG
  {
    int arg_f = 0;
    double best_f = -INFINITY;
    for (int l = 0; l < code.L; ++l) {
      double f = frobenius_norm_sq(Y_prev + hermitian(code.codeword(l)) * Y_cur);
      if (f > best_f) {
        best_f = f;
        arg_f = l;
      }
    }
    if (arg_f != arg && std::abs(best_f - frobenius_norm_sq(Y_prev + hermitian(code.codeword(arg)) * Y_cur)) >
                            1e-9 * std::max(1.0, best_f))
      throw ContractError("dustm_ml_decode: Frobenius and trace forms disagree");
  }
#endif
  return arg;
}

std::vector<std::uint32_t> complementary_bitmap(int L) {
  if (!is_pow2(L) || L < 2) throw ParameterError("complementary_bitmap: L must be a power of two");
  std::vector<std::uint32_t> lab(L);
  const std::uint32_t mask = static_cast<std::uint32_t>(L - 1);
  for (int l = 0; l < L / 2; ++l) {
    lab[l] = static_cast<std::uint32_t>(l);
    lab[l + L / 2] = ~static_cast<std::uint32_t>(l) & mask;
  }
  return lab;
}

std::vector<int> table_u(int M, int eta) {
  static const std::vector<std::vector<int>> one = {{1}, {1, 1}, {1, 1, 3}, {1, 3, 5, 7}, {1, 5, 7, 9, 11}};
  static const std::vector<std::vector<int>> two = {
      {1}, {1, 7}, {1, 11, 27}, {1, 25, 97, 107}, {1, 157, 283, 415, 487}};
  if (M < 1 || M > 5 || (eta != 1 && eta != 2)) throw ParameterError("table_u: tabulated for M=1..5, eta=1,2");
  return eta == 1 ? one[M - 1] : two[M - 1];
}

int table_L(int M, int eta) {
  if (M < 1 || M > 5 || (eta != 1 && eta != 2)) throw ParameterError("table_L: tabulated for M=1..5, eta=1,2");
  return 1 << (eta * M);
}

}  // namespace dstc
