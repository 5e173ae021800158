#include "dstc/stcodes.hpp"

#include <cmath>
#include <numeric>

#include "dstc/alphabets.hpp"
#include "dstc/errors.hpp"

namespace dstc {

namespace {
const cd J(0, 1);

CMatrix entries(int n, std::initializer_list<std::tuple<int, int, cd>> nz) {
  CMatrix m(n, n);
  for (auto& [i, j, v] : nz) m(i, j) = v;
  return m;
}

CMatrix swap_blocks(const CMatrix& half) {
  // [[0, X], [X, 0]]
  CMatrix z(half.rows(), half.cols());
  return blocks2x2(z, half, half, z);
}

bool exact_eq(const CMatrix& a, const CMatrix& b) { return a == b; }

std::string idx(int i, int d) { return "(" + std::to_string(i + 1) + "," + std::to_string(d + 1) + ")"; }
}  // namespace

const char* to_string(CodeKind k) {
  switch (k) {
    case CodeKind::ALAMOUTI: return "ALAMOUTI";
    case CodeKind::TH4: return "TH4";
    case CodeKind::MDC4: return "MDC4";
    case CodeKind::MDC8: return "MDC8";
  }
  return "?";
}

CodeKind code_kind_from_string(const std::string& s) {
  for (auto k : {CodeKind::ALAMOUTI, CodeKind::TH4, CodeKind::MDC4, CodeKind::MDC8})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown code kind '" + s + "'");
}

Rational make_rational(long num, long den) {
  if (den == 0) throw ParameterError("rational with zero denominator");
  long g = std::gcd(num, den);
  if (den < 0) g = -g;
  return {num / g, den / g};
}

bool ValidationReport::all_pass() const {
  for (auto& c : checks)
    if (!c.pass) return false;
  return true;
}

bool ValidationReport::passed(const std::string& name) const {
  bool seen = false;
  for (auto& c : checks)
    if (c.name == name) {
      seen = true;
      if (!c.pass) return false;
    }
  return seen;
}

CMatrix alamouti_block(cd a, cd b) { return CMatrix{{a, b}, {-std::conj(b), std::conj(a)}}; }

void complete_families(STCode& code) {
  if (!code.U.empty()) {
    code.A.clear();
    code.B.clear();
    for (int i = 0; i < code.K; ++i) {
      code.A.push_back(0.5 * (code.U[i] + code.Q[i]));
      code.B.push_back(0.5 * (code.U[i] - code.Q[i]));
    }
  } else {
    for (int i = 0; i < code.K; ++i) {
      code.U.push_back(code.A[i] + code.B[i]);
      code.Q.push_back(code.A[i] - code.B[i]);
    }
  }
}

namespace {
STCode alamouti() {
  STCode c;
  c.kind = CodeKind::ALAMOUTI;
  c.M = c.T = c.K = 2;
  c.p = 2;
  c.A = {entries(2, {{0, 0, 1}}), entries(2, {{0, 1, 1}})};
  c.B = {entries(2, {{1, 1, 1}}), entries(2, {{1, 0, -1}})};
  complete_families(c);
  return c;
}

STCode th4() {
  // rows: [x1 x2 x3 0; -x2* x1* 0 -x3; -x3* 0 x1* x2; 0 x3* -x2* x1]
  STCode c;
  c.kind = CodeKind::TH4;
  c.M = c.T = 4;
  c.K = 3;
  c.p = 3;
  c.A = {entries(4, {{0, 0, 1}, {3, 3, 1}}), entries(4, {{0, 1, 1}, {2, 3, 1}}), entries(4, {{0, 2, 1}, {1, 3, -1}})};
  c.B = {entries(4, {{1, 1, 1}, {2, 2, 1}}), entries(4, {{1, 0, -1}, {3, 2, -1}}),
         entries(4, {{2, 0, -1}, {3, 1, 1}})};
  complete_families(c);
  return c;
}

STCode mdc4_printed() {
  // dispersion matrices of the 4-antenna MDC-QOSTBC as listed with the code
  STCode c;
  c.kind = CodeKind::MDC4;
  c.M = c.T = c.K = 4;
  c.p = 4;
  CMatrix I2 = CMatrix::identity(2);
  CMatrix u2{{0, 1}, {-1, 0}};
  CMatrix q1{{1, 0}, {0, -1}};
  CMatrix q2{{0, 1}, {1, 0}};
  c.U = {blockdiag(I2, I2), blockdiag(u2, u2), blockdiag(J * q1, J * q1), blockdiag(J * q2, J * q2)};
  c.Q = {swap_blocks(J * I2), swap_blocks(J * u2), swap_blocks(q1), swap_blocks(q2)};
  complete_families(c);
  return c;
}
}  // namespace

STCode mdc_extend(const STCode& base) {
  ValidationReport rep = validate_ostbc(base);
  if (!rep.all_pass() || base.M != base.T) throw ContractError("mdc_extend: base is not a square OSTBC");
  STCode c;
  c.M = 2 * base.M;
  c.T = 2 * base.T;
  c.K = 2 * base.K;
  c.p = c.K;
  c.kind = base.kind == CodeKind::ALAMOUTI ? CodeKind::MDC4 : CodeKind::MDC8;
  c.U.resize(c.K);
  c.Q.resize(c.K);
  const int h = base.K;
  for (int i = 0; i < h; ++i) {
    c.U[i] = blockdiag(base.U[i], base.U[i]);
    c.Q[i] = swap_blocks(J * base.U[i]);
    c.U[i + h] = blockdiag(J * base.Q[i], J * base.Q[i]);
    c.Q[i + h] = swap_blocks(base.Q[i]);
  }
  complete_families(c);
  return c;
}

STCode make_code(CodeKind kind) {
  switch (kind) {
    case CodeKind::ALAMOUTI: return alamouti();
    case CodeKind::TH4: return th4();
    case CodeKind::MDC4: return mdc4_printed();
    case CodeKind::MDC8: return mdc_extend(th4());
  }
  throw ParameterError("unknown code kind");
}

CMatrix assemble(const STCode& code, const std::vector<cd>& x) {
  if (static_cast<int>(x.size()) != code.K)
    throw ParameterError("assemble: expected " + std::to_string(code.K) + " symbols, got " + std::to_string(x.size()));
  CMatrix v(code.T, code.M);
  for (int i = 0; i < code.K; ++i) {
    v += x[i] * code.A[i];
    v += std::conj(x[i]) * code.B[i];
  }
  return v * (1.0 / std::sqrt(code.p));
}

CMatrix assemble_uq(const STCode& code, const std::vector<cd>& x) {
  if (static_cast<int>(x.size()) != code.K)
    throw ParameterError("assemble: expected " + std::to_string(code.K) + " symbols, got " + std::to_string(x.size()));
  CMatrix v(code.T, code.M);
  for (int i = 0; i < code.K; ++i) {
    v += x[i].real() * code.U[i];
    v += (J * x[i].imag()) * code.Q[i];
  }
  return v * (1.0 / std::sqrt(code.p));
}

namespace {
void check_entries(const STCode& code, ValidationReport& rep) {
  Check c{"entries", true, ""};
  auto ok = [](cd v) {
    return v == cd(0) || v == cd(1) || v == cd(-1) || v == cd(0, 1) || v == cd(0, -1);
  };
  for (int i = 0; i < code.K; ++i)
    for (const CMatrix* m : {&code.U[i], &code.Q[i]}) {
      if (m->rows() != static_cast<std::size_t>(code.T) || m->cols() != static_cast<std::size_t>(code.M)) {
        c.pass = false;
        c.detail = "shape";
      }
      for (auto& v : m->values())
        if (!ok(v)) {
          c.pass = false;
          c.detail = "entry outside {0, +-1, +-j} in matrix " + std::to_string(i + 1);
        }
    }
  rep.checks.push_back(c);
}

void check_unitary(const STCode& code, ValidationReport& rep, const std::string& name) {
  Check c{name, true, ""};
  CMatrix I = CMatrix::identity(code.M);
  for (int i = 0; i < code.K; ++i) {
    if (!exact_eq(hermitian(code.U[i]) * code.U[i], I)) {
      c.pass = false;
      c.detail += "U" + std::to_string(i + 1) + " ";
    }
    if (!exact_eq(hermitian(code.Q[i]) * code.Q[i], I)) {
      c.pass = false;
      c.detail += "Q" + std::to_string(i + 1) + " ";
    }
  }
  rep.checks.push_back(c);
}

void check_anticommute(const STCode& code, ValidationReport& rep, const std::string& name) {
  Check c{name, true, ""};
  for (int i = 0; i < code.K; ++i)
    for (int d = 0; d < code.K; ++d) {
      if (i == d) continue;
      if (!exact_eq(hermitian(code.U[i]) * code.U[d], -(hermitian(code.U[d]) * code.U[i]))) {
        c.pass = false;
        c.detail += "U" + idx(i, d) + " ";
      }
      if (!exact_eq(hermitian(code.Q[i]) * code.Q[d], -(hermitian(code.Q[d]) * code.Q[i]))) {
        c.pass = false;
        c.detail += "Q" + idx(i, d) + " ";
      }
    }
  rep.checks.push_back(c);
}

void check_cross(const STCode& code, ValidationReport& rep, const std::string& name, bool include_diag) {
  Check c{name, true, ""};
  for (int i = 0; i < code.K; ++i)
    for (int d = 0; d < code.K; ++d) {
      if (i == d && !include_diag) continue;
      if (!exact_eq(hermitian(code.U[i]) * code.Q[d], hermitian(code.Q[d]) * code.U[i])) {
        c.pass = false;
        c.detail += idx(i, d) + " ";
      }
    }
  rep.checks.push_back(c);
}
}  // namespace

ValidationReport validate_ostbc(const STCode& code) {
  ValidationReport rep;
  rep.subject = std::string(to_string(code.kind)) + " as OSTBC";
  check_entries(code, rep);
  check_unitary(code, rep, "(i) unitary U_i, Q_i");
  check_anticommute(code, rep, "(ii) anticommuting families");
  check_cross(code, rep, "(iii) U_i^H Q_d = Q_d^H U_i, all i,d", true);
  return rep;
}

ValidationReport validate_mdc(const STCode& code) {
  ValidationReport rep;
  rep.subject = std::string(to_string(code.kind)) + " as MDC-QOSTBC";
  check_entries(code, rep);
  check_anticommute(code, rep, "(i)-(ii) anticommuting families, i!=d");
  check_cross(code, rep, "(iii) U_i^H Q_d = Q_d^H U_i, i!=d", false);
  check_unitary(code, rep, "(iv) unitary U_i, Q_i");
  Check v{"(v) U_i^H Q_i structure", true, ""};
  if (code.K % 2 || code.M % 2) {
    v.pass = false;
    v.detail = "odd dimensions";
  } else {
    const int h = code.K / 2;
    CMatrix target = J * swap_blocks(CMatrix::identity(code.M / 2));
    for (int i = 0; i < h; ++i) {
      CMatrix a = hermitian(code.U[i]) * code.Q[i];
      CMatrix b = -(hermitian(code.Q[i]) * code.U[i]);
      CMatrix c = hermitian(code.Q[i + h]) * code.U[i + h];
      CMatrix d = -(hermitian(code.U[i + h]) * code.Q[i + h]);
      if (!(exact_eq(a, target) && exact_eq(b, target) && exact_eq(c, target) && exact_eq(d, target))) {
        v.pass = false;
        v.detail += "i=" + std::to_string(i + 1) + " ";
      }
    }
  }
  rep.checks.push_back(v);
  return rep;
}

GramForm gram(const STCode& code, const std::vector<cd>& x) {
  if (code.kind != CodeKind::MDC4 && code.kind != CodeKind::MDC8)
    throw UnsupportedError("gram: closed form exists for MDC codes only");
  GramForm g;
  const int h = code.K / 2;
  for (int i = 0; i < code.K; ++i) g.alpha += std::norm(x[i]);
  for (int i = 0; i < h; ++i)
    g.beta += 2 * (-x[i].real() * x[i].imag() + x[i + h].real() * x[i + h].imag());
  CMatrix v = assemble(code, x);
  g.product = hermitian(v) * v;
  g.closed_form = (g.alpha / code.K) * CMatrix::identity(code.M) +
                  (g.beta / code.K) * swap_blocks(CMatrix::identity(code.M / 2));
  return g;
}

std::pair<Rational, Rational> rate_and_efficiency(const STCode& code, const std::vector<int>& sizes) {
  if (static_cast<int>(sizes.size()) != code.K) throw ParameterError("rate_and_efficiency: need one size per symbol");
  long bits = 0;
  for (int q : sizes) {
    if (!is_pow2(q)) throw ParameterError("rate_and_efficiency: alphabet size not a power of two");
    bits += ilog2(q);
  }
  return {make_rational(code.K, code.T), make_rational(bits, code.T)};
}

}  // namespace dstc
