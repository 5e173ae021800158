#pragma once
#include <string>
#include <vector>

#include "dstc/cxmat.hpp"

namespace dstc {

enum class CodeKind { ALAMOUTI, TH4, MDC4, MDC8 };
const char* to_string(CodeKind k);
CodeKind code_kind_from_string(const std::string& s);

struct STCode {
  CodeKind kind = CodeKind::ALAMOUTI;
  int M = 0, T = 0, K = 0;
  std::vector<CMatrix> U, Q;  // real-part and imaginary-part families
  std::vector<CMatrix> A, B;  // symbol and conjugate families
  double p = 1;
};

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ValidationReport {
  std::string subject;
  std::vector<Check> checks;
  bool all_pass() const;
  bool passed(const std::string& name) const;
};

struct GramForm {
  double alpha = 0, beta = 0;
  CMatrix product;      // V^H V
  CMatrix closed_form;  // (alpha/K) I + (beta/K) [0 I; I 0]
};

struct Rational {
  long num = 0, den = 1;
  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};
Rational make_rational(long num, long den);

STCode make_code(CodeKind kind);
STCode mdc_extend(const STCode& base);
// fill A, B from U, Q (or the reverse when U is empty)
void complete_families(STCode& code);

CMatrix assemble(const STCode& code, const std::vector<cd>& symbols);
CMatrix assemble_uq(const STCode& code, const std::vector<cd>& symbols);

ValidationReport validate_ostbc(const STCode& code);
ValidationReport validate_mdc(const STCode& code);
GramForm gram(const STCode& code, const std::vector<cd>& symbols);
std::pair<Rational, Rational> rate_and_efficiency(const STCode& code, const std::vector<int>& alphabet_sizes);

// 2x2 Alamouti block [[a, b], [-b*, a*]]
CMatrix alamouti_block(cd a, cd b);

}  // namespace dstc
