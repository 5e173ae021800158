#pragma once
#include <cstdint>
#include <vector>

#include "dstc/cxmat.hpp"

namespace dstc {

struct CyclicCode {
  int M = 0;
  int L = 0;
  std::vector<int> u;
  CMatrix G;
  // V_l = G^l, built from exact angle multiples
  CMatrix codeword(long l) const;
  std::vector<cd> diagonal(long l) const;
};

struct SearchUResult {
  int M = 0, L = 0;
  std::vector<int> u;
  double coding_gain = 0;
  long candidates_scanned = 0;
};

CyclicCode make_cyclic(const std::vector<int>& u, int L);
int encode_index(int z, int x_prev, int L);
double coding_gain_u(const std::vector<int>& u, int L);
SearchUResult search_u(int M, int L, int workers = 1);
int dustm_ml_decode(const CMatrix& Y_prev, const CMatrix& Y_cur, const CyclicCode& code);
std::vector<std::uint32_t> complementary_bitmap(int L);

// optimal u vectors as tabulated for eta = 1 and 2 bits/s/Hz, M = 1..5
std::vector<int> table_u(int M, int eta);
int table_L(int M, int eta);

}  // namespace dstc
