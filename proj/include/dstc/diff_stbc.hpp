#pragma once
#include <utility>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/cxmat.hpp"
#include "dstc/stcodes.hpp"

namespace dstc {

struct DiffState {
  CMatrix S_prev;
  double a_prev = 1.0;
  static DiffState initial(int M) { return {CMatrix::identity(M), 1.0}; }
};

using Alphabets = std::vector<Constellation>;  // one per code symbol

std::pair<CMatrix, DiffState> encode_unitary(const CMatrix& V, const DiffState& state);
std::pair<CMatrix, DiffState> encode_nonunitary(const CMatrix& V, const DiffState& state);

// amplitude a with V^H V = a^2 I for the given symbols
double info_amplitude(const STCode& code, const std::vector<cd>& x);

std::vector<int> decode_fast_ml_unitary(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code,
                                        const Alphabets& alph);
std::vector<int> decode_ml_nonunitary(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code,
                                      const Alphabets& alph, double rho, double a_prev);
std::vector<int> decode_near_optimal(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code,
                                     const Alphabets& alph, double a_prev);
std::vector<int> decode_srsd(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code, const Alphabets& alph,
                             double a_prev);
int decode_matrix_ml_general(const CMatrix& Y_prev, const CMatrix& Y_cur, const std::vector<CMatrix>& candidates,
                             double rho);

// single-alphabet conveniences
Alphabets same_alphabet(const STCode& code, const Constellation& c);

// per-symbol statistics x~_i = tr(A_i Z) + conj(tr(B_i Z)), Z = Y_prev Y_cur^H
std::vector<cd> symbol_statistics(const CMatrix& Y_prev, const CMatrix& Y_cur, const STCode& code);

// candidates visited by each decoder per block
long search_space_scsd(const Alphabets& alph);
long search_space_srsd(const Alphabets& alph);

// joint ML with precomputed candidate set; reused across blocks
class NonunitaryMlDecoder {
 public:
  NonunitaryMlDecoder(const STCode& code, const Alphabets& alph);
  std::vector<int> decode(const CMatrix& Y_prev, const CMatrix& Y_cur, double rho, double a_prev) const;

 private:
  STCode code_;
  std::vector<std::vector<int>> index_;
  std::vector<CMatrix> VH_;  // V_l^H
  std::vector<double> a2_;
};

}  // namespace dstc
