#pragma once
#include <array>
#include <string>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/cxmat.hpp"

namespace dstc {

enum class QostbcScheme { COMBINED, UNCOMBINED };
const char* to_string(QostbcScheme s);

struct QostbcMode {
  QostbcScheme mode = QostbcScheme::COMBINED;
  double p1 = 4, p2 = 4;
  static QostbcMode combined() { return {QostbcScheme::COMBINED, 4, 4}; }
  static QostbcMode uncombined() { return {QostbcScheme::UNCOMBINED, 2, 2}; }
};

struct SubsystemPair {
  CMatrix first, second;  // X1 + X2, X1 - X2
  double a1 = 1, a2 = 1;
};

struct InfoSubmatrices {
  CMatrix V1, V2;
  double a1 = 0, a2 = 0;
  std::array<cd, 4> c{};  // Alamouti entries before normalization
};

struct SubsystemState {
  CMatrix S1 = CMatrix::identity(2), S2 = CMatrix::identity(2);
  double a1 = 1, a2 = 1;
};

SubsystemPair subsystem_split(const CMatrix& X);
CMatrix subsystem_merge(const SubsystemPair& p);
// full ABBA transmit block from the subsystem blocks
CMatrix abba_from_subsystems(const CMatrix& S1, const CMatrix& S2);

InfoSubmatrices make_info_submatrices(const QostbcMode& mode, const std::array<cd, 4>& x);
SubsystemState encode_subsystems(const SubsystemState& prev, const InfoSubmatrices& info);

std::array<int, 4> decode_combined(const SubsystemPair& Y_prev, const SubsystemPair& Y_cur, const Constellation& c,
                                   double a1_prev, double a2_prev);
std::array<int, 4> decode_uncombined(const SubsystemPair& Y_prev, const SubsystemPair& Y_cur,
                                     const Constellation& rect_qam, double a1_prev, double a2_prev);

CMatrix actual_info_matrix(const std::array<cd, 4>& c, double a1_prev, double a2_prev, double p);

// per-subsystem metric pieces used by both decoders and by the joint oracle
struct CombinedStats {
  double y1 = 0, y2 = 0;
  std::array<double, 4> t1{}, t2{};
};
CombinedStats combined_statistics(const SubsystemPair& Y_prev, const SubsystemPair& Y_cur, double a1_prev,
                                  double a2_prev, double p);
// per-symbol combined metric (lower is better)
double combined_symbol_metric(const CombinedStats& s, int i, cd x);

}  // namespace dstc
