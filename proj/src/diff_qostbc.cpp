#include "dstc/diff_qostbc.hpp"

#include <cmath>

#include "dstc/errors.hpp"
#include "dstc/stcodes.hpp"

namespace dstc {

namespace {
constexpr double kMinAmplitude = 1e-12;
// sign of jQ relative to U for subsystem 1 (negated for subsystem 2)
constexpr int kSign[4] = {-1, -1, 1, 1};

// Re tr(Z U_i) for the four Alamouti-basis matrices I, [0 1; -1 0], diag(j,-j), [0 j; j 0]
std::array<double, 4> basis_traces(const CMatrix& Z) {
  const cd j(0, 1);
  return {(Z(0, 0) + Z(1, 1)).real(), (Z(1, 0) - Z(0, 1)).real(), (j * Z(0, 0) - j * Z(1, 1)).real(),
          (j * Z(1, 0) + j * Z(0, 1)).real()};
}

void check_pair(const SubsystemPair& p) {
  if (p.first.rows() != 2 || p.second.rows() != 2 || p.first.cols() != p.second.cols())
    throw ShapeError("QOSTBC decoder expects 2 x N subsystem blocks");
}
}  // namespace

const char* to_string(QostbcScheme s) { return s == QostbcScheme::COMBINED ? "COMBINED" : "UNCOMBINED"; }

SubsystemPair subsystem_split(const CMatrix& X) {
  if (X.rows() % 2) throw ShapeError("subsystem_split: row count must be even");
  const std::size_t h = X.rows() / 2;
  CMatrix x1 = X.block(0, 0, h, X.cols()), x2 = X.block(h, 0, h, X.cols());
  SubsystemPair p;
  p.first = x1 + x2;
  p.second = x1 - x2;
  return p;
}

CMatrix subsystem_merge(const SubsystemPair& p) {
  return vstack(0.5 * (p.first + p.second), 0.5 * (p.first - p.second));
}

CMatrix abba_from_subsystems(const CMatrix& S1, const CMatrix& S2) {
  CMatrix A = 0.5 * (S1 + S2), B = 0.5 * (S1 - S2);
  return blocks2x2(A, B, B, A);
}

InfoSubmatrices make_info_submatrices(const QostbcMode& mode, const std::array<cd, 4>& x) {
  const cd j(0, 1);
  cd v1(x[0].real(), x[2].real()), v2(x[1].real(), x[3].real());
  cd v3(-x[0].imag(), x[2].imag()), v4(-x[1].imag(), x[3].imag());
  InfoSubmatrices r;
  if (mode.mode == QostbcScheme::COMBINED) {
    r.c = {v1 + v3, v2 + v4, v1 - v3, v2 - v4};
  } else {
    r.c = {v1, v2, v3, v4};
  }
  r.V1 = alamouti_block(r.c[0], r.c[1]) * (1.0 / std::sqrt(mode.p1));
  r.V2 = alamouti_block(r.c[2], r.c[3]) * (1.0 / std::sqrt(mode.p2));
  r.a1 = std::sqrt((std::norm(r.c[0]) + std::norm(r.c[1])) / mode.p1);
  r.a2 = std::sqrt((std::norm(r.c[2]) + std::norm(r.c[3])) / mode.p2);
  if (r.a1 < kMinAmplitude || r.a2 < kMinAmplitude)
    throw DegenerateBlockError(std::string("QOSTBC ") + to_string(mode.mode) + ": subsystem amplitude is zero");
  return r;
}

SubsystemState encode_subsystems(const SubsystemState& prev, const InfoSubmatrices& info) {
  if (prev.a1 < kMinAmplitude || prev.a2 < kMinAmplitude)
    throw DegenerateBlockError("encode_subsystems: previous subsystem amplitude is zero");
  SubsystemState s;
  s.S1 = info.V1 * prev.S1 * (1.0 / prev.a1);
  s.S2 = info.V2 * prev.S2 * (1.0 / prev.a2);
  s.a1 = info.a1;
  s.a2 = info.a2;
  return s;
}

CombinedStats combined_statistics(const SubsystemPair& Y_prev, const SubsystemPair& Y_cur, double a1_prev,
                                  double a2_prev, double p) {
  check_pair(Y_prev);
  check_pair(Y_cur);
  if (a1_prev < kMinAmplitude || a2_prev < kMinAmplitude)
    throw DegenerateBlockError("QOSTBC decoder: previous subsystem amplitude is zero");
  CombinedStats s;
  s.y1 = frobenius_norm_sq(Y_prev.first) / (2 * std::sqrt(p) * a1_prev);
  s.y2 = frobenius_norm_sq(Y_prev.second) / (2 * std::sqrt(p) * a2_prev);
  s.t1 = basis_traces(Y_prev.first * hermitian(Y_cur.first));
  s.t2 = basis_traces(Y_prev.second * hermitian(Y_cur.second));
  return s;
}

double combined_symbol_metric(const CombinedStats& s, int i, cd x) {
  const double xr = x.real(), xi = x.imag(), e = xr * xr + xi * xi;
  const double sg = kSign[i];
  return s.y1 * (e + 2 * sg * xr * xi) - s.t1[i] * (xr + sg * xi) + s.y2 * (e - 2 * sg * xr * xi) -
         s.t2[i] * (xr - sg * xi);
}

std::array<int, 4> decode_combined(const SubsystemPair& Y_prev, const SubsystemPair& Y_cur, const Constellation& c,
                                   double a1_prev, double a2_prev) {
  CombinedStats s = combined_statistics(Y_prev, Y_cur, a1_prev, a2_prev, 4.0);
  std::array<int, 4> out{};
  for (int i = 0; i < 4; ++i) {
    double best = INFINITY;
    for (int k = 0; k < c.size(); ++k) {
      double m = combined_symbol_metric(s, i, c.points[k]);
      if (m < best) {
        best = m;
        out[i] = k;
      }
    }
  }
  return out;
}

std::array<int, 4> decode_uncombined(const SubsystemPair& Y_prev, const SubsystemPair& Y_cur,
                                     const Constellation& rect, double a1_prev, double a2_prev) {
  if (!rect.rectangular) throw UnsupportedError("un-combined QOSTBC decoding needs a rectangular QAM alphabet");
  CombinedStats s = combined_statistics(Y_prev, Y_cur, a1_prev, a2_prev, 2.0);
  const auto& pam = rect.pam;
  std::array<int, 4> out{};
  for (int i = 0; i < 4; ++i) {
    double wr = s.t1[i], wi = kSign[i] * s.t2[i];
    int ir = 0, ii = 0;
    double br = INFINITY, bi = INFINITY;
    for (std::size_t k = 0; k < pam.size(); ++k) {
      double mr = s.y1 * pam[k] * pam[k] - wr * pam[k];
      double mi = s.y2 * pam[k] * pam[k] - wi * pam[k];
      if (mr < br) {
        br = mr;
        ir = static_cast<int>(k);
      }
      if (mi < bi) {
        bi = mi;
        ii = static_cast<int>(k);
      }
    }
    out[i] = ir * static_cast<int>(pam.size()) + ii;
  }
  return out;
}

CMatrix actual_info_matrix(const std::array<cd, 4>& c, double a1_prev, double a2_prev, double p) {
  if (a1_prev < kMinAmplitude || a2_prev < kMinAmplitude)
    throw DegenerateBlockError("actual_info_matrix: previous subsystem amplitude is zero");
  const double k = 1.0 / (2 * std::sqrt(p));
  cd v1 = k * (c[0] / a1_prev + c[2] / a2_prev);
  cd v2 = k * (c[1] / a1_prev + c[3] / a2_prev);
  cd v3 = k * (c[0] / a1_prev - c[2] / a2_prev);
  cd v4 = k * (c[1] / a1_prev - c[3] / a2_prev);
  CMatrix P = alamouti_block(v1, v2), R = alamouti_block(v3, v4);
  return blocks2x2(P, R, R, P);
}

}  // namespace dstc
