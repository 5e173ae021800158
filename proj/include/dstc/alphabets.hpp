#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dstc/cxmat.hpp"

namespace dstc {

enum class ConstellationKind { PSK, DASK, DAPSK, RECT_QAM, CIRC_8QAM, OMDC4, OMDC8, MDC_8QAM, ROTATED };

const char* to_string(ConstellationKind k);
ConstellationKind constellation_kind_from_string(const std::string& s);

struct Constellation {
  ConstellationKind kind = ConstellationKind::PSK;
  std::vector<cd> points;
  std::vector<std::uint32_t> labels;  // bit label of points[i], msb first
  int bits_per_symbol = 0;
  std::map<std::string, double> meta;  // a, theta (rad), r, theta1, theta2, q_p, q_a
  // DAPSK layout: index = phase * q_a + level
  int q_p = 0, q_a = 1;
  double ring_ratio = 1.0, dapsk_norm = 1.0;
  // rectangular layout: index = i_re * m + i_im, points = pam[i_re] + j pam[i_im]
  std::vector<double> pam;
  bool rectangular = false;

  int size() const { return static_cast<int>(points.size()); }
  bool constant_envelope(double eps = 1e-12) const;
  double mean_energy() const;
  // hamming distance between the labels of two point indices
  int bit_distance(int a, int b) const;
  std::string label_string(int i) const;
  std::string name() const;  // short description for CSV
};

struct DapskSplit {
  int q_p = 8;
  int q_a = 2;
  double a = 2.1;
};

struct ConstellationParams {
  int q = 4;
  int q_p = 0, q_a = 1;   // DAPSK / DASK
  double a = 2.0;         // ring ratio
  double theta = 0.0;     // rotation, radians
  double r = 1.37;        // MDC 8-QAM radius ratio
  double theta1 = 0.0, theta2 = 0.0;  // MDC 8-QAM ring rotations, radians
  ConstellationKind base = ConstellationKind::RECT_QAM;  // ROTATED
  int base_q = 16;
};

std::vector<std::uint32_t> gray_labels(int q);
std::uint32_t gray(std::uint32_t k);
bool is_pow2(long q);
int ilog2(long q);

Constellation build(ConstellationKind kind, const ConstellationParams& p);
Constellation psk(int q);
Constellation dask(int q_a, double a);
Constellation dapsk(int q_p, int q_a, double a);
Constellation rect_qam(int q);
Constellation rotated(const Constellation& base, double theta);
// two 4-PSK rings, inner radius 1 rotated by theta, outer radius a
Constellation circ8_qam(double a, double theta);
Constellation circ8_for_ostbc();
Constellation omdc4();
Constellation omdc8();
Constellation mdc_8qam(double r, double theta1, double theta2);

// radii of the on-axis OMDC designs; entries alternate real axis / imaginary axis
const std::vector<double>& omdc4_radii();
const std::vector<double>& omdc8_radii();

inline double deg2rad(double d) { return d * 3.14159265358979323846 / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / 3.14159265358979323846; }

}  // namespace dstc
