#include "dstc/alphabets.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include "dstc/errors.hpp"

namespace dstc {

namespace {
constexpr double kPi = std::numbers::pi;

void normalize(Constellation& c) {
  double e = c.mean_energy();
  if (e <= 0) throw ParameterError("constellation has zero energy");
  double s = 1.0 / std::sqrt(e);
  for (auto& x : c.points) x *= s;
  for (auto& v : c.pam) v *= s;
}

void require_pow2(long q, const char* what) {
  if (!is_pow2(q)) throw ParameterError(std::string(what) + ": size " + std::to_string(q) + " is not a power of two");
}
}  // namespace

const char* to_string(ConstellationKind k) {
  switch (k) {
    case ConstellationKind::PSK: return "PSK";
    case ConstellationKind::DASK: return "DASK";
    case ConstellationKind::DAPSK: return "DAPSK";
    case ConstellationKind::RECT_QAM: return "RECT_QAM";
    case ConstellationKind::CIRC_8QAM: return "CIRC_8QAM";
    case ConstellationKind::OMDC4: return "OMDC4";
    case ConstellationKind::OMDC8: return "OMDC8";
    case ConstellationKind::MDC_8QAM: return "MDC_8QAM";
    case ConstellationKind::ROTATED: return "ROTATED";
  }
  return "?";
}

ConstellationKind constellation_kind_from_string(const std::string& s) {
  for (auto k : {ConstellationKind::PSK, ConstellationKind::DASK, ConstellationKind::DAPSK, ConstellationKind::RECT_QAM,
                 ConstellationKind::CIRC_8QAM, ConstellationKind::OMDC4, ConstellationKind::OMDC8,
                 ConstellationKind::MDC_8QAM, ConstellationKind::ROTATED})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown constellation kind '" + s + "'");
}

bool is_pow2(long q) { return q > 0 && (q & (q - 1)) == 0; }

int ilog2(long q) { return q <= 1 ? 0 : 63 - std::countl_zero(static_cast<unsigned long>(q)); }

std::uint32_t gray(std::uint32_t k) { return k ^ (k >> 1); }

std::vector<std::uint32_t> gray_labels(int q) {
  require_pow2(q, "gray_labels");
  std::vector<std::uint32_t> g(q);
  for (int k = 0; k < q; ++k) g[k] = gray(k);
  return g;
}

bool Constellation::constant_envelope(double eps) const {
  for (auto& x : points)
    if (std::abs(std::abs(x) - std::abs(points[0])) > eps) return false;
  return true;
}

double Constellation::mean_energy() const {
  double s = 0;
  for (auto& x : points) s += std::norm(x);
  return points.empty() ? 0.0 : s / points.size();
}

int Constellation::bit_distance(int a, int b) const { return std::popcount(labels[a] ^ labels[b]); }

std::string Constellation::label_string(int i) const {
  std::string s(bits_per_symbol, '0');
  for (int b = 0; b < bits_per_symbol; ++b)
    if (labels[i] >> (bits_per_symbol - 1 - b) & 1u) s[b] = '1';
  return s;
}

std::string Constellation::name() const {
  std::string s = to_string(kind);
  s += std::to_string(size());
  if (kind == ConstellationKind::DAPSK || kind == ConstellationKind::DASK) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%dx%d,a=%.3g)", q_p, q_a, ring_ratio);
    s += buf;
  } else if (kind == ConstellationKind::ROTATED) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "(%.4gdeg)", rad2deg(meta.at("theta")));
    s += buf;
  }
  return s;
}

Constellation psk(int q) {
  require_pow2(q, "PSK");
  if (q < 2) throw ParameterError("PSK: need q >= 2");
  Constellation c;
  c.kind = ConstellationKind::PSK;
  c.bits_per_symbol = ilog2(q);
  for (int k = 0; k < q; ++k) {
    // exact values on the axes
    if (4 * k % q == 0) {
      static const cd axis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      c.points.push_back(axis[4 * k / q]);
    } else {
      c.points.push_back(std::polar(1.0, 2 * kPi * k / q));
    }
    c.labels.push_back(gray(k));
  }
  c.q_p = q;
  c.q_a = 1;
  return c;
}

Constellation dapsk(int q_p, int q_a, double a) {
  require_pow2(q_p, "DAPSK phase");
  require_pow2(q_a, "DAPSK amplitude");
  if (q_a > 1 && !(a > 1.0)) throw ParameterError("DAPSK: ring ratio must exceed 1");
  Constellation c;
  c.kind = q_p == 1 ? ConstellationKind::DASK : ConstellationKind::DAPSK;
  c.q_p = q_p;
  c.q_a = q_a;
  c.ring_ratio = a;
  c.bits_per_symbol = ilog2(q_p) + ilog2(q_a);
  double e = 0;
  for (int k = 0; k < q_a; ++k) e += std::pow(a, 2 * k);
  c.dapsk_norm = 1.0 / std::sqrt(e / q_a);
  Constellation ph = psk(std::max(q_p, 2));
  int ba = ilog2(q_a);
  for (int p = 0; p < q_p; ++p)
    for (int k = 0; k < q_a; ++k) {
      cd phase = q_p == 1 ? cd(1) : ph.points[p];
      c.points.push_back(c.dapsk_norm * std::pow(a, k) * phase);
      c.labels.push_back((gray(p) << ba) | gray(k));
    }
  c.meta["a"] = a;
  c.meta["q_p"] = q_p;
  c.meta["q_a"] = q_a;
  return c;
}

Constellation dask(int q_a, double a) { return dapsk(1, q_a, a); }

namespace {
Constellation cross32() {
  // 8x4 gray rectangle with the |I|=7 columns folded onto the |Q|=5 rows
  Constellation c;
  c.kind = ConstellationKind::RECT_QAM;
  c.bits_per_symbol = 5;
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 4; ++k) {
      int x = 2 * i - 7, y = 2 * k - 3;
      if (std::abs(x) == 7) {
        int sx = x > 0 ? 1 : -1, sy = y > 0 ? 1 : -1;
        int nx = std::abs(y) == 3 ? 3 : 1;
        x = sx * nx;
        y = sy * 5;
      }
      c.points.emplace_back(x, y);
      c.labels.push_back((gray(i) << 2) | gray(k));
    }
  normalize(c);
  return c;
}
}  // namespace

Constellation rect_qam(int q) {
  if (q == 32) return cross32();
  int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(q))));
  if (!is_pow2(q) || m * m != q || q < 4)
    throw ParameterError("RECT_QAM: size " + std::to_string(q) + " is not a square power of two (or 32)");
  Constellation c;
  c.kind = ConstellationKind::RECT_QAM;
  c.bits_per_symbol = ilog2(q);
  c.rectangular = true;
  int b = ilog2(m);
  for (int i = 0; i < m; ++i) c.pam.push_back(2 * i - (m - 1));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      c.points.emplace_back(c.pam[i], c.pam[k]);
      c.labels.push_back((gray(i) << b) | gray(k));
    }
  normalize(c);
  return c;
}

Constellation rotated(const Constellation& base, double theta) {
  Constellation c = base;
  c.kind = ConstellationKind::ROTATED;
  cd rot = std::polar(1.0, theta);
  for (auto& x : c.points) x *= rot;
  c.rectangular = false;
  c.pam.clear();
  c.meta["theta"] = theta;
  c.meta["base_kind"] = static_cast<double>(base.kind);
  return c;
}

namespace {
Constellation two_ring(ConstellationKind kind, double r_inner, double th_inner, double r_outer, double th_outer) {
  Constellation c;
  c.kind = kind;
  c.bits_per_symbol = 3;
  for (int ring = 0; ring < 2; ++ring)
    for (int k = 0; k < 4; ++k) {
      double r = ring ? r_outer : r_inner, th = ring ? th_outer : th_inner;
      c.points.push_back(std::polar(r, th + kPi / 2 * k));
      c.labels.push_back((static_cast<std::uint32_t>(ring) << 2) | gray(k));
    }
  normalize(c);
  return c;
}
}  // namespace

Constellation circ8_qam(double a, double theta) {
  if (!(a > 0)) throw ParameterError("CIRC_8QAM: ring ratio must be positive");
  Constellation c = two_ring(ConstellationKind::CIRC_8QAM, 1.0, theta, a, 0.0);
  c.meta["a"] = a;
  c.meta["theta"] = theta;
  return c;
}

Constellation circ8_for_ostbc() { return circ8_qam(1.6, kPi / 4); }

Constellation mdc_8qam(double r, double theta1, double theta2) {
  if (!(r > 0)) throw ParameterError("MDC_8QAM: radius ratio must be positive");
  for (double t : {theta1, theta2})
    if (t < 0 || t >= kPi / 2 + 1e-12) throw ParameterError("MDC_8QAM: angles must lie in [0, 90) degrees");
  Constellation c = two_ring(ConstellationKind::MDC_8QAM, 1.0, theta1, r, theta2);
  c.meta["r"] = r;
  c.meta["theta1"] = theta1;
  c.meta["theta2"] = theta2;
  return c;
}

namespace {
Constellation on_axis(ConstellationKind kind, const std::vector<double>& radii) {
  // circle i carries two antipodal points, on the real axis for even i, imaginary for odd i
  Constellation c;
  c.kind = kind;
  int q = 2 * static_cast<int>(radii.size());
  c.bits_per_symbol = ilog2(q);
  std::vector<cd> pos;
  for (std::size_t i = 0; i < radii.size(); ++i) pos.push_back(i % 2 ? cd(0, radii[i]) : cd(radii[i], 0));
  for (auto& z : pos) c.points.push_back(z);
  for (auto& z : pos) c.points.push_back(-z);
  // antipodal points get complementary labels
  int h = q / 2;
  for (int i = 0; i < h; ++i) c.labels.push_back(gray(i));
  for (int i = 0; i < h; ++i) c.labels.push_back(~gray(i) & static_cast<std::uint32_t>(q - 1));
  normalize(c);
  return c;
}
}  // namespace

Constellation omdc4() { return on_axis(ConstellationKind::OMDC4, omdc4_radii()); }
Constellation omdc8() { return on_axis(ConstellationKind::OMDC8, omdc8_radii()); }

Constellation build(ConstellationKind kind, const ConstellationParams& p) {
  switch (kind) {
    case ConstellationKind::PSK: return psk(p.q);
    case ConstellationKind::DASK: return dask(p.q_a > 1 ? p.q_a : p.q, p.a);
    case ConstellationKind::DAPSK: {
      if (p.q_p <= 0) throw ParameterError("DAPSK: q_p required");
      return dapsk(p.q_p, p.q_a, p.a);
    }
    case ConstellationKind::RECT_QAM: return rect_qam(p.q);
    case ConstellationKind::CIRC_8QAM: return circ8_for_ostbc();
    case ConstellationKind::OMDC4: return omdc4();
    case ConstellationKind::OMDC8: return omdc8();
    case ConstellationKind::MDC_8QAM: return mdc_8qam(p.r, p.theta1, p.theta2);
    case ConstellationKind::ROTATED: {
      if (p.base == ConstellationKind::ROTATED) throw ParameterError("ROTATED: nested rotation");
      ConstellationParams bp = p;
      bp.q = p.base_q;
      return rotated(build(p.base, bp), p.theta);
    }
  }
  throw ParameterError("unknown constellation kind");
}

}  // namespace dstc
