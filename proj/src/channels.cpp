#include "dstc/channels.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "dstc/errors.hpp"

namespace dstc {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream)
    : seed_(seed), sub_(substream), key_(mix64(mix64(seed) ^ (substream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull))) {}

std::uint64_t RngStream::next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ull * ++ctr_); }

double RngStream::uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1)), th = 2 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

cd RngStream::cn() {
  double a = gaussian(), b = gaussian();
  return {a * std::numbers::sqrt2 / 2, b * std::numbers::sqrt2 / 2};
}

std::uint32_t RngStream::below(std::uint32_t n) {
  return static_cast<std::uint32_t>(((next_u64() >> 32) * n) >> 32);
}

const char* to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::AWGN_PHASE: return "AWGN_PHASE";
    case ChannelKind::RBF: return "RBF";
    case ChannelKind::RFF: return "RFF";
  }
  return "?";
}

ChannelKind channel_kind_from_string(const std::string& s) {
  if (s == "AWGN_PHASE" || s == "AWGN") return ChannelKind::AWGN_PHASE;
  if (s == "RBF") return ChannelKind::RBF;
  if (s == "RFF") return ChannelKind::RFF;
  throw ConfigError("unknown channel kind '" + s + "'");
}

double jakes_phi(int m, double fdts) {
  if (!(fdts >= 0 && fdts < 1)) throw ParameterError("jakes_phi: fdts must lie in [0,1)");
  if (m == 0 || fdts == 0) return 1.0;
  return std::cyl_bessel_j(0.0, 2 * std::numbers::pi * std::abs(m) * fdts);
}

CMatrix rff_covariance(int T, double fdts) {
  if (T < 1) throw ParameterError("rff_covariance: T must be positive");
  CMatrix c(T, T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) c(i, j) = jakes_phi(i - j, fdts);
  return c;
}

namespace {
std::shared_ptr<const CMatrix> coloring(int T, double fdts) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const CMatrix>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{T, fdts}];
  if (!slot) slot = std::make_shared<const CMatrix>(cholesky(rff_covariance(T, fdts)));
  return slot;
}
}  // namespace

ChannelRealization draw_channel(const ChannelModel& model, int M, int N, int T, RngStream& rng) {
  if (M < 1 || N < 1 || T < 1) throw ShapeError("draw_channel: dimensions must be positive");
  ChannelRealization ch;
  ch.kind = model.kind;
  switch (model.kind) {
    case ChannelKind::AWGN_PHASE: {
      if (M * N != 1) throw UnsupportedError("AWGN_PHASE channel is single-antenna only");
      double th = std::numbers::pi * (1.0 - 2.0 * rng.uniform());
      ch.H = CMatrix{{std::polar(1.0, th)}};
      break;
    }
    case ChannelKind::RBF: {
      ch.H = CMatrix(M, N);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j) ch.H(i, j) = rng.cn();
      break;
    }
    case ChannelKind::RFF: {
      if (M * N != 1) throw UnsupportedError("RFF channel is single-antenna only");
      if (!(model.fdts >= 0 && model.fdts < 1)) throw ParameterError("RFF: fdts must lie in [0,1)");
      auto L = coloring(T, model.fdts);
      std::vector<cd> g(T);
      for (auto& x : g) x = rng.cn();
      ch.h_t.assign(T, 0.0);
      for (int i = 0; i < T; ++i) {
        cd s = 0;
        for (int k = 0; k <= i; ++k) s += (*L)(i, k) * g[k];
        ch.h_t[i] = s;
      }
      ch.H = CMatrix{{ch.h_t[0]}};
      break;
    }
  }
  return ch;
}

CMatrix transmit(const CMatrix& S, const ChannelRealization& ch, double rho, RngStream& rng, bool noise) {
  if (rho < 0) throw ParameterError("transmit: rho must be nonnegative");
  double g = std::sqrt(rho);
  CMatrix Y;
  if (ch.kind == ChannelKind::RFF) {
    if (S.cols() != 1) throw ShapeError("transmit: RFF expects a T x 1 symbol column");
    if (S.rows() > ch.h_t.size()) throw ShapeError("transmit: RFF realization shorter than the signal");
    Y = CMatrix(S.rows(), 1);
    for (std::size_t t = 0; t < S.rows(); ++t) Y(t, 0) = g * S(t, 0) * ch.h_t[t];
  } else {
    if (S.cols() != ch.H.rows()) throw ShapeError("transmit: S has " + std::to_string(S.cols()) +
                                                  " columns, channel has " + std::to_string(ch.H.rows()) + " rows");
    Y = S * ch.H;
    Y *= g;
  }
  if (noise)
    for (std::size_t k = 0; k < Y.rows() * Y.cols(); ++k) Y.data()[k] += rng.cn();
  return Y;
}

}  // namespace dstc
