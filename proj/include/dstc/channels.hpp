#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "dstc/cxmat.hpp"

namespace dstc {

// counter-based stream: draw k of stream (seed, substream) is a pure function of (seed, substream, k)
class RngStream {
 public:
  RngStream(std::uint64_t seed = 0, std::uint64_t substream = 0);
  std::uint64_t next_u64();
  double uniform();  // in (0, 1)
  double gaussian();
  cd cn();  // CN(0,1)
  std::uint32_t below(std::uint32_t n);
  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return sub_; }

 private:
  std::uint64_t seed_, sub_, key_, ctr_ = 0;
  bool has_spare_ = false;
  double spare_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

enum class ChannelKind { AWGN_PHASE, RBF, RFF };
const char* to_string(ChannelKind k);
ChannelKind channel_kind_from_string(const std::string& s);

struct ChannelModel {
  ChannelKind kind = ChannelKind::RBF;
  double fdts = 0.0;
  int coherence = 150;
};

struct ChannelRealization {
  ChannelKind kind = ChannelKind::RBF;
  CMatrix H;              // M x N gain (AWGN_PHASE: 1x1 unit phasor)
  std::vector<cd> h_t;    // RFF per-symbol gains
};

double jakes_phi(int m, double fdts);
CMatrix rff_covariance(int T, double fdts);

ChannelRealization draw_channel(const ChannelModel& model, int M, int N, int T, RngStream& rng);
CMatrix transmit(const CMatrix& S, const ChannelRealization& ch, double rho, RngStream& rng, bool noise = true);

}  // namespace dstc
