#include "dstc/simkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "dstc/diff_qostbc.hpp"
#include "dstc/diff_stbc.hpp"
#include "dstc/dustm.hpp"
#include "dstc/errors.hpp"
#include "dstc/parallel.hpp"

namespace dstc {

using nlohmann::json;

const std::vector<std::string> kCsvColumns = {
    "scheme", "M",         "N",          "T",           "constellation", "metric",        "fdts",
    "ebn0_db", "rho_db",   "frames",     "bits",        "bit_errors",    "ber",           "ber_ci_low",
    "ber_ci_high", "symbols", "symbol_errors", "ser",    "seed",          "config_hash"};

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::DPSK_MSDD: return "DPSK_MSDD";
    case Scheme::DAPSK_MSDD: return "DAPSK_MSDD";
    case Scheme::SIMO_COH: return "SIMO_COH";
    case Scheme::SIMO_NONCOH: return "SIMO_NONCOH";
    case Scheme::DUSTM: return "DUSTM";
    case Scheme::OSTBC_UNITARY: return "OSTBC_UNITARY";
    case Scheme::OSTBC_QAM: return "OSTBC_QAM";
    case Scheme::OMDC: return "OMDC";
    case Scheme::QOSTBC_COMBINED: return "QOSTBC_COMBINED";
    case Scheme::QOSTBC_UNCOMBINED: return "QOSTBC_UNCOMBINED";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(Scheme::QOSTBC_UNCOMBINED); ++k)
    if (s == to_string(static_cast<Scheme>(k))) return static_cast<Scheme>(k);
  throw ConfigError("unknown scheme '" + s + "'");
}

const char* to_string(StbcDecoder d) {
  switch (d) {
    case StbcDecoder::AUTO: return "AUTO";
    case StbcDecoder::FAST_ML: return "FAST_ML";
    case StbcDecoder::NEAR_OPT: return "NEAR_OPT";
    case StbcDecoder::ML: return "ML";
    case StbcDecoder::SRSD: return "SRSD";
  }
  return "?";
}

StbcDecoder stbc_decoder_from_string(const std::string& s) {
  for (auto d : {StbcDecoder::AUTO, StbcDecoder::FAST_ML, StbcDecoder::NEAR_OPT, StbcDecoder::ML, StbcDecoder::SRSD})
    if (s == to_string(d)) return d;
  throw ConfigError("unknown decoder '" + s + "'");
}

double ebn0_to_rho(double ebn0_db, double eta) {
  if (!(eta > 0)) throw ParameterError("ebn0_to_rho: eta must be positive");
  return eta * std::pow(10.0, ebn0_db / 10.0);
}

double rho_to_ebn0_db(double rho, double eta) {
  if (!(eta > 0) || !(rho > 0)) throw ParameterError("rho_to_ebn0_db: rho and eta must be positive");
  return 10.0 * std::log10(rho / eta);
}

namespace {
bool is_msdd(Scheme s) { return s == Scheme::DPSK_MSDD || s == Scheme::DAPSK_MSDD; }
bool is_simo(Scheme s) { return s == Scheme::SIMO_COH || s == Scheme::SIMO_NONCOH; }
bool is_siso_family(Scheme s) { return is_msdd(s) || is_simo(s); }
bool is_stbc(Scheme s) { return s == Scheme::OSTBC_UNITARY || s == Scheme::OSTBC_QAM || s == Scheme::OMDC; }
bool is_qostbc(Scheme s) { return s == Scheme::QOSTBC_COMBINED || s == Scheme::QOSTBC_UNCOMBINED; }

CodeKind effective_code(const SimConfig& cfg) {
  if (is_qostbc(cfg.scheme)) return CodeKind::MDC4;
  if (cfg.scheme == Scheme::OMDC && cfg.code != CodeKind::MDC4 && cfg.code != CodeKind::MDC8) return CodeKind::MDC4;
  return cfg.code;
}

std::vector<Constellation> build_alphabets(const SimConfig& cfg, int K) {
  if (cfg.constellations.empty()) throw ConfigError("no constellation given");
  std::vector<Constellation> out;
  if (cfg.constellations.size() == 1) {
    Constellation c = cfg.constellations[0].build();
    out.assign(std::max(K, 1), c);
  } else {
    if (static_cast<int>(cfg.constellations.size()) != K)
      throw ConfigError("need one constellation or one per code symbol (" + std::to_string(K) + ")");
    for (auto& s : cfg.constellations) out.push_back(s.build());
  }
  return out;
}

int symbols_per_block(const SimConfig& cfg) {
  if (is_stbc(cfg.scheme)) return make_code(effective_code(cfg)).K;
  if (is_qostbc(cfg.scheme)) return 4;
  return 1;
}

StbcDecoder resolve_decoder(const SimConfig& cfg, const std::vector<Constellation>& alph) {
  if (cfg.decoder != StbcDecoder::AUTO) return cfg.decoder;
  if (cfg.scheme == Scheme::OSTBC_UNITARY) return StbcDecoder::FAST_ML;
  (void)alph;
  return StbcDecoder::NEAR_OPT;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }
}  // namespace

double spectral_efficiency(const SimConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::DUSTM:
      if (!is_pow2(cfg.dustm_L)) throw ConfigError("DUSTM: L must be a power of two");
      return static_cast<double>(ilog2(cfg.dustm_L)) / cfg.M;
    case Scheme::OSTBC_UNITARY:
    case Scheme::OSTBC_QAM:
    case Scheme::OMDC:
    case Scheme::QOSTBC_COMBINED:
    case Scheme::QOSTBC_UNCOMBINED: {
      STCode code = make_code(effective_code(cfg));
      auto alph = build_alphabets(cfg, code.K);
      double bits = 0;
      for (auto& a : alph) bits += a.bits_per_symbol;
      return bits / code.T;
    }
    default: return cfg.constellations.at(0).build().bits_per_symbol;
  }
}

void validate_config(const SimConfig& cfg) {
  if (cfg.ebn0_grid_db.empty()) throw ConfigError("ebn0 grid is empty");
  if (cfg.N < 1 || cfg.M < 1) throw ConfigError("M and N must be positive");
  if (cfg.stop.max_frames < 1) throw ConfigError("stop.max_frames must be positive");
  if (cfg.frame_len < 0) throw ConfigError("frame_len must be nonnegative");
  if (!(cfg.channel.fdts >= 0 && cfg.channel.fdts < 1)) throw ConfigError("channel.fdts must lie in [0,1)");
  const Scheme s = cfg.scheme;
  if (is_siso_family(s)) {
    Constellation c = cfg.constellations.at(0).build();
    if (cfg.M != 1) throw ConfigError(std::string(to_string(s)) + " is single transmit antenna (M=1)");
    if (is_msdd(s) && cfg.N != 1) throw ConfigError("MSDD schemes are single receive antenna (N=1)");
    if (s == Scheme::DPSK_MSDD && c.kind != ConstellationKind::PSK) throw ConfigError("DPSK_MSDD needs a PSK alphabet");
    if (s == Scheme::DAPSK_MSDD && c.kind != ConstellationKind::DAPSK && c.kind != ConstellationKind::DASK)
      throw ConfigError("DAPSK_MSDD needs a DAPSK or DASK alphabet");
    if (s == Scheme::SIMO_NONCOH && c.kind != ConstellationKind::PSK)
      throw UnsupportedError("SIMO_NONCOH needs a PSK alphabet");
    if (is_msdd(s) && cfg.T < 2) throw ConfigError("MSDD window T must be at least 2");
    if (is_msdd(s) && cfg.metric == MsddMetric::GLRT && cfg.channel.kind == ChannelKind::RFF)
      throw ConfigError("unsupported metric/channel: GLRT cannot be used over RFF");
    if (is_msdd(s) && cfg.metric == MsddMetric::CORR && cfg.mode == DetectMode::COMBINED && !c.constant_envelope(1e-9))
      throw ConfigError("CORR needs a constant-envelope alphabet in combined mode");
    if (is_msdd(s) && cfg.metric == MsddMetric::ML_RFF && cfg.channel.kind != ChannelKind::RFF)
      throw ConfigError("ML_RFF metric needs the RFF channel");
    if (is_msdd(s) && cfg.metric == MsddMetric::ML_RFF && c.q_a > 1 && cfg.mode == DetectMode::QUASI_INDEPENDENT)
      throw UnsupportedError("ML_RFF with DAPSK supports combined detection only");
    if (cfg.channel.kind != ChannelKind::RBF && cfg.N != 1)
      throw UnsupportedError("AWGN_PHASE and RFF channels are single-antenna only");
    if (is_simo(s) && cfg.channel.kind == ChannelKind::RFF) throw UnsupportedError("SIMO schemes use AWGN or RBF");
    return;
  }
  if (cfg.channel.kind != ChannelKind::RBF) throw UnsupportedError("multi-antenna schemes use the RBF channel");
  if (s == Scheme::DUSTM) {
    if (static_cast<int>(cfg.dustm_u.size()) != cfg.M) throw ConfigError("DUSTM: u must have M entries");
    make_cyclic(cfg.dustm_u, cfg.dustm_L);
    if (!is_pow2(cfg.dustm_L)) throw ConfigError("DUSTM: L must be a power of two");
    return;
  }
  STCode code = make_code(effective_code(cfg));
  if (code.M != cfg.M) throw ConfigError("M does not match the code (" + std::to_string(code.M) + " antennas)");
  auto alph = build_alphabets(cfg, code.K);
  StbcDecoder dec = resolve_decoder(cfg, alph);
  if (s == Scheme::OSTBC_UNITARY) {
    if (cfg.code != CodeKind::ALAMOUTI && cfg.code != CodeKind::TH4)
      throw ConfigError("OSTBC schemes use ALAMOUTI or TH4");
    for (auto& a : alph)
      if (a.kind != ConstellationKind::PSK) throw ConfigError("OSTBC_UNITARY needs PSK alphabets");
  }
  if (s == Scheme::OSTBC_QAM && cfg.code != CodeKind::ALAMOUTI && cfg.code != CodeKind::TH4)
    throw ConfigError("OSTBC schemes use ALAMOUTI or TH4");
  if (is_stbc(s)) {
    if (dec == StbcDecoder::FAST_ML)
      for (auto& a : alph)
        if (!a.constant_envelope(1e-9)) throw ConfigError("FAST_ML needs constant-envelope alphabets");
    if (dec == StbcDecoder::SRSD)
      for (auto& a : alph)
        if (!a.rectangular) throw ConfigError("SRSD requires RECT_QAM alphabets");
    if (dec == StbcDecoder::ML) {
      double total = 1;
      for (auto& a : alph) total *= a.size();
      if (total > 65536) throw CapacityError("joint ML search space exceeds 2^16 candidates");
    }
  }
  if (s == Scheme::OMDC)
    for (auto& a : alph)
      for (auto& x : a.points)
        if (x.real() * x.imag() != 0.0) throw ConfigError("OMDC needs on-axis alphabets (OMDC4/OMDC8)");
  if (is_qostbc(s)) {
    const Constellation& c = alph[0];
    if (cfg.constellations.size() != 1) throw ConfigError("QOSTBC schemes use one common alphabet");
    if (s == Scheme::QOSTBC_UNCOMBINED) {
      if (!c.rectangular) throw ConfigError("un-combined QOSTBC needs a RECT_QAM alphabet");
      for (auto& x : c.points)
        if (x.real() == 0.0 || x.imag() == 0.0) throw ConfigError("alphabet admits degenerate un-combined blocks");
    } else {
      bool diag = false, anti = false;
      for (auto& x : c.points) {
        diag |= near(x.real(), x.imag());
        anti |= near(x.real(), -x.imag());
      }
      if (diag && anti) throw ConfigError("alphabet admits degenerate combined blocks (rotate it)");
    }
  }
}

std::pair<double, double> wilson_interval(long e, long n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054, p = static_cast<double>(e) / n, nn = static_cast<double>(n);
  double den = 1 + z * z / nn;
  double center = (p + z * z / (2 * nn)) / den;
  double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / den;
  return {e == 0 ? 0.0 : std::max(0.0, center - half), e == n ? 1.0 : std::min(1.0, center + half)};
}

namespace {
struct FrameResult {
  long bits = 0, bit_errors = 0, symbols = 0, symbol_errors = 0;
  void count(const Constellation& c, int tx, int rx) {
    bits += c.bits_per_symbol;
    ++symbols;
    if (tx != rx) {
      ++symbol_errors;
      bit_errors += c.bit_distance(tx, rx);
    }
  }
};

struct Prepared {
  SimConfig cfg;
  double rho = 1;
  int frame_len = 0;
  std::vector<Constellation> alph;
  std::unique_ptr<MsddDetector> msdd;
  STCode code;
  CyclicCode cyc;
  std::vector<std::uint32_t> dustm_labels;
  std::unique_ptr<NonunitaryMlDecoder> ml;
  StbcDecoder dec = StbcDecoder::AUTO;
  QostbcMode qmode;
};

std::vector<cd> column_values(const CMatrix& y) {
  std::vector<cd> v(y.rows());
  for (std::size_t t = 0; t < y.rows(); ++t) v[t] = y(t, 0);
  return v;
}

CMatrix row_of(const CMatrix& Y, std::size_t t) { return Y.block(t, 0, 1, Y.cols()); }

FrameResult frame_msdd(const Prepared& P, RngStream& rng) {
  const Constellation& c = P.alph[0];
  const int n = P.frame_len;
  std::vector<int> z(n);
  for (auto& v : z) v = static_cast<int>(rng.below(c.size()));
  std::vector<cd> s{diff_reference(c)};
  auto enc = diff_encode(z, c);
  s.insert(s.end(), enc.begin(), enc.end());
  ChannelRealization ch = draw_channel(P.cfg.channel, 1, 1, n + 1, rng);
  CMatrix Y = transmit(CMatrix::column(s), ch, P.rho, rng, !P.cfg.noiseless);
  auto zh = P.msdd->detect_frame(column_values(Y));
  FrameResult r;
  for (int t = 0; t < n; ++t) r.count(c, z[t], zh[t]);
  return r;
}

FrameResult frame_simo(const Prepared& P, RngStream& rng) {
  const Constellation& c = P.alph[0];
  const int n = P.frame_len;
  const bool diff = P.cfg.scheme == Scheme::SIMO_NONCOH;
  std::vector<int> z(n);
  for (auto& v : z) v = static_cast<int>(rng.below(c.size()));
  std::vector<cd> s;
  if (diff) {
    s.push_back(diff_reference(c));
    auto enc = diff_encode(z, c);
    s.insert(s.end(), enc.begin(), enc.end());
  } else {
    for (int v : z) s.push_back(c.points[v]);
  }
  ChannelRealization ch = draw_channel(P.cfg.channel, 1, P.cfg.N, static_cast<int>(s.size()), rng);
  CMatrix Y = transmit(CMatrix::column(s), ch, P.rho, rng, !P.cfg.noiseless);
  FrameResult r;
  for (int t = 0; t < n; ++t) {
    int zh = diff ? simo_diff_detect(row_of(Y, t), row_of(Y, t + 1), c)
                  : simo_mrc_detect(row_of(Y, t), ch.H, c, P.rho);
    r.count(c, z[t], zh);
  }
  return r;
}

FrameResult frame_dustm(const Prepared& P, RngStream& rng) {
  const int n = P.frame_len, L = P.cyc.L;
  std::vector<int> z(n);
  for (auto& v : z) v = static_cast<int>(rng.below(L));
  ChannelRealization ch = draw_channel(P.cfg.channel, P.cfg.M, P.cfg.N, n + 1, rng);
  const bool noise = !P.cfg.noiseless;
  CMatrix Yprev = transmit(CMatrix::identity(P.cfg.M), ch, P.rho, rng, noise);
  FrameResult r;
  const int bits = ilog2(L);
  int x = 0;
  for (int t = 0; t < n; ++t) {
    x = encode_index(z[t], x, L);
    CMatrix Y = transmit(P.cyc.codeword(x), ch, P.rho, rng, noise);
    int zh = dustm_ml_decode(Yprev, Y, P.cyc);
    r.bits += bits;
    ++r.symbols;
    if (zh != z[t]) {
      ++r.symbol_errors;
      r.bit_errors += std::popcount(P.dustm_labels[z[t]] ^ P.dustm_labels[zh]);
    }
    Yprev = std::move(Y);
  }
  return r;
}

FrameResult frame_stbc(const Prepared& P, RngStream& rng) {
  const STCode& code = P.code;
  const int n = P.frame_len, K = code.K;
  std::vector<std::vector<int>> z(n, std::vector<int>(K));
  for (auto& blk : z)
    for (int i = 0; i < K; ++i) blk[i] = static_cast<int>(rng.below(P.alph[i].size()));
  ChannelRealization ch = draw_channel(P.cfg.channel, code.M, P.cfg.N, n + 1, rng);
  const bool noise = !P.cfg.noiseless;
  const bool unitary = P.cfg.scheme == Scheme::OSTBC_UNITARY;
  DiffState st = DiffState::initial(code.M);
  CMatrix Yprev = transmit(st.S_prev, ch, P.rho, rng, noise);
  double a_hat = 1.0;
  FrameResult r;
  std::vector<cd> x(K), xh(K);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < K; ++i) x[i] = P.alph[i].points[z[t][i]];
    CMatrix V = assemble(code, x);
    double a_true_prev = st.a_prev;
    auto [S, next] = unitary ? encode_unitary(V, st) : encode_nonunitary(V, st);
    st = next;
    CMatrix Y = transmit(S, ch, P.rho, rng, noise);
    double a_use = P.cfg.genie_amplitude ? a_true_prev : a_hat;
    std::vector<int> zh;
    switch (P.dec) {
      case StbcDecoder::FAST_ML: zh = decode_fast_ml_unitary(Yprev, Y, code, P.alph); break;
      case StbcDecoder::NEAR_OPT: zh = decode_near_optimal(Yprev, Y, code, P.alph, a_use); break;
      case StbcDecoder::SRSD: zh = decode_srsd(Yprev, Y, code, P.alph, a_use); break;
      case StbcDecoder::ML: zh = P.ml->decode(Yprev, Y, P.rho, a_use); break;
      case StbcDecoder::AUTO: throw ContractError("decoder not resolved");
    }
    for (int i = 0; i < K; ++i) {
      r.count(P.alph[i], z[t][i], zh[i]);
      xh[i] = P.alph[i].points[zh[i]];
    }
    a_hat = unitary ? 1.0 : info_amplitude(code, xh);
    Yprev = std::move(Y);
  }
  return r;
}

FrameResult frame_qostbc(const Prepared& P, RngStream& rng) {
  const Constellation& c = P.alph[0];
  const int n = P.frame_len;
  std::vector<std::array<int, 4>> z(n);
  for (auto& blk : z)
    for (auto& v : blk) v = static_cast<int>(rng.below(c.size()));
  ChannelRealization ch = draw_channel(P.cfg.channel, 4, P.cfg.N, n + 1, rng);
  const bool noise = !P.cfg.noiseless;
  SubsystemState st;
  SubsystemPair prev = subsystem_split(transmit(abba_from_subsystems(st.S1, st.S2), ch, P.rho, rng, noise));
  double a1_hat = 1, a2_hat = 1;
  FrameResult r;
  for (int t = 0; t < n; ++t) {
    std::array<cd, 4> x;
    for (int i = 0; i < 4; ++i) x[i] = c.points[z[t][i]];
    InfoSubmatrices info = make_info_submatrices(P.qmode, x);
    double a1_true = st.a1, a2_true = st.a2;
    st = encode_subsystems(st, info);
    SubsystemPair cur = subsystem_split(transmit(abba_from_subsystems(st.S1, st.S2), ch, P.rho, rng, noise));
    double a1 = P.cfg.genie_amplitude ? a1_true : a1_hat;
    double a2 = P.cfg.genie_amplitude ? a2_true : a2_hat;
    std::array<int, 4> zh = P.qmode.mode == QostbcScheme::COMBINED ? decode_combined(prev, cur, c, a1, a2)
                                                                    : decode_uncombined(prev, cur, c, a1, a2);
    std::array<cd, 4> xh;
    for (int i = 0; i < 4; ++i) {
      r.count(c, z[t][i], zh[i]);
      xh[i] = c.points[zh[i]];
    }
    InfoSubmatrices dec = make_info_submatrices(P.qmode, xh);
    a1_hat = dec.a1;
    a2_hat = dec.a2;
    prev = std::move(cur);
  }
  return r;
}

std::unique_ptr<Prepared> prepare(const SimConfig& cfg, double rho) {
  auto P = std::make_unique<Prepared>();
  P->cfg = cfg;
  P->rho = rho;
  const Scheme s = cfg.scheme;
  const int K = symbols_per_block(cfg);
  P->alph = build_alphabets(cfg, K);
  int fl = cfg.frame_len > 0 ? cfg.frame_len : (is_siso_family(s) ? 150 : 50);
  if (is_msdd(s)) {
    const int step = cfg.T - 1;
    fl = (fl + step - 1) / step * step;
    MsddConfig mc;
    mc.T = cfg.T;
    mc.metric = cfg.metric;
    mc.mode = cfg.mode;
    mc.rho = rho;
    if (cfg.metric == MsddMetric::ML_RFF) mc.cov = rff_covariance(cfg.T, cfg.channel.fdts);
    P->msdd = std::make_unique<MsddDetector>(mc, P->alph[0]);
  }
  P->frame_len = fl;
  if (s == Scheme::DUSTM) {
    P->cyc = make_cyclic(cfg.dustm_u, cfg.dustm_L);
    P->dustm_labels = complementary_bitmap(cfg.dustm_L);
  }
  if (is_stbc(s)) {
    P->code = make_code(effective_code(cfg));
    P->dec = resolve_decoder(cfg, P->alph);
    if (P->dec == StbcDecoder::ML) P->ml = std::make_unique<NonunitaryMlDecoder>(P->code, P->alph);
  }
  if (is_qostbc(s)) P->qmode = s == Scheme::QOSTBC_COMBINED ? QostbcMode::combined() : QostbcMode::uncombined();
  return P;
}

FrameResult simulate_frame(const Prepared& P, RngStream& rng) {
  const Scheme s = P.cfg.scheme;
  if (is_msdd(s)) return frame_msdd(P, rng);
  if (is_simo(s)) return frame_simo(P, rng);
  if (s == Scheme::DUSTM) return frame_dustm(P, rng);
  if (is_stbc(s)) return frame_stbc(P, rng);
  return frame_qostbc(P, rng);
}

std::string alphabet_name(const SimConfig& cfg) {
  std::string out;
  for (std::size_t i = 0; i < cfg.constellations.size(); ++i) {
    if (i) out += "/";
    out += cfg.constellations[i].build().name();
  }
  if (cfg.scheme == Scheme::DUSTM) {
    out = "CYCLIC(L=" + std::to_string(cfg.dustm_L) + ",u=";
    for (std::size_t i = 0; i < cfg.dustm_u.size(); ++i) out += (i ? ";" : "") + std::to_string(cfg.dustm_u[i]);
    out += ")";
  }
  return out;
}

std::string metric_name(const SimConfig& cfg) {
  if (is_msdd(cfg.scheme)) {
    std::string m = to_string(cfg.metric);
    if (cfg.scheme == Scheme::DAPSK_MSDD) m += std::string("/") + to_string(cfg.mode);
    return m;
  }
  switch (cfg.scheme) {
    case Scheme::SIMO_COH: return "MRC";
    case Scheme::SIMO_NONCOH: return "DIFF";
    case Scheme::DUSTM: return "ML";
    case Scheme::QOSTBC_COMBINED: return "COMBINED";
    case Scheme::QOSTBC_UNCOMBINED: return "UNCOMBINED";
    default: break;
  }
  std::string d = to_string(resolve_decoder(cfg, {}));
  if (cfg.genie_amplitude) d += "/GENIE";
  return d;
}

int block_length(const SimConfig& cfg) {
  if (is_msdd(cfg.scheme)) return cfg.T;
  if (is_simo(cfg.scheme)) return cfg.scheme == Scheme::SIMO_NONCOH ? 2 : 1;
  if (cfg.scheme == Scheme::DUSTM) return cfg.M;
  return make_code(effective_code(cfg)).T;
}
}  // namespace

std::vector<ErrorStats> run_ber(const SimConfig& cfg) {
  validate_config(cfg);
  const double eta = spectral_efficiency(cfg);
  const std::string hash = config_hash(cfg);
  const int workers = resolve_workers(cfg.workers);
  const long batch = 4L * workers;
  std::vector<ErrorStats> rows;
  for (std::size_t gi = 0; gi < cfg.ebn0_grid_db.size(); ++gi) {
    const double ebn0 = cfg.ebn0_grid_db[gi];
    const double rho = ebn0_to_rho(ebn0, eta);
    auto P = prepare(cfg, rho);
    ErrorStats row;
    row.scheme = to_string(cfg.scheme);
    row.M = cfg.scheme == Scheme::DUSTM || is_siso_family(cfg.scheme) ? cfg.M : make_code(effective_code(cfg)).M;
    row.N = cfg.N;
    row.T = block_length(cfg);
    row.constellation = alphabet_name(cfg);
    row.metric = metric_name(cfg);
    row.fdts = cfg.channel.kind == ChannelKind::RFF ? cfg.channel.fdts : 0.0;
    row.ebn0_db = ebn0;
    row.rho_db = 10 * std::log10(rho);
    row.seed = cfg.seed;
    row.config_hash = hash;
    long frame = 0;
    bool done = false;
    while (!done) {
      long nb = std::min(batch, cfg.stop.max_frames - frame);
      std::vector<FrameResult> res(nb);
      parallel_for(nb, workers, [&](std::size_t i) {
        RngStream rng(cfg.seed, (static_cast<std::uint64_t>(gi) << 40) + static_cast<std::uint64_t>(frame + i));
        res[i] = simulate_frame(*P, rng);
      });
      for (long i = 0; i < nb; ++i) {
        row.bits += res[i].bits;
        row.bit_errors += res[i].bit_errors;
        row.symbols += res[i].symbols;
        row.symbol_errors += res[i].symbol_errors;
        ++frame;
        if (row.bit_errors >= cfg.stop.min_bit_errors || frame >= cfg.stop.max_frames) {
          done = true;
          break;
        }
      }
    }
    row.frames = frame;
    row.ber = row.bits ? static_cast<double>(row.bit_errors) / row.bits : 0.0;
    row.ser = row.symbols ? static_cast<double>(row.symbol_errors) / row.symbols : 0.0;
    std::tie(row.ber_ci_low, row.ber_ci_high) = wilson_interval(row.bit_errors, row.bits);
    rows.push_back(row);
  }
  return rows;
}

bool monotone_sanity(const std::vector<ErrorStats>& rows) {
  if (rows.size() < 2) return true;
  auto lo = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.ebn0_db < b.ebn0_db; });
  auto hi = std::max_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.ebn0_db < b.ebn0_db; });
  return hi->ber <= lo->ber;
}

double snr_at_ber(const std::vector<ErrorStats>& rows_in, double target) {
  auto rows = rows_in;
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.ebn0_db < b.ebn0_db; });
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    double b0 = rows[i].ber, b1 = rows[i + 1].ber;
    if (b0 >= target && b1 < target) {
      if (b1 <= 0) return rows[i + 1].ebn0_db;
      double l0 = std::log10(b0), l1 = std::log10(b1), lt = std::log10(target);
      return rows[i].ebn0_db + (lt - l0) / (l1 - l0) * (rows[i + 1].ebn0_db - rows[i].ebn0_db);
    }
  }
  return std::nan("");
}

namespace {
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace

void write_csv(std::ostream& out, const std::vector<ErrorStats>& rows, bool with_header,
               const std::string& header_comment) {
  if (with_header) {
    if (!header_comment.empty()) {
      std::istringstream hc(header_comment);
      for (std::string l; std::getline(hc, l);) out << "# " << l << "\n";
    }
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
    out << "\n";
  }
  for (auto& r : rows) {
    out << csv_field(r.scheme) << "," << r.M << "," << r.N << "," << r.T << "," << csv_field(r.constellation) << ","
        << csv_field(r.metric) << "," << fmt_double(r.fdts) << "," << fmt_double(r.ebn0_db) << ","
        << fmt_double(r.rho_db) << "," << r.frames << "," << r.bits << "," << r.bit_errors << ","
        << fmt_double(r.ber) << "," << fmt_double(r.ber_ci_low) << "," << fmt_double(r.ber_ci_high) << ","
        << r.symbols << "," << r.symbol_errors << "," << fmt_double(r.ser) << "," << r.seed << ","
        << r.config_hash << "\n";
  }
}

void write_csv(const std::vector<ErrorStats>& rows, const std::string& path, bool append,
               const std::string& header_comment) {
  bool has_content = false;
  if (append) {
    std::ifstream in(path);
    has_content = in.good() && in.peek() != std::ifstream::traits_type::eof();
  }
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(out, rows, !has_content, header_comment);
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<ErrorStats> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<ErrorStats> rows;
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    auto f = split_csv(line);
    if (f.size() != kCsvColumns.size()) throw IoError("malformed row in '" + path + "'");
    ErrorStats r;
    r.scheme = f[0];
    r.M = std::stoi(f[1]);
    r.N = std::stoi(f[2]);
    r.T = std::stoi(f[3]);
    r.constellation = f[4];
    r.metric = f[5];
    r.fdts = std::stod(f[6]);
    r.ebn0_db = std::stod(f[7]);
    r.rho_db = std::stod(f[8]);
    r.frames = std::stol(f[9]);
    r.bits = std::stol(f[10]);
    r.bit_errors = std::stol(f[11]);
    r.ber = std::stod(f[12]);
    r.ber_ci_low = std::stod(f[13]);
    r.ber_ci_high = std::stod(f[14]);
    r.symbols = std::stol(f[15]);
    r.symbol_errors = std::stol(f[16]);
    r.ser = std::stod(f[17]);
    r.seed = std::stoull(f[18]);
    r.config_hash = f[19];
    rows.push_back(r);
  }
  return rows;
}

json constellation_spec_to_json(const ConstellationSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  const auto& p = s.params;
  switch (s.kind) {
    case ConstellationKind::PSK:
    case ConstellationKind::RECT_QAM: j["q"] = p.q; break;
    case ConstellationKind::DASK:
      j["q_a"] = p.q_a;
      j["a"] = p.a;
      break;
    case ConstellationKind::DAPSK:
      j["q_p"] = p.q_p;
      j["q_a"] = p.q_a;
      j["a"] = p.a;
      break;
    case ConstellationKind::MDC_8QAM:
      j["r"] = p.r;
      j["theta1_deg"] = rad2deg(p.theta1);
      j["theta2_deg"] = rad2deg(p.theta2);
      break;
    case ConstellationKind::ROTATED:
      j["base"] = to_string(p.base);
      j["base_q"] = p.base_q;
      j["theta_deg"] = rad2deg(p.theta);
      break;
    default: break;
  }
  return j;
}

ConstellationSpec constellation_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("constellation must be an object");
  ConstellationSpec s;
  s.kind = constellation_kind_from_string(j.value("kind", std::string("PSK")));
  auto& p = s.params;
  p.q = j.value("q", p.q);
  p.q_p = j.value("q_p", p.q_p);
  p.q_a = j.value("q_a", p.q_a);
  p.a = j.value("a", p.a);
  p.r = j.value("r", p.r);
  p.theta = deg2rad(j.value("theta_deg", 0.0));
  p.theta1 = deg2rad(j.value("theta1_deg", 0.0));
  p.theta2 = deg2rad(j.value("theta2_deg", 0.0));
  if (j.contains("base")) p.base = constellation_kind_from_string(j["base"].get<std::string>());
  p.base_q = j.value("base_q", p.base_q);
  return s;
}

json config_to_json(const SimConfig& c) {
  json j;
  j["scheme"] = to_string(c.scheme);
  j["M"] = c.M;
  j["N"] = c.N;
  j["T"] = c.T;
  json cs = json::array();
  for (auto& s : c.constellations) cs.push_back(constellation_spec_to_json(s));
  j["constellations"] = cs;
  j["metric"] = to_string(c.metric);
  j["mode"] = to_string(c.mode);
  j["decoder"] = to_string(c.decoder);
  j["code"] = to_string(c.code);
  j["dustm"] = {{"u", c.dustm_u}, {"L", c.dustm_L}};
  j["channel"] = {{"kind", to_string(c.channel.kind)}, {"fdts", c.channel.fdts}, {"coherence", c.channel.coherence}};
  j["ebn0_db"] = c.ebn0_grid_db;
  j["frame_len"] = c.frame_len;
  j["stop"] = {{"min_bit_errors", c.stop.min_bit_errors}, {"max_frames", c.stop.max_frames}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["noiseless"] = c.noiseless;
  j["genie_amplitude"] = c.genie_amplitude;
  return j;
}

SimConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"scheme", "M", "N", "T", "constellation", "constellations", "metric",
                                                 "mode", "decoder", "code", "dustm", "channel", "ebn0_db",
                                                 "frame_len", "stop", "seed", "workers", "noiseless",
                                                 "genie_amplitude"};
  for (auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  try {
    SimConfig c;
    c.scheme = scheme_from_string(j.value("scheme", std::string("DPSK_MSDD")));
    c.M = j.value("M", c.M);
    c.N = j.value("N", c.N);
    c.T = j.value("T", c.T);
    if (j.contains("constellations")) {
      c.constellations.clear();
      for (auto& e : j["constellations"]) c.constellations.push_back(constellation_spec_from_json(e));
    } else if (j.contains("constellation")) {
      c.constellations = {constellation_spec_from_json(j["constellation"])};
    }
    c.metric = msdd_metric_from_string(j.value("metric", std::string(to_string(c.metric))));
    c.mode = detect_mode_from_string(j.value("mode", std::string(to_string(c.mode))));
    c.decoder = stbc_decoder_from_string(j.value("decoder", std::string("AUTO")));
    c.code = code_kind_from_string(j.value("code", std::string("ALAMOUTI")));
    if (j.contains("dustm")) {
      c.dustm_u = j["dustm"].value("u", c.dustm_u);
      c.dustm_L = j["dustm"].value("L", c.dustm_L);
    }
    if (j.contains("channel")) {
      const auto& ch = j["channel"];
      c.channel.kind = channel_kind_from_string(ch.value("kind", std::string("RBF")));
      c.channel.fdts = ch.value("fdts", 0.0);
      c.channel.coherence = ch.value("coherence", c.channel.coherence);
    }
    if (j.contains("ebn0_db")) {
      const auto& g = j["ebn0_db"];
      c.ebn0_grid_db.clear();
      if (g.is_array()) {
        for (auto& v : g) c.ebn0_grid_db.push_back(v.get<double>());
      } else if (g.is_object()) {
        double lo = g.at("lo").get<double>(), hi = g.at("hi").get<double>(), st = g.at("step").get<double>();
        if (!(st > 0)) throw ConfigError("ebn0_db.step must be positive");
        for (int k = 0; lo + k * st <= hi + 1e-9; ++k) c.ebn0_grid_db.push_back(lo + k * st);
      } else {
        c.ebn0_grid_db.push_back(g.get<double>());
      }
    }
    c.frame_len = j.value("frame_len", 0);
    if (j.contains("stop")) {
      c.stop.min_bit_errors = j["stop"].value("min_bit_errors", c.stop.min_bit_errors);
      c.stop.max_frames = j["stop"].value("max_frames", c.stop.max_frames);
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.noiseless = j.value("noiseless", false);
    c.genie_amplitude = j.value("genie_amplitude", false);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const SimConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("workers");  // results do not depend on it
  return content_hash(j.dump());
}

}  // namespace dstc
