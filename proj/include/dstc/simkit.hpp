#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/channels.hpp"
#include "dstc/siso_diff.hpp"
#include "dstc/stcodes.hpp"
#include "json.hpp"

namespace dstc {

enum class Scheme {
  DPSK_MSDD,
  DAPSK_MSDD,
  SIMO_COH,
  SIMO_NONCOH,
  DUSTM,
  OSTBC_UNITARY,
  OSTBC_QAM,
  OMDC,
  QOSTBC_COMBINED,
  QOSTBC_UNCOMBINED
};
const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

enum class StbcDecoder { AUTO, FAST_ML, NEAR_OPT, ML, SRSD };
const char* to_string(StbcDecoder d);
StbcDecoder stbc_decoder_from_string(const std::string& s);

struct ConstellationSpec {
  ConstellationKind kind = ConstellationKind::PSK;
  ConstellationParams params;
  Constellation build() const { return dstc::build(kind, params); }
};

struct StopRule {
  long min_bit_errors = 200;
  long max_frames = 1000000;
};

struct SimConfig {
  Scheme scheme = Scheme::DPSK_MSDD;
  int M = 1, N = 1, T = 2;
  std::vector<ConstellationSpec> constellations{ConstellationSpec{}};  // one shared, or one per code symbol
  MsddMetric metric = MsddMetric::ML_RBF;
  DetectMode mode = DetectMode::COMBINED;
  StbcDecoder decoder = StbcDecoder::AUTO;
  CodeKind code = CodeKind::ALAMOUTI;
  std::vector<int> dustm_u{1, 1};
  int dustm_L = 4;
  ChannelModel channel;
  std::vector<double> ebn0_grid_db{10.0};
  int frame_len = 0;  // 0 = 150 symbols SISO, 50 blocks MIMO
  StopRule stop;
  std::uint64_t seed = 1;
  int workers = 1;
  bool noiseless = false;        // test hook
  bool genie_amplitude = false;  // receiver uses the true previous amplitude
};

struct ErrorStats {
  std::string scheme, constellation, metric;
  int M = 0, N = 0, T = 0;
  double fdts = 0, ebn0_db = 0, rho_db = 0;
  long frames = 0, bits = 0, bit_errors = 0, symbols = 0, symbol_errors = 0;
  double ber = 0, ber_ci_low = 0, ber_ci_high = 0, ser = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

double ebn0_to_rho(double ebn0_db, double eta);
double rho_to_ebn0_db(double rho, double eta);
// bits per channel use of the configured scheme
double spectral_efficiency(const SimConfig& cfg);
// throws ConfigError / UnsupportedError on incompatible settings
void validate_config(const SimConfig& cfg);

std::vector<ErrorStats> run_ber(const SimConfig& cfg);
bool monotone_sanity(const std::vector<ErrorStats>& rows);
// Wilson 95% interval
std::pair<double, double> wilson_interval(long errors, long trials);
// linear interpolation of log10(ber) over the grid; NaN when the target is not bracketed
double snr_at_ber(const std::vector<ErrorStats>& rows, double target);

extern const std::vector<std::string> kCsvColumns;
void write_csv(const std::vector<ErrorStats>& rows, const std::string& path, bool append = false,
               const std::string& header_comment = "");
// stream form; the header (comment lines plus column names) only when asked
void write_csv(std::ostream& out, const std::vector<ErrorStats>& rows, bool with_header = true,
               const std::string& header_comment = "");
std::vector<ErrorStats> read_csv(const std::string& path);

nlohmann::json constellation_spec_to_json(const ConstellationSpec& s);
ConstellationSpec constellation_spec_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const nlohmann::json& j);
std::string config_hash(const SimConfig& cfg);
std::string content_hash(const std::string& text);

}  // namespace dstc
