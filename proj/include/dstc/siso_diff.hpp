#pragma once
#include <string>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/cxmat.hpp"

namespace dstc {

enum class MsddMetric { ML_AWGN, ML_RBF, ML_RFF, GLRT, CORR };
enum class DetectMode { COMBINED, QUASI_INDEPENDENT };

const char* to_string(MsddMetric m);
const char* to_string(DetectMode m);
MsddMetric msdd_metric_from_string(const std::string& s);
DetectMode detect_mode_from_string(const std::string& s);

struct MsddConfig {
  int T = 2;
  MsddMetric metric = MsddMetric::ML_RBF;
  DetectMode mode = DetectMode::COMBINED;
  double rho = 0.0;  // linear SNR, 0 = not given
  CMatrix cov;       // RFF channel covariance, T x T
};

struct Candidate {
  std::vector<int> info;   // T-1 alphabet indices
  std::vector<cd> s;       // T symbols, s[0] is the reference
  std::vector<int> level;  // amplitude level of every entry
  double energy = 0;
};

struct MsddResult {
  std::vector<int> info;
  double metric = 0;
};

// symbols s_1..s_n for info z_1..z_n starting from s_0 (phase 0, level 0)
std::vector<cd> diff_encode(const std::vector<int>& info, const Constellation& c);
// the reference symbol s_0
cd diff_reference(const Constellation& c);
// amplitude level of every encoded symbol, s_0 included
std::vector<int> diff_levels(const std::vector<int>& info, const Constellation& c);

std::vector<Candidate> enumerate_candidates(const Constellation& c, int T, int ref_level = 0);

double ln_i0_approx(double z);

// precomputed candidate tables; detect() is const and thread-safe
class MsddDetector {
 public:
  MsddDetector(const MsddConfig& cfg, const Constellation& c);
  MsddResult detect(const std::vector<cd>& y, int ref_level = 0) const;
  // y[0] is the known reference at level 0; (y.size()-1) must be a multiple of T-1
  std::vector<int> detect_frame(const std::vector<cd>& y) const;
  const MsddConfig& config() const { return cfg_; }

 private:
  struct AmpPattern {
    CMatrix C;        // rho B (I + rho B)^-1, or (Lambda + I/rho)^-1 for constant envelope
    double logdet = 0;
  };
  MsddResult detect_combined(const std::vector<cd>& y, int ref_level) const;
  MsddResult detect_quasi(const std::vector<cd>& y, int ref_level) const;
  double score(const std::vector<cd>& y, const Candidate& cand, std::size_t amp_index, double& metric) const;
  std::size_t amp_pattern_index(const Candidate& cand) const;

  MsddConfig cfg_;
  Constellation c_;
  bool const_env_;
  std::vector<std::vector<Candidate>> table_;   // per reference level
  std::vector<Candidate> phase_table_;          // quasi-independent phase candidates
  std::vector<std::vector<Candidate>> amp_table_;  // per reference level, unit phase
  std::vector<AmpPattern> amp_patterns_;        // indexed by level sequence
};

MsddResult msdd_detect(const std::vector<cd>& y, const MsddConfig& cfg, const Constellation& c, int ref_level = 0);

// coherent maximum ratio combining; rho scales the reference points
int simo_mrc_detect(const CMatrix& y_row, const CMatrix& h_row, const Constellation& c, double rho = 1.0);
int simo_diff_detect(const CMatrix& y_prev, const CMatrix& y_cur, const Constellation& c);

}  // namespace dstc
