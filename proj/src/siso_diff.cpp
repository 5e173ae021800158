#include "dstc/siso_diff.hpp"

#include <cmath>
#include <numbers>

#include "dstc/errors.hpp"

namespace dstc {

namespace {
constexpr long kCandidateGuard = 1L << 20;

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > (1L << 40)) return r;
  }
  return r;
}

struct Layout {
  int q_p, q_a;
  double a, norm;
  std::vector<cd> phasor;
};

Layout layout_of(const Constellation& c) {
  if (c.kind != ConstellationKind::PSK && c.kind != ConstellationKind::DAPSK && c.kind != ConstellationKind::DASK)
    throw UnsupportedError(std::string("differential SISO needs PSK/DASK/DAPSK, got ") + to_string(c.kind));
  Layout l;
  l.q_p = c.q_p;
  l.q_a = c.q_a;
  l.a = c.kind == ConstellationKind::PSK ? 1.0 : c.ring_ratio;
  l.norm = c.kind == ConstellationKind::PSK ? 1.0 : c.dapsk_norm;
  if (l.q_p == 1) {
    l.phasor = {1.0};
  } else {
    l.phasor = psk(l.q_p).points;
  }
  return l;
}

double amp_of(const Layout& l, int level) { return l.norm * std::pow(l.a, level); }

// |y^H s|
double corr(const std::vector<cd>& y, const std::vector<cd>& s) {
  cd acc = 0;
  for (std::size_t t = 0; t < y.size(); ++t) acc += std::conj(y[t]) * s[t];
  return std::abs(acc);
}

// w^H C w for Hermitian C
double quad(const CMatrix& C, const std::vector<cd>& w) {
  const std::size_t n = w.size();
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += C(i, i).real() * std::norm(w[i]);
    cd acc = 0;
    for (std::size_t j = i + 1; j < n; ++j) acc += C(i, j) * w[j];
    s += 2 * (std::conj(w[i]) * acc).real();
  }
  return s;
}
}  // namespace

const char* to_string(MsddMetric m) {
  switch (m) {
    case MsddMetric::ML_AWGN: return "ML_AWGN";
    case MsddMetric::ML_RBF: return "ML_RBF";
    case MsddMetric::ML_RFF: return "ML_RFF";
    case MsddMetric::GLRT: return "GLRT";
    case MsddMetric::CORR: return "CORR";
  }
  return "?";
}

const char* to_string(DetectMode m) { return m == DetectMode::COMBINED ? "COMBINED" : "QUASI_INDEPENDENT"; }

MsddMetric msdd_metric_from_string(const std::string& s) {
  for (auto m : {MsddMetric::ML_AWGN, MsddMetric::ML_RBF, MsddMetric::ML_RFF, MsddMetric::GLRT, MsddMetric::CORR})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown MSDD metric '" + s + "'");
}

DetectMode detect_mode_from_string(const std::string& s) {
  if (s == "COMBINED") return DetectMode::COMBINED;
  if (s == "QUASI_INDEPENDENT") return DetectMode::QUASI_INDEPENDENT;
  throw ConfigError("unknown detection mode '" + s + "'");
}

cd diff_reference(const Constellation& c) {
  Layout l = layout_of(c);
  return amp_of(l, 0);
}

std::vector<int> diff_levels(const std::vector<int>& info, const Constellation& c) {
  Layout l = layout_of(c);
  std::vector<int> lv{0};
  int level = 0;
  for (int z : info) {
    if (z < 0 || z >= c.size()) throw ParameterError("diff_encode: info index " + std::to_string(z) + " out of range");
    level = (level + z % l.q_a) % l.q_a;
    lv.push_back(level);
  }
  return lv;
}

std::vector<cd> diff_encode(const std::vector<int>& info, const Constellation& c) {
  Layout l = layout_of(c);
  std::vector<cd> out;
  out.reserve(info.size());
  int level = 0, phase = 0;
  for (int z : info) {
    if (z < 0 || z >= c.size()) throw ParameterError("diff_encode: info index " + std::to_string(z) + " out of range");
    phase = (phase + z / l.q_a) % l.q_p;
    level = (level + z % l.q_a) % l.q_a;
    out.push_back(amp_of(l, level) * l.phasor[phase]);
  }
  return out;
}

std::vector<Candidate> enumerate_candidates(const Constellation& c, int T, int ref_level) {
  if (T < 2) throw ParameterError("enumerate_candidates: T must be at least 2");
  Layout l = layout_of(c);
  const long q = c.size();
  const long count = ipow(q, T - 1);
  if (count > kCandidateGuard)
    throw CapacityError("MSDD search space q^(T-1) = " + std::to_string(count) + " exceeds 2^20");
  if (ref_level < 0 || ref_level >= l.q_a) throw ParameterError("enumerate_candidates: bad reference level");
  std::vector<Candidate> out;
  out.reserve(count);
  std::vector<int> digits(T - 1, 0);
  for (long n = 0; n < count; ++n) {
    long rem = n;
    for (int t = T - 2; t >= 0; --t) {
      digits[t] = static_cast<int>(rem % q);
      rem /= q;
    }
    Candidate cand;
    cand.info = digits;
    int level = ref_level, phase = 0;
    cand.s.push_back(amp_of(l, level));
    cand.level.push_back(level);
    for (int z : digits) {
      phase = (phase + z / l.q_a) % l.q_p;
      level = (level + z % l.q_a) % l.q_a;
      cand.s.push_back(amp_of(l, level) * l.phasor[phase]);
      cand.level.push_back(level);
    }
    for (int lv : cand.level) cand.energy += amp_of(l, lv) * amp_of(l, lv);
    out.push_back(std::move(cand));
  }
  return out;
}

double ln_i0_approx(double z) {
  if (z < 0) throw ParameterError("ln_i0_approx: negative argument");
  if (z <= 20.0) return std::log(std::cyl_bessel_i(0.0, z));
  return z - std::log(std::sqrt(2 * std::numbers::pi * z)) + std::log1p(1.0 / (8 * z));
}

MsddDetector::MsddDetector(const MsddConfig& cfg, const Constellation& c) : cfg_(cfg), c_(c) {
  Layout l = layout_of(c);
  const_env_ = l.q_a == 1;
  if (cfg.T < 2) throw ParameterError("MSDD: T must be at least 2");
  if (cfg.metric == MsddMetric::GLRT && !cfg.cov.empty())
    throw UnsupportedError("GLRT metric cannot be used over a fast-fading channel");
  if (cfg.metric == MsddMetric::ML_RFF) {
    if (cfg.cov.rows() != static_cast<std::size_t>(cfg.T) || cfg.cov.cols() != static_cast<std::size_t>(cfg.T))
      throw ParameterError("ML_RFF needs a T x T channel covariance");
    if (!(cfg.rho > 0)) throw ParameterError("ML_RFF needs rho > 0");
    if (!const_env_ && cfg.mode == DetectMode::QUASI_INDEPENDENT)
      throw UnsupportedError("ML_RFF with DAPSK supports combined detection only");
  }
  if ((cfg.metric == MsddMetric::ML_AWGN || cfg.metric == MsddMetric::ML_RBF) && !(cfg.rho > 0)) {
    if (!const_env_) throw ParameterError(std::string(to_string(cfg.metric)) + " with DAPSK needs rho > 0");
    cfg_.rho = 1.0;
  }
  for (int r = 0; r < l.q_a; ++r) table_.push_back(enumerate_candidates(c, cfg.T, r));
  if (cfg.mode == DetectMode::QUASI_INDEPENDENT && !const_env_) {
    phase_table_ = enumerate_candidates(psk(std::max(l.q_p, 2)), cfg.T, 0);
    if (l.q_p == 1) phase_table_.resize(1);
    for (int r = 0; r < l.q_a; ++r) amp_table_.push_back(enumerate_candidates(dask(l.q_a, l.a), cfg.T, r));
  }
  if (cfg.metric == MsddMetric::ML_RFF) {
    const int T = cfg.T;
    long npat = ipow(l.q_a, T);
    amp_patterns_.resize(npat);
    for (long n = 0; n < npat; ++n) {
      std::vector<double> amp(T);
      long rem = n;
      for (int t = 0; t < T; ++t) {
        amp[t] = amp_of(l, static_cast<int>(rem % l.q_a));
        rem /= l.q_a;
      }
      AmpPattern& pat = amp_patterns_[n];
      if (const_env_) {
        CMatrix m = cfg.cov;
        for (int t = 0; t < T; ++t) m(t, t) += 1.0 / cfg.rho;
        pat.C = inverse(m);
      } else {
        CMatrix B(T, T);
        for (int i = 0; i < T; ++i)
          for (int j = 0; j < T; ++j) B(i, j) = amp[i] * cfg.cov(i, j) * amp[j];
        CMatrix IpB = CMatrix::identity(T) + cfg.rho * B;
        pat.C = cfg.rho * B * inverse(IpB);
        // symmetrize against rounding
        pat.C = 0.5 * (pat.C + hermitian(pat.C));
        pat.logdet = std::log(determinant(IpB).real());
      }
    }
  }
}

std::size_t MsddDetector::amp_pattern_index(const Candidate& cand) const {
  std::size_t idx = 0, mul = 1;
  for (int lv : cand.level) {
    idx += lv * mul;
    mul *= c_.q_a;
  }
  return idx;
}

double MsddDetector::score(const std::vector<cd>& y, const Candidate& cand, std::size_t amp_index,
                           double& metric) const {
  const double rho = cfg_.rho;
  switch (cfg_.metric) {
    case MsddMetric::ML_AWGN: {
      double x = corr(y, cand.s);
      metric = ln_i0_approx(2 * std::sqrt(rho) * x) - rho * cand.energy;
      return metric;
    }
    case MsddMetric::ML_RBF: {
      double x = corr(y, cand.s);
      metric = rho / (1 + rho * cand.energy) * x * x - std::log1p(rho * cand.energy);
      return metric;
    }
    case MsddMetric::GLRT: {
      double x = corr(y, cand.s);
      metric = x * x / cand.energy;
      return metric;
    }
    case MsddMetric::CORR: {
      metric = corr(y, cand.s);
      return metric;
    }
    case MsddMetric::ML_RFF: {
      const AmpPattern& pat = amp_patterns_[amp_index];
      std::vector<cd> w(y.size());
      for (std::size_t t = 0; t < y.size(); ++t) {
        cd ph = cand.s[t] / std::abs(cand.s[t]);
        w[t] = std::conj(ph) * y[t];
      }
      if (const_env_) {
        metric = quad(pat.C, w);
        return -metric;
      }
      metric = quad(pat.C, w) - pat.logdet;
      return metric;
    }
  }
  return 0;
}

MsddResult MsddDetector::detect_combined(const std::vector<cd>& y, int ref_level) const {
  const auto& tab = table_[ref_level];
  double best = -INFINITY, best_metric = 0;
  std::size_t arg = 0;
  for (std::size_t n = 0; n < tab.size(); ++n) {
    double m;
    std::size_t ai = cfg_.metric == MsddMetric::ML_RFF ? amp_pattern_index(tab[n]) : 0;
    double s = score(y, tab[n], ai, m);
    if (s > best) {
      best = s;
      best_metric = m;
      arg = n;
    }
  }
  return {tab[arg].info, best_metric};
}

MsddResult MsddDetector::detect_quasi(const std::vector<cd>& y, int ref_level) const {
  // phase first with the constant-envelope correlation, then amplitudes given that phase
  double best = -INFINITY;
  std::size_t parg = 0;
  for (std::size_t n = 0; n < phase_table_.size(); ++n) {
    double x = corr(y, phase_table_[n].s);
    if (x > best) {
      best = x;
      parg = n;
    }
  }
  const Candidate& ph = phase_table_[parg];
  const auto& amps = amp_table_[ref_level];
  double best_a = -INFINITY, best_metric = 0;
  std::size_t aarg = 0;
  Candidate joint;
  joint.s.resize(cfg_.T);
  for (std::size_t n = 0; n < amps.size(); ++n) {
    for (int t = 0; t < cfg_.T; ++t) joint.s[t] = amps[n].s[t] * ph.s[t];
    joint.level = amps[n].level;
    joint.energy = amps[n].energy;
    double m;
    double s = score(y, joint, 0, m);
    if (s > best_a) {
      best_a = s;
      best_metric = m;
      aarg = n;
    }
  }
  MsddResult r;
  r.metric = best_metric;
  for (int t = 0; t < cfg_.T - 1; ++t) {
    int p = c_.q_p == 1 ? 0 : ph.info[t];
    r.info.push_back(p * c_.q_a + amps[aarg].info[t]);
  }
  return r;
}

MsddResult MsddDetector::detect(const std::vector<cd>& y, int ref_level) const {
  if (static_cast<int>(y.size()) != cfg_.T) throw ShapeError("msdd_detect: window length differs from T");
  if (ref_level < 0 || ref_level >= c_.q_a) throw ParameterError("msdd_detect: bad reference level");
  if (cfg_.mode == DetectMode::QUASI_INDEPENDENT && !const_env_) return detect_quasi(y, ref_level);
  return detect_combined(y, ref_level);
}

std::vector<int> MsddDetector::detect_frame(const std::vector<cd>& y) const {
  const int step = cfg_.T - 1;
  if (y.empty() || (y.size() - 1) % step != 0) throw ShapeError("detect_frame: frame length must be 1 + k(T-1)");
  std::vector<int> out;
  out.reserve(y.size() - 1);
  int level = 0;
  std::vector<cd> win(cfg_.T);
  for (std::size_t w0 = 0; w0 + step < y.size(); w0 += step) {
    for (int t = 0; t < cfg_.T; ++t) win[t] = y[w0 + t];
    MsddResult r = detect(win, level);
    for (int z : r.info) {
      out.push_back(z);
      level = (level + z % c_.q_a) % c_.q_a;
    }
  }
  return out;
}

MsddResult msdd_detect(const std::vector<cd>& y, const MsddConfig& cfg, const Constellation& c, int ref_level) {
  return MsddDetector(cfg, c).detect(y, ref_level);
}

int simo_mrc_detect(const CMatrix& y_row, const CMatrix& h_row, const Constellation& c, double rho) {
  if (y_row.rows() != 1 || h_row.rows() != 1 || y_row.cols() != h_row.cols())
    throw ShapeError("simo_mrc_detect: expects matching 1 x N rows");
  cd st = 0;
  double hh = 0;
  for (std::size_t n = 0; n < y_row.cols(); ++n) {
    st += y_row(0, n) * std::conj(h_row(0, n));
    hh += std::norm(h_row(0, n));
  }
  double g = std::sqrt(rho) * hh;
  int arg = 0;
  double best = INFINITY;
  for (int i = 0; i < c.size(); ++i) {
    double d = std::norm(st - g * c.points[i]);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

int simo_diff_detect(const CMatrix& y_prev, const CMatrix& y_cur, const Constellation& c) {
  if (c.kind != ConstellationKind::PSK) throw UnsupportedError("simo_diff_detect needs a PSK alphabet");
  if (y_prev.rows() != 1 || y_cur.rows() != 1 || y_prev.cols() != y_cur.cols())
    throw ShapeError("simo_diff_detect: expects matching 1 x N rows");
  cd v = 0;
  for (std::size_t n = 0; n < y_prev.cols(); ++n) v += y_prev(0, n) * std::conj(y_cur(0, n));
  int arg = 0;
  double best = -INFINITY;
  for (int i = 0; i < c.size(); ++i) {
    double m = (c.points[i] * v).real();
    if (m > best) {
      best = m;
      arg = i;
    }
  }
  return arg;
}

}  // namespace dstc
