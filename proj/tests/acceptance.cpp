// Acceptance runner: one PASS/FAIL line per criterion.
// usage: dstc_acceptance [k ...]   (no argument runs all ten)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/channels.hpp"
#include "dstc/design_analysis.hpp"
#include "dstc/diff_qostbc.hpp"
#include "dstc/diff_stbc.hpp"
#include "dstc/dustm.hpp"
#include "dstc/simkit.hpp"
#include "dstc/siso_diff.hpp"
#include "dstc/stcodes.hpp"

using namespace dstc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::mt19937_64 gen(20240601);
cd rnd() {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  return {n(gen), n(gen)};
}
CMatrix rnd_mat(int r, int c) {
  CMatrix m(r, c);
  for (std::size_t k = 0; k < m.rows() * m.cols(); ++k) m.data()[k] = rnd();
  return m;
}

std::vector<CMatrix> ostbc_book(const STCode& code, const Constellation& c) {
  std::vector<CMatrix> book;
  long n = 1;
  for (int i = 0; i < code.K; ++i) n *= c.size();
  for (long l = 0; l < n; ++l) {
    std::vector<cd> x(code.K);
    long r = l;
    for (auto& v : x) v = c.points[r % c.size()], r /= c.size();
    book.push_back(assemble(code, x));
  }
  return book;
}

// 1: structural identities
Outcome structural() {
  Outcome o;
  o.require(validate_ostbc(make_code(CodeKind::ALAMOUTI)).all_pass(), "Alamouti OSTBC rules");
  o.require(validate_ostbc(make_code(CodeKind::TH4)).all_pass(), "TH4 OSTBC rules");
  o.require(validate_mdc(make_code(CodeKind::MDC4)).all_pass(), "MDC4 rules");
  o.require(validate_mdc(make_code(CodeKind::MDC8)).all_pass(), "MDC8 rules");
  double dual = 0, gram_dev = 0;
  for (auto k : {CodeKind::ALAMOUTI, CodeKind::TH4, CodeKind::MDC4, CodeKind::MDC8}) {
    auto code = make_code(k);
    for (int t = 0; t < 1000; ++t) {
      std::vector<cd> x(code.K);
      for (auto& v : x) v = rnd();
      dual = std::max(dual, max_abs_diff(assemble(code, x), assemble_uq(code, x)));
      if (k == CodeKind::MDC4 || k == CodeKind::MDC8) {
        auto g = gram(code, x);
        gram_dev = std::max(gram_dev, max_abs_diff(g.closed_form, g.product));
      }
    }
  }
  o.require(dual < 1e-12, fmt("dual forms max dev %.1e", dual));
  o.require(gram_dev < 1e-12, fmt("Gram closed form max dev %.1e", gram_dev));
  long pairs = 0;
  bool cert = true;
  for (auto k : {CodeKind::ALAMOUTI, CodeKind::TH4}) {
    auto code = make_code(k);
    auto book = ostbc_book(code, psk(4));
    for (std::size_t i = 0; i < book.size(); ++i)
      for (std::size_t j = i + 1; j < book.size(); ++j) {
        CMatrix D = book[i] - book[j];
        CMatrix G = hermitian(D) * D;
        double c = G(0, 0).real();
        cert &= c > 1e-9 && max_abs_diff(G, CMatrix::identity(code.M) * cd(c)) < 1e-12;
        ++pairs;
      }
  }
  o.require(cert, "D^H D = cI over " + std::to_string(pairs) + " QPSK pairs");
  return o;
}

// 2: metric equivalences, exact winner equality
Outcome metric_equivalence() {
  Outcome o;
  auto c = psk(8);
  int agree = 0;
  for (int n = 0; n < 1000; ++n) {
    int T = 2 + n % 3;
    std::vector<int> info(T - 1);
    for (auto& z : info) z = static_cast<int>(gen() % 8);
    auto s = diff_encode(info, c);
    s.insert(s.begin(), diff_reference(c));
    cd h = rnd();
    std::vector<cd> y(T);
    for (int t = 0; t < T; ++t) y[t] = std::sqrt(10.0) * h * s[t] + rnd();
    std::vector<std::vector<int>> w;
    for (auto m : {MsddMetric::GLRT, MsddMetric::ML_RBF, MsddMetric::ML_AWGN, MsddMetric::CORR}) {
      MsddConfig cfg;
      cfg.T = T;
      cfg.metric = m;
      cfg.rho = 10.0;
      w.push_back(msdd_detect(y, cfg, c).info);
    }
    agree += w[0] == w[1] && w[1] == w[2] && w[2] == w[3];
  }
  o.require(agree == 1000, "MSDD metrics agree " + std::to_string(agree) + "/1000");

  auto code = make_code(CodeKind::ALAMOUTI);
  auto q = same_alphabet(code, psk(4));
  std::vector<CMatrix> cands;
  std::vector<std::vector<int>> idx;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      cands.push_back(vstack(CMatrix::identity(2), assemble(code, {q[0].points[a], q[1].points[b]})));
      idx.push_back({a, b});
    }
  int fast = 0;
  for (int n = 0; n < 500; ++n) {
    int a = static_cast<int>(gen() % 4), b = static_cast<int>(gen() % 4);
    CMatrix Sp = assemble(code, {q[0].points[gen() % 4], q[1].points[gen() % 4]});
    CMatrix H = rnd_mat(2, 1 + n % 2);
    CMatrix Yp = std::sqrt(5.0) * Sp * H + rnd_mat(2, H.cols());
    CMatrix Yc = std::sqrt(5.0) * assemble(code, {q[0].points[a], q[1].points[b]}) * Sp * H + rnd_mat(2, H.cols());
    fast += decode_fast_ml_unitary(Yp, Yc, code, q) == idx[decode_matrix_ml_general(Yp, Yc, cands, 5.0)];
  }
  o.require(fast == 500, "fast ML == general ML " + std::to_string(fast) + "/500");

  auto qam = same_alphabet(code, rect_qam(16));
  int sep = 0;
  for (int n = 0; n < 1000; ++n) {
    CMatrix Yp = rnd_mat(2, 1), Yc = rnd_mat(2, 1);
    double ap = 0.3 + 1.2 * std::uniform_real_distribution<double>()(gen);
    sep += decode_srsd(Yp, Yc, code, qam, ap) == decode_near_optimal(Yp, Yc, code, qam, ap);
  }
  o.require(sep == 1000, "SRSD == near-optimal " + std::to_string(sep) + "/1000");
  return o;
}

// 3: design searches
Outcome design_search() {
  Outcome o;
  GridSpec g;
  g.axes = {{"theta_deg", 0, 45, 0.01}};
  auto r = grid_search(SearchObjective::QAM_ROTATION, g, {});
  o.require(std::abs(r.best[0] - 13.28) <= 0.05, fmt("QAM rotation argmax %.2f deg", r.best[0]));
  GridSpec h;
  h.axes = {{"theta1_deg", 0, 89.9, 0.1}, {"theta2_deg", 0, 89.9, 0.1}};
  auto m = grid_search(SearchObjective::MDC_8QAM, h, {});
  bool a = std::abs(m.best[0] - 12.73) <= 0.5 && std::abs(m.best[1] - 58.18) <= 0.5;
  bool b = std::abs(m.best[0] - 77.27) <= 0.5 && std::abs(m.best[1] - 31.82) <= 0.5;
  o.require(a || b, fmt2("8-QAM optimum (%.1f, %.1f) deg", m.best[0], m.best[1]));
  auto s4 = search_u(2, 4), s16 = search_u(2, 16);
  double d4 = std::abs(s4.coding_gain - coding_gain_u(table_u(2, 1), 4));
  double d16 = std::abs(s16.coding_gain - coding_gain_u(table_u(2, 2), 16));
  o.require(d4 < 1e-9 && d16 < 1e-9,
            fmt2("search_u CG %.6f (L=4), ", s4.coding_gain, 0) + fmt("%.6f (L=16)", s16.coding_gain));
  return o;
}

// 4: rank and determinant certificates
Outcome diversity() {
  Outcome o;
  bool full = true;
  for (int M = 1; M <= 5; ++M)
    for (int eta : {1, 2}) {
      auto code = make_cyclic(table_u(M, eta), table_L(M, eta));
      std::vector<CMatrix> book;
      for (int l = 0; l < code.L; ++l) book.push_back(code.codeword(l));
      full &= distance_spectrum(book, 1).min_rank == M;
    }
  o.require(full, "cyclic table codebooks full rank over all pairs");
  double d0 = mdc_min_det(rect_qam(4), 4, 4).value;
  double d1 = mdc_min_det(rotated(rect_qam(4), deg2rad(13.28)), 4, 4).value;
  o.require(d0 == 0.0, fmt("4-QAM min-det %.3g", d0));
  o.require(d1 > 0.0, fmt("rotated 4-QAM min-det %.4g", d1));
  int rk = rank(actual_info_matrix({cd(0.8), 0, 0, 0}, 1.0, 1.0, 2));
  o.require(rk == 2, "un-combined worst-case rank " + std::to_string(rk));
  return o;
}

SimConfig sim(Scheme s, std::vector<double> grid, long errors, std::uint64_t seed) {
  SimConfig c;
  c.scheme = s;
  c.ebn0_grid_db = std::move(grid);
  c.stop = {errors, 2000000};
  c.seed = seed;
  c.workers = 0;
  return c;
}
std::string curve(const std::vector<ErrorStats>& r) {
  std::string s;
  for (auto& x : r) s += fmt2(" %.0f:%.2e", x.ebn0_db, x.ber);
  return s;
}

// 5: coherent vs non-coherent SIMO
Outcome anchor_a() {
  Outcome o;
  auto c = sim(Scheme::SIMO_COH, {0, 2, 4, 6, 8, 10, 12, 14}, 2000, 7);
  c.N = 2;
  auto coh = run_ber(c);
  c.scheme = Scheme::SIMO_NONCOH;
  auto non = run_ber(c);
  double a = snr_at_ber(coh, 1e-2), b = snr_at_ber(non, 1e-2);
  double gap = b - a;
  o.require(std::abs(gap - 3.0) <= 0.7, fmt2("coh %.2f dB, noncoh ", a, 0) + fmt("%.2f dB", b) + fmt(", gap %.2f dB", gap));
  return o;
}

// 6: Alamouti QPSK vs cyclic group code at 2 bit/s/Hz
Outcome anchor_b() {
  Outcome o;
  auto c = sim(Scheme::OSTBC_UNITARY, {14, 16, 18, 20, 22}, 2000, 11);
  c.M = 2;
  auto al = run_ber(c);
  c.scheme = Scheme::DUSTM;
  c.dustm_u = table_u(2, 2);
  c.dustm_L = table_L(2, 2);
  auto du = run_ber(c);
  double a = snr_at_ber(al, 1e-3), b = snr_at_ber(du, 1e-3);
  o.require(std::abs(b - a - 3.0) <= 1.0,
            fmt2("Alamouti %.2f dB, cyclic ", a, 0) + fmt("%.2f dB", b) + fmt(", gap %.2f dB", b - a));
  return o;
}

// 7: 16-DAPSK ring ratio at 18 dB
Outcome anchor_c() {
  Outcome o;
  GridSpec g;
  g.axes = {{"a", 1.4, 3.0, 0.1}};
  SearchBudget b;
  b.bits_per_point = 8000000;
  b.workers = 0;
  b.seed = 3;
  auto r = grid_search(SearchObjective::RING_RATIO, g, b);
  std::string tr;
  for (auto& t : r.trace) tr += fmt2(" %.1f:%.2e", t.params[0], t.objective);
  o.require(std::abs(r.best[0] - 2.1) <= 0.2 + 1e-9, fmt("argmin a = %.1f;", r.best[0]) + tr);
  return o;
}

// 8: error floor removal over fast fading
Outcome anchor_d() {
  Outcome o;
  double ratio[2];
  int k = 0;
  for (int T : {2, 4}) {
    auto c = sim(Scheme::DPSK_MSDD, {20, 30}, 2000, 5);
    c.constellations[0].params.q = 16;
    c.T = T;
    c.metric = MsddMetric::ML_RFF;
    c.channel = {ChannelKind::RFF, 0.02, 150};
    auto r = run_ber(c);
    ratio[k++] = r[1].ber / r[0].ber;
    o.detail += (o.detail.empty() ? "" : "; ") + fmt("T=%.0f", T) + curve(r);
  }
  o.require(ratio[0] > 0.5, fmt("T=2 ratio %.3f (> 0.5)", ratio[0]));
  o.require(ratio[1] < 0.2, fmt("T=4 ratio %.3f (< 0.2)", ratio[1]));
  return o;
}

// 9: near-optimal vs ML for Alamouti 16-QAM
Outcome anchor_e() {
  Outcome o;
  auto c = sim(Scheme::OSTBC_QAM, {16, 18, 20, 22, 24}, 3000, 5);
  c.M = 2;
  c.constellations[0].kind = ConstellationKind::RECT_QAM;
  c.constellations[0].params.q = 16;
  c.decoder = StbcDecoder::NEAR_OPT;
  auto near = run_ber(c);
  c.decoder = StbcDecoder::ML;
  auto ml = run_ber(c);
  double a = snr_at_ber(near, 1e-3), b = snr_at_ber(ml, 1e-3);
  o.require(a - b <= 0.5, fmt2("near-opt %.2f dB, ML ", a, 0) + fmt("%.2f dB", b) + fmt(", gap %.2f dB", a - b));
  return o;
}

// 10: combined MDC-QOSTBC vs TH4 at 4 bit/s/Hz
Outcome anchor_f() {
  Outcome o;
  auto c = sim(Scheme::QOSTBC_COMBINED, {16, 18, 20, 22, 24}, 2000, 5);
  c.M = 4;
  c.constellations[0].kind = ConstellationKind::ROTATED;
  c.constellations[0].params.base = ConstellationKind::RECT_QAM;
  c.constellations[0].params.base_q = 16;
  c.constellations[0].params.theta = deg2rad(0.5 * rad2deg(std::atan(0.5)));
  auto q = run_ber(c);
  c.scheme = Scheme::OSTBC_QAM;
  c.code = CodeKind::TH4;
  ConstellationSpec a, b;
  a.kind = b.kind = ConstellationKind::RECT_QAM;
  a.params.q = 32;
  b.params.q = 64;
  c.constellations = {a, a, b};
  auto t = run_ber(c);
  double x = snr_at_ber(q, 1e-3), y = snr_at_ber(t, 1e-3);
  o.require(std::abs(y - x - 1.5) <= 1.0,
            fmt2("QOSTBC %.2f dB, TH4 32/32/64 ", x, 0) + fmt("%.2f dB", y) + fmt(", gap %.2f dB", y - x));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> crit = {
      {"structural suite", structural},
      {"metric equivalence", metric_equivalence},
      {"design searches", design_search},
      {"diversity certificates", diversity},
      {"SIMO coherent vs non-coherent", anchor_a},
      {"Alamouti vs cyclic group code", anchor_b},
      {"DAPSK ring ratio", anchor_c},
      {"error floor removal", anchor_d},
      {"near-optimal vs ML", anchor_e},
      {"combined QOSTBC vs TH4", anchor_f},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int k = 1; k <= 10; ++k) which.push_back(k);
  int failed = 0;
  for (int k : which) {
    if (k < 1 || k > 10) {
      std::fprintf(stderr, "no criterion %d\n", k);
      return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = crit[k - 1].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", k, crit[k - 1].first, o.detail.c_str(), dt);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
