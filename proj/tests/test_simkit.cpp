#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "dstc/errors.hpp"
#include "dstc/simkit.hpp"

using namespace dstc;

namespace {
SimConfig base(Scheme s) {
  SimConfig c;
  c.scheme = s;
  c.ebn0_grid_db = {10};
  c.stop = {1000000, 20};
  return c;
}
ConstellationSpec spec(ConstellationKind k, int q = 4) {
  ConstellationSpec s;
  s.kind = k;
  s.params.q = q;
  return s;
}

std::vector<SimConfig> all_schemes() {
  std::vector<SimConfig> cs;
  {
    auto c = base(Scheme::DPSK_MSDD);
    c.constellations = {spec(ConstellationKind::PSK, 8)};
    c.T = 3;
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::DAPSK_MSDD);
    ConstellationSpec d;
    d.kind = ConstellationKind::DAPSK;
    d.params.q_p = 8;
    d.params.q_a = 2;
    d.params.a = 2.1;
    c.constellations = {d};
    c.T = 3;
    c.channel.kind = ChannelKind::AWGN_PHASE;
    c.metric = MsddMetric::ML_AWGN;
    cs.push_back(c);
    c.metric = MsddMetric::GLRT;
    c.mode = DetectMode::QUASI_INDEPENDENT;
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::DPSK_MSDD);
    c.constellations = {spec(ConstellationKind::PSK, 16)};
    c.T = 3;
    c.channel = {ChannelKind::RFF, 0.0, 150};
    c.metric = MsddMetric::ML_RFF;
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::SIMO_COH);
    c.N = 2;
    cs.push_back(c);
    c.scheme = Scheme::SIMO_NONCOH;
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::DUSTM);
    c.M = 2;
    c.dustm_u = {1, 7};
    c.dustm_L = 16;
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::OSTBC_UNITARY);
    c.M = 2;
    cs.push_back(c);
  }
  for (auto d : {StbcDecoder::NEAR_OPT, StbcDecoder::SRSD, StbcDecoder::ML}) {
    auto c = base(Scheme::OSTBC_QAM);
    c.M = 2;
    c.decoder = d;
    c.constellations = {spec(ConstellationKind::RECT_QAM, 16)};
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::OSTBC_QAM);
    c.M = 4;
    c.code = CodeKind::TH4;
    c.constellations = {spec(ConstellationKind::RECT_QAM, 4), spec(ConstellationKind::CIRC_8QAM, 8),
                        spec(ConstellationKind::CIRC_8QAM, 8)};
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::OMDC);
    c.M = 4;
    c.constellations = {spec(ConstellationKind::OMDC4)};
    cs.push_back(c);
  }
  {
    auto c = base(Scheme::QOSTBC_COMBINED);
    c.M = 4;
    ConstellationSpec r;
    r.kind = ConstellationKind::ROTATED;
    r.params.base_q = 16;
    r.params.theta = deg2rad(13.28);
    c.constellations = {r};
    cs.push_back(c);
    c.scheme = Scheme::QOSTBC_UNCOMBINED;
    c.constellations = {spec(ConstellationKind::RECT_QAM, 16)};
    cs.push_back(c);
  }
  return cs;
}

std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}
std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dstc_test_" + name)).string();
}
}  // namespace

TEST_CASE("snr conventions") {
  CHECK(ebn0_to_rho(10, 2) == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(10 * std::log10(ebn0_to_rho(10, 2)) == doctest::Approx(13.0103).epsilon(1e-5));
  CHECK(ebn0_to_rho(7, 1) == doctest::Approx(std::pow(10, 0.7)).epsilon(1e-14));
  for (double r : {0.01, 1.0, 37.5, 1e4}) CHECK(std::abs(ebn0_to_rho(rho_to_ebn0_db(r, 3), 3) - r) < 1e-12 * r);
}

TEST_CASE("spectral efficiency") {
  auto cs = all_schemes();
  CHECK(spectral_efficiency(cs[0]) == doctest::Approx(3));
  SimConfig a = base(Scheme::OSTBC_UNITARY);
  a.M = 2;
  CHECK(spectral_efficiency(a) == doctest::Approx(2));
  SimConfig d = base(Scheme::DUSTM);
  d.M = 2;
  d.dustm_u = {1, 7};
  d.dustm_L = 16;
  CHECK(spectral_efficiency(d) == doctest::Approx(2));
}

TEST_CASE("noiseless runs are error free") {
  for (auto c : all_schemes()) {
    c.noiseless = true;
    // the fast-fading channel itself moves the phase, so keep it static here
    auto r = run_ber(c);
    INFO(r[0].scheme << " " << r[0].metric << " " << r[0].constellation);
    CHECK(r[0].bit_errors == 0);
    CHECK(r[0].bits > 0);
  }
}

TEST_CASE("coherent BPSK over a phase-known AWGN channel") {
  SimConfig c = base(Scheme::SIMO_COH);
  c.constellations = {spec(ConstellationKind::PSK, 2)};
  c.channel.kind = ChannelKind::AWGN_PHASE;
  c.ebn0_grid_db = {8};
  c.stop = {1L << 40, 2000};
  c.seed = 4;
  auto r = run_ber(c)[0];
  double p = 0.5 * std::erfc(std::sqrt(std::pow(10, 0.8)));
  double sigma = std::sqrt(p * (1 - p) / r.bits);
  CHECK(std::abs(r.ber - p) < 3 * sigma);
}

TEST_CASE("two code paths for 1x1 differential PSK") {
  SimConfig a = base(Scheme::DPSK_MSDD);
  a.T = 2;
  a.metric = MsddMetric::ML_RBF;
  a.ebn0_grid_db = {5, 10};
  a.stop = {1L << 40, 50};
  SimConfig b = a;
  b.scheme = Scheme::SIMO_NONCOH;
  auto ra = run_ber(a), rb = run_ber(b);
  for (int i = 0; i < 2; ++i) {
    CHECK(ra[i].bits == rb[i].bits);
    CHECK(ra[i].bit_errors == rb[i].bit_errors);
    CHECK(ra[i].symbol_errors == rb[i].symbol_errors);
  }
}

TEST_CASE("determinism across worker counts and stopping rule") {
  SimConfig c = base(Scheme::OSTBC_QAM);
  c.M = 2;
  c.constellations = {spec(ConstellationKind::RECT_QAM, 16)};
  c.ebn0_grid_db = {8, 12, 16};
  c.stop = {300, 400};
  std::string p1 = tmp("w1.csv"), p3 = tmp("w3.csv");
  c.workers = 1;
  auto r1 = run_ber(c);
  write_csv(r1, p1);
  c.workers = 3;
  auto r3 = run_ber(c);
  write_csv(r3, p3);
  CHECK(slurp(p1) == slurp(p3));
  for (auto& r : r1) CHECK((r.bit_errors >= 300 || r.frames == 400));
  CHECK(r1[0].config_hash == r3[0].config_hash);
  CHECK(monotone_sanity(r1));
  c.seed = 2;
  CHECK(run_ber(c)[0].bit_errors != r1[0].bit_errors);
}

TEST_CASE("csv") {
  std::string p = tmp("empty.csv");
  write_csv({}, p);
  auto text = slurp(p);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.rfind(kCsvColumns[0], 0) == 0);
  CHECK(read_csv(p).empty());

  SimConfig c = base(Scheme::DPSK_MSDD);
  c.stop = {10, 5};
  auto rows = run_ber(c);
  std::string q = tmp("one.csv");
  write_csv(rows, q, false, "config {\"x\": 1}\nsecond line");
  auto back = read_csv(q);
  REQUIRE(back.size() == 1);
  CHECK(back[0].scheme == rows[0].scheme);
  CHECK(back[0].bits == rows[0].bits);
  CHECK(back[0].bit_errors == rows[0].bit_errors);
  CHECK(back[0].ber == doctest::Approx(rows[0].ber).epsilon(1e-12));
  CHECK(back[0].config_hash == rows[0].config_hash);
  CHECK(back[0].seed == rows[0].seed);
  write_csv(rows, q, true);
  CHECK(read_csv(q).size() == 2);
  CHECK_THROWS_AS(write_csv(rows, "/nonexistent_dir/x.csv"), IoError);
  CHECK_THROWS_AS(read_csv("/nonexistent_dir/x.csv"), IoError);
}

TEST_CASE("config json") {
  for (auto c : all_schemes()) {
    auto j = config_to_json(c);
    auto back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));
  }
  auto c = all_schemes()[0];
  auto h = config_hash(c);
  CHECK(h.size() == 16);
  c.workers = 7;
  CHECK(config_hash(c) == h);
  c.seed = 99;
  CHECK(config_hash(c) != h);
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));

  auto j = config_to_json(all_schemes()[0]);
  j["bogus"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  auto k = config_to_json(all_schemes()[0]);
  k["ebn0_db"] = {{"lo", 0}, {"hi", 10}, {"step", 2.5}};
  CHECK(config_from_json(k).ebn0_grid_db.size() == 5);
  k["ebn0_db"] = 7;
  CHECK(config_from_json(k).ebn0_grid_db == std::vector<double>{7});
  k["scheme"] = "NOPE";
  CHECK_THROWS_AS(config_from_json(k), ConfigError);
}

TEST_CASE("configuration checks") {
  SimConfig g = base(Scheme::DPSK_MSDD);
  g.metric = MsddMetric::GLRT;
  g.channel = {ChannelKind::RFF, 0.02, 150};
  try {
    validate_config(g);
    FAIL("GLRT over RFF accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unsupported metric/channel") != std::string::npos);
  }
  SimConfig m = base(Scheme::DPSK_MSDD);
  m.M = 2;
  CHECK_THROWS_AS(validate_config(m), ConfigError);
  SimConfig t = base(Scheme::DPSK_MSDD);
  t.T = 1;
  CHECK_THROWS(validate_config(t));
  SimConfig f = base(Scheme::OSTBC_UNITARY);
  f.M = 2;
  f.decoder = StbcDecoder::FAST_ML;
  f.constellations = {spec(ConstellationKind::RECT_QAM, 16)};
  CHECK_THROWS(validate_config(f));
  SimConfig big = base(Scheme::OSTBC_QAM);
  big.M = 4;
  big.code = CodeKind::TH4;
  big.decoder = StbcDecoder::ML;
  big.constellations = {spec(ConstellationKind::RECT_QAM, 64)};
  CHECK_THROWS_AS(validate_config(big), CapacityError);
  SimConfig un = base(Scheme::QOSTBC_UNCOMBINED);
  un.M = 4;
  un.constellations = {spec(ConstellationKind::PSK, 8)};
  CHECK_THROWS(validate_config(un));
  SimConfig cd = base(Scheme::QOSTBC_COMBINED);
  cd.M = 4;
  cd.constellations = {spec(ConstellationKind::RECT_QAM, 16)};
  CHECK_THROWS(validate_config(cd));
  SimConfig corr = all_schemes()[1];
  corr.metric = MsddMetric::CORR;
  CHECK_THROWS_AS(validate_config(corr), ConfigError);
  for (auto& c : all_schemes()) CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("statistics helpers") {
  auto [lo, hi] = wilson_interval(10, 1000);
  CHECK(lo < 0.01);
  CHECK(hi > 0.01);
  CHECK(lo > 0.004);
  CHECK(hi < 0.02);
  auto z = wilson_interval(0, 100);
  CHECK(z.first == 0.0);
  CHECK(z.second > 0);

  std::vector<ErrorStats> rows(3);
  rows[0].ebn0_db = 0, rows[0].ber = 1e-1;
  rows[1].ebn0_db = 10, rows[1].ber = 1e-3;
  rows[2].ebn0_db = 20, rows[2].ber = 1e-5;
  CHECK(snr_at_ber(rows, 1e-2) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(snr_at_ber(rows, 1e-4) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(std::isnan(snr_at_ber(rows, 1e-7)));
  CHECK(monotone_sanity(rows));
  rows[2].ber = 0.5;
  CHECK_FALSE(monotone_sanity(rows));
}

TEST_CASE("previous amplitude: decision directed vs genie") {
  // paired: a fixed frame count makes both runs see the same channels, noise and data,
  // so only the amplitude handling differs
  struct Case {
    int N;
    std::vector<double> grid;
    long frames;
  };
  for (const Case& k : {Case{1, {18, 20, 22, 24}, 10000}, Case{2, {10, 12, 14, 16}, 4000}}) {
    SimConfig c = base(Scheme::OSTBC_QAM);
    c.M = 2;
    c.N = k.N;
    c.constellations = {spec(ConstellationKind::RECT_QAM, 16)};
    c.decoder = StbcDecoder::ML;  // the claim concerns the optimal metric
    c.ebn0_grid_db = k.grid;
    c.stop = {std::numeric_limits<long>::max(), k.frames};
    auto dd = run_ber(c);
    c.genie_amplitude = true;
    auto ga = run_ber(c);
    double a = snr_at_ber(dd, 1e-3), b = snr_at_ber(ga, 1e-3);
    REQUIRE(std::isfinite(a));
    REQUIRE(std::isfinite(b));
    MESSAGE("N=" << k.N << " gap " << a - b << " dB, BER ratio at " << k.grid[1] << " dB " << dd[1].ber / ga[1].ber);
    CHECK(std::abs(a - b) < 0.2);
  }
}
