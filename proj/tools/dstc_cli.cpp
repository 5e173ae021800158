// dstc: command-line front end for simulations, design searches and checks
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dstc/alphabets.hpp"
#include "dstc/design_analysis.hpp"
#include "dstc/dustm.hpp"
#include "dstc/errors.hpp"
#include "dstc/simkit.hpp"
#include "dstc/stcodes.hpp"
#include "json.hpp"

using namespace dstc;
using nlohmann::json;

namespace {

struct Common {
  std::string config, out;
  bool append = false;
  std::vector<std::string> sets;
  long long seed = -1;
  int workers = -1;
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Parameter:
    case ErrorKind::Shape: return 2;
    case ErrorKind::Capacity:
    case ErrorKind::Unsupported:
    case ErrorKind::Degenerate: return 3;
    case ErrorKind::Io: return 4;
    default: return 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

// a file path, or inline JSON when the argument starts with '{'
json json_arg(const std::string& arg, const std::string& what) {
  if (!arg.empty() && arg.front() == '{') return parse_json(arg, what);
  return parse_json(read_file(arg), what);
}

// dotted key=value into a JSON document; numeric segments index arrays
void apply_override(json& doc, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' is not key=value");
  std::string key = kv.substr(0, eq), raw = kv.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &doc;
  std::stringstream ks(key);
  std::string seg;
  std::vector<std::string> path;
  while (std::getline(ks, seg, '.')) path.push_back(seg);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const bool last = i + 1 == path.size();
    const std::string& p = path[i];
    if (node->is_array()) {
      std::size_t idx;
      try {
        idx = std::stoul(p);
      } catch (...) {
        throw ConfigError("override '" + key + "': '" + p + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("override '" + key + "': index out of range");
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) *node = json::object();
      node = &(*node)[p];
    }
    if (last) *node = value;
  }
}

void emit(const std::string& path, const std::string& text, bool append) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

// human summaries go to stderr when the payload itself goes to stdout
std::ostream& info(const Common& c) { return (c.out.empty() || c.out == "-") ? std::cerr : std::cout; }

GridAxis parse_axis(const std::string& name, const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      v.push_back(std::stod(part));
    } catch (...) {
      throw ConfigError("grid '" + spec + "' is not lo:hi:step");
    }
  }
  if (v.size() != 3) throw ConfigError("grid '" + spec + "' is not lo:hi:step");
  GridAxis a{name, v[0], v[1], v[2]};
  a.count();  // validates
  return a;
}

std::string header(const std::string& verb, const json& cfg) {
  std::string dump = cfg.dump();
  return "dstc " + verb + "\nconfig: " + dump + "\nconfig_hash: " + content_hash(dump);
}

std::string comment(const std::string& h) {
  std::string out, line;
  std::stringstream ss(h);
  while (std::getline(ss, line)) out += "# " + line + "\n";
  return out;
}

std::string trace_csv(const GridResult& r, const std::string& hdr) {
  std::ostringstream o;
  o << comment(hdr);
  for (auto& n : r.names) o << n << ",";
  o << "objective\n";
  o.precision(12);
  for (auto& t : r.trace) {
    for (double p : t.params) o << p << ",";
    o << t.objective << "\n";
  }
  return o.str();
}

void report_best(const Common& c, const GridResult& r) {
  auto& os = info(c);
  os << "best";
  for (std::size_t i = 0; i < r.names.size(); ++i) os << " " << r.names[i] << "=" << r.best[i];
  os << " objective=" << r.best_objective << (r.maximize ? " (max)" : " (min)");
  if (!r.complete) os << " INCOMPLETE (budget cap)";
  os << " points=" << r.trace.size() << "\n";
}

json to_json(const Constellation& c) {
  json pts = json::array(), labs = json::array();
  for (int i = 0; i < c.size(); ++i) {
    pts.push_back({c.points[i].real(), c.points[i].imag()});
    labs.push_back(c.label_string(i));
  }
  json j{{"name", c.name()},
         {"kind", to_string(c.kind)},
         {"size", c.size()},
         {"bits_per_symbol", c.bits_per_symbol},
         {"mean_energy", c.mean_energy()},
         {"constant_envelope", c.constant_envelope()},
         {"points", pts},
         {"labels", labs}};
  if (!c.meta.empty()) j["meta"] = c.meta;
  return j;
}

json to_json(const CodebookReport& r) {
  return {{"L", r.L},
          {"min_rank", r.min_rank},
          {"diversity_order", r.diversity_order},
          {"coding_gain", r.coding_gain},
          {"reduced_coding_gain", r.reduced_coding_gain},
          {"diversity_sum", r.diversity_sum},
          {"arg_pair", {r.arg_i, r.arg_j}}};
}

// ---- verbs

int cmd_sim(const Common& c) {
  if (c.config.empty()) throw ConfigError("sim needs --config");
  json doc = parse_json(read_file(c.config), "config '" + c.config + "'");
  for (auto& s : c.sets) apply_override(doc, s);
  SimConfig cfg = config_from_json(doc);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  if (c.workers >= 0) cfg.workers = c.workers;
  validate_config(cfg);
  json resolved = config_to_json(cfg);
  std::string hdr = "dstc sim\nconfig: " + resolved.dump() + "\nconfig_hash: " + config_hash(cfg) +
                    "\nsnr: rho = eta * Eb/N0, eta = " + std::to_string(spectral_efficiency(cfg)) + " bit/channel use";
  auto rows = run_ber(cfg);
  if (c.out.empty() || c.out == "-") {
    write_csv(std::cout, rows, true, hdr);
  } else {
    write_csv(rows, c.out, c.append, hdr);
  }
  auto& os = info(c);
  os << "sim: rows=" << rows.size() << " seed=" << cfg.seed << " config_hash=" << config_hash(cfg);
  if (!c.out.empty()) os << " out=" << c.out;
  os << (monotone_sanity(rows) ? "" : " WARNING: BER not decreasing over the grid") << "\n";
  for (auto& r : rows)
    os << "  " << r.ebn0_db << " dB  ber=" << r.ber << "  errors=" << r.bit_errors << "  frames=" << r.frames << "\n";
  return 0;
}

int cmd_search_u(const Common& c, int M, int L, int eta) {
  if (L <= 0) {
    if (eta <= 0) throw ConfigError("search-u needs --L or --eta");
    L = 1 << (eta * M);
  }
  auto r = search_u(M, L, c.workers < 0 ? 1 : c.workers);
  json cfg{{"M", M}, {"L", L}};
  json j{{"M", r.M},
         {"L", r.L},
         {"u", r.u},
         {"coding_gain", r.coding_gain},
         {"candidates_scanned", r.candidates_scanned},
         {"config", cfg},
         {"config_hash", content_hash(cfg.dump())}};
  emit(c.out, j.dump(2) + "\n", c.append);
  return 0;
}

std::map<std::string, double> fixed_from_sets(const std::vector<std::string>& sets) {
  std::map<std::string, double> f;
  for (auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    if (k == "metric" && !v.empty() && std::isalpha(static_cast<unsigned char>(v[0])))
      f[k] = static_cast<int>(msdd_metric_from_string(v));
    else if (k == "mode" && !v.empty() && std::isalpha(static_cast<unsigned char>(v[0])))
      f[k] = static_cast<int>(detect_mode_from_string(v));
    else if (k == "channel" && !v.empty() && std::isalpha(static_cast<unsigned char>(v[0])))
      f[k] = static_cast<int>(channel_kind_from_string(v));
    else {
      try {
        f[k] = std::stod(v);
      } catch (...) {
        throw ConfigError("fixed parameter '" + k + "' needs a number");
      }
    }
  }
  return f;
}

int run_grid(const Common& c, const std::string& verb, SearchObjective obj, GridSpec g, SearchBudget b) {
  if (c.seed >= 0) b.seed = static_cast<std::uint64_t>(c.seed);
  if (c.workers >= 0) b.workers = c.workers;
  json cfg{{"objective", to_string(obj)}, {"fixed", g.fixed}, {"seed", b.seed}, {"max_points", b.max_points}};
  json axes = json::array();
  for (auto& a : g.axes) axes.push_back({{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"step", a.step}});
  cfg["axes"] = axes;
  if (obj == SearchObjective::RING_RATIO || obj == SearchObjective::OSTBC_8QAM) cfg["bits_per_point"] = b.bits_per_point;
  auto r = grid_search(obj, g, b);
  emit(c.out, trace_csv(r, header(verb, cfg)), c.append);
  report_best(c, r);
  return 0;
}

int cmd_validate(const Common& c) {
  struct Row {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Row> rows;
  auto add_report = [&](const ValidationReport& r) {
    for (auto& ch : r.checks) rows.push_back({r.subject + ": " + ch.name, ch.pass, ch.detail});
  };
  add_report(validate_ostbc(make_code(CodeKind::ALAMOUTI)));
  add_report(validate_ostbc(make_code(CodeKind::TH4)));
  add_report(validate_mdc(make_code(CodeKind::MDC4)));
  add_report(validate_mdc(make_code(CodeKind::MDC8)));
  {
    bool ok = true;
    for (auto k : {CodeKind::ALAMOUTI, CodeKind::TH4})
      ok &= mdc_extend(make_code(k)).U.size() == make_code(k == CodeKind::ALAMOUTI ? CodeKind::MDC4 : CodeKind::MDC8).U.size();
    rows.push_back({"MDC extension sizes", ok, ""});
  }
  // group closure of the tabulated cyclic codes
  for (int M = 1; M <= 5; ++M)
    for (int eta : {1, 2}) {
      auto code = make_cyclic(table_u(M, eta), table_L(M, eta));
      double dev = 0;
      for (int l = 0; l < code.L; l += std::max(1, code.L / 16))
        for (int m = 0; m < code.L; m += std::max(1, code.L / 16))
          dev = std::max(dev, max_abs_diff(code.codeword(l) * code.codeword(m), code.codeword((l + m) % code.L)));
      bool full = coding_gain_u(code.u, code.L) > 0;
      rows.push_back({"cyclic M=" + std::to_string(M) + " eta=" + std::to_string(eta) + ": closure and full diversity",
                      dev < 1e-10 && full, "max dev " + std::to_string(dev)});
    }
  // constellation invariants
  std::vector<Constellation> cs{psk(2),         psk(4),      psk(8),     psk(16),          rect_qam(4),
                                rect_qam(16),   rect_qam(32), rect_qam(64), dask(2, 2.0),   dapsk(8, 2, 2.1),
                                circ8_for_ostbc(), omdc4(),  omdc8(),    mdc_8qam(1.37, deg2rad(12.73), deg2rad(58.18)),
                                rotated(rect_qam(16), deg2rad(13.28))};
  for (auto& k : cs) {
    std::set<std::uint32_t> labs(k.labels.begin(), k.labels.end());
    bool ok = std::abs(k.mean_energy() - 1) < 1e-12 && static_cast<int>(labs.size()) == k.size() &&
              k.size() == (1 << k.bits_per_symbol);
    if (k.kind == ConstellationKind::OMDC4 || k.kind == ConstellationKind::OMDC8)
      for (auto p : k.points) ok &= p.real() * p.imag() == 0.0;
    rows.push_back({"constellation " + k.name() + ": energy, labels, layout", ok, ""});
  }
  std::ostringstream o;
  int failed = 0;
  for (auto& r : rows) {
    o << (r.pass ? "PASS  " : "FAIL  ") << r.name;
    if (!r.pass && !r.detail.empty()) o << "  (" << r.detail << ")";
    o << "\n";
    failed += !r.pass;
  }
  o << (failed ? "FAILURES: " + std::to_string(failed) : std::string("ALL PASS")) << " (" << rows.size() << " checks)\n";
  emit(c.out, o.str(), c.append);
  if (!c.out.empty() && c.out != "-") std::cout << (failed ? "FAILURES\n" : "ALL PASS\n");
  return failed ? 1 : 0;
}

int cmd_analyze(const Common& c, const std::string& code_name, const std::string& cons, const std::string& cyclic,
                int L, int N) {
  std::vector<CMatrix> book;
  json cfg{{"N", N}};
  if (!cyclic.empty()) {
    std::vector<int> u;
    std::stringstream ss(cyclic);
    std::string p;
    while (std::getline(ss, p, ',')) u.push_back(std::stoi(p));
    if (L <= 0) throw ConfigError("--cyclic needs --L");
    auto cc = make_cyclic(u, L);
    for (int l = 0; l < L; ++l) book.push_back(cc.codeword(l));
    cfg["cyclic"] = {{"u", u}, {"L", L}};
  } else {
    if (cons.empty()) throw ConfigError("analyze-code needs --constellation (or --cyclic)");
    auto code = make_code(code_kind_from_string(code_name));
    auto spec = constellation_spec_from_json(json_arg(cons, "constellation"));
    auto alph = spec.build();
    long n = 1;
    for (int i = 0; i < code.K; ++i) {
      n *= alph.size();
      if (n > 4096) throw CapacityError("analyze-code: codebook larger than 4096 codewords");
    }
    for (long l = 0; l < n; ++l) {
      std::vector<cd> x(code.K);
      long r = l;
      for (auto& v : x) v = alph.points[r % alph.size()], r /= alph.size();
      book.push_back(assemble(code, x));
    }
    cfg["code"] = to_string(code.kind);
    cfg["constellation"] = constellation_spec_to_json(spec);
  }
  auto rep = distance_spectrum(book, N, tol::rank_rel, c.workers < 0 ? 1 : c.workers);
  json j = to_json(rep);
  j["config"] = cfg;
  j["config_hash"] = content_hash(cfg.dump());
  emit(c.out, j.dump(2) + "\n", c.append);
  return 0;
}

int cmd_emit(const Common& c, const std::string& cons) {
  if (cons.empty()) throw ConfigError("emit-constellation needs --constellation");
  auto spec = constellation_spec_from_json(json_arg(cons, "constellation"));
  json j = to_json(spec.build());
  json cfg = constellation_spec_to_json(spec);
  j["config"] = cfg;
  j["config_hash"] = content_hash(cfg.dump());
  emit(c.out, j.dump(2) + "\n", c.append);
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool with_config) {
  if (with_config) sub->add_option("--config,-c", c.config, "JSON configuration file");
  sub->add_option("--out,-o", c.out, "output file (default: stdout)");
  sub->add_flag("--append", c.append, "append instead of overwriting");
  sub->add_option("--set", c.sets, "dotted key=value override (repeatable)");
  sub->add_option("--seed", c.seed, "override the seed");
  sub->add_option("--workers", c.workers, "worker threads (0 = all cores)");
  sub->allow_extras();
}

// bare key=value arguments count as overrides
void collect_extras(CLI::App* sub, Common& c) {
  for (auto& e : sub->remaining()) {
    if (e.find('=') == std::string::npos || e.rfind("-", 0) == 0) throw ConfigError("unexpected argument '" + e + "'");
    c.sets.push_back(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dstc: differential space-time coding simulator and design tools"};
  app.require_subcommand(1);
  Common c;

  auto* sim = app.add_subcommand("sim", "run a BER simulation from a JSON config");
  add_common(sim, c, true);

  int M = 2, L = 0, eta = 0;
  auto* su = app.add_subcommand("search-u", "exhaustive search of cyclic group code exponents");
  add_common(su, c, false);
  su->add_option("--M", M, "transmit antennas")->required();
  su->add_option("--L", L, "codebook size");
  su->add_option("--eta", eta, "bits per channel use (L = 2^(eta M))");

  std::string grid = "1.4:3.0:0.1";
  long bits = 200000;
  auto* sr = app.add_subcommand("search-ring", "Monte Carlo ring-ratio search for 16-DAPSK");
  add_common(sr, c, false);
  sr->add_option("--grid", grid, "ring ratio grid lo:hi:step");
  sr->add_option("--bits", bits, "simulated bits per grid point");

  std::string rgrid = "0:45:0.01";
  auto* rot = app.add_subcommand("search-rotation", "rotation angle maximizing the MDC minimum determinant");
  add_common(rot, c, false);
  rot->add_option("--grid", rgrid, "angle grid in degrees lo:hi:step");

  std::string g1 = "0:89.9:0.1", g2;
  double r = 1.37;
  auto* s8 = app.add_subcommand("search-8qam", "ring rotations of the MDC 8-QAM at fixed radius ratio");
  add_common(s8, c, false);
  s8->add_option("--grid", g1, "theta1 grid in degrees lo:hi:step");
  s8->add_option("--grid2", g2, "theta2 grid (default: same as --grid)");
  s8->add_option("--r", r, "outer/inner radius ratio");

  std::string code_name = "ALAMOUTI", cons, cyclic;
  int Lc = 0, N = 1;
  auto* an = app.add_subcommand("analyze-code", "rank / coding gain / diversity sum of a codebook");
  add_common(an, c, false);
  an->add_option("--code", code_name, "ALAMOUTI, TH4, MDC4 or MDC8");
  an->add_option("--constellation", cons, "constellation JSON (file or inline)");
  an->add_option("--cyclic", cyclic, "comma separated u of a cyclic group code instead");
  an->add_option("--L", Lc, "cyclic codebook size");
  an->add_option("--N", N, "receive antennas");

  auto* va = app.add_subcommand("validate", "structural self-checks");
  add_common(va, c, false);

  std::string econs;
  auto* em = app.add_subcommand("emit-constellation", "print a constellation as JSON");
  add_common(em, c, false);
  em->add_option("--constellation", econs, "constellation JSON (file or inline)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    collect_extras(sub, c);
    if (sub == sim) return cmd_sim(c);
    if (sub == su) return cmd_search_u(c, M, L, eta);
    if (sub == sr) {
      GridSpec g;
      g.axes = {parse_axis("a", grid)};
      g.fixed = fixed_from_sets(c.sets);
      SearchBudget b;
      b.bits_per_point = bits;
      return run_grid(c, "search-ring", SearchObjective::RING_RATIO, g, b);
    }
    if (sub == rot) {
      GridSpec g;
      g.axes = {parse_axis("theta_deg", rgrid)};
      g.fixed = fixed_from_sets(c.sets);
      return run_grid(c, "search-rotation", SearchObjective::QAM_ROTATION, g, {});
    }
    if (sub == s8) {
      GridSpec g;
      g.axes = {parse_axis("theta1_deg", g1), parse_axis("theta2_deg", g2.empty() ? g1 : g2)};
      g.fixed = fixed_from_sets(c.sets);
      g.fixed["r"] = r;
      return run_grid(c, "search-8qam", SearchObjective::MDC_8QAM, g, {});
    }
    if (sub == an) return cmd_analyze(c, code_name, cons, cyclic, Lc, N);
    if (sub == va) return cmd_validate(c);
    if (sub == em) return cmd_emit(c, econs);
  } catch (const Error& e) {
    std::cerr << "error [" << e.category() << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const json::exception& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
