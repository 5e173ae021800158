#include "dstc/design_analysis.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <numeric>

#include "dstc/channels.hpp"
#include "dstc/diff_stbc.hpp"
#include "dstc/errors.hpp"
#include "dstc/parallel.hpp"
#include "dstc/simkit.hpp"
#include "dstc/stcodes.hpp"

namespace dstc {

namespace {
struct PairInfo {
  int rank = 0;
  double prod = 0, sum = 0;
};
}  // namespace

CodebookReport distance_spectrum(const std::vector<CMatrix>& cb, int N, double rel_tol, int workers) {
  if (cb.size() < 2) throw ParameterError("distance_spectrum: need at least two codewords");
  if (N < 1) throw ParameterError("distance_spectrum: N must be positive");
  const std::size_t R = cb[0].rows(), C = cb[0].cols();
  double scale = 0;
  for (auto& v : cb) {
    if (v.rows() != R || v.cols() != C) throw ShapeError("distance_spectrum: codewords differ in shape");
    scale = std::max(scale, frobenius_norm_sq(v));
  }
  // singular values of a difference are bounded by 2*sqrt(scale)
  const double sv_zero = rel_tol * 2 * std::sqrt(scale);
  const std::size_t L = cb.size();
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(L * (L - 1) / 2);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i + 1; j < L; ++j) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  std::vector<PairInfo> info(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    auto sv = singular_values(cb[pairs[k].first] - cb[pairs[k].second]);
    PairInfo p;
    p.prod = 1;
    for (double s : sv) {
      p.sum += s * s;
      if (s > sv_zero) {
        ++p.rank;
        p.prod *= s * s;
      }
    }
    info[k] = p;
  });
  CodebookReport rep;
  rep.L = static_cast<int>(L);
  const int full = static_cast<int>(std::min(R, C));
  rep.min_rank = INT_MAX;
  rep.diversity_sum = INFINITY;
  rep.reduced_coding_gain = INFINITY;
  double best_full = INFINITY;
  std::size_t arg = 0;
  bool have = false;
  for (std::size_t k = 0; k < info.size(); ++k) {
    const auto& p = info[k];
    double g = p.rank ? std::pow(p.prod, 1.0 / p.rank) : 0.0;
    rep.diversity_sum = std::min(rep.diversity_sum, p.sum);
    rep.reduced_coding_gain = std::min(rep.reduced_coding_gain, g);
    // worst pair: lowest rank first, then smallest product
    bool worse = !have || p.rank < info[arg].rank ||
                 (p.rank == info[arg].rank && g < std::pow(info[arg].prod, 1.0 / std::max(1, info[arg].rank)));
    if (worse) {
      arg = k;
      have = true;
    }
    rep.min_rank = std::min(rep.min_rank, p.rank);
    if (p.rank == full) best_full = std::min(best_full, g);
  }
  rep.diversity_order = rep.min_rank * N;
  rep.coding_gain = rep.min_rank == full ? best_full : 0.0;
  rep.arg_i = pairs[arg].first;
  rep.arg_j = pairs[arg].second;
  return rep;
}

double pep_bound(const CMatrix& Vl, const CMatrix& Vl2, double rho, int N) {
  if (!(rho > 0)) throw ParameterError("pep_bound: rho must be positive");
  if (Vl.rows() != Vl2.rows() || Vl.cols() != Vl2.cols()) throw ShapeError("pep_bound: shapes differ");
  const double k = rho * rho / (4 * (1 + 2 * rho));
  double b = 0.5;
  for (double s : singular_values(Vl - Vl2)) b *= std::pow(1 + k * s * s, -N);
  return b;
}

MinDet mdc_min_det(const Constellation& c, int M, int K) {
  if (c.size() < 2 || M < 1 || K < 1) throw ParameterError("mdc_min_det: bad arguments");
  MinDet best;
  best.value = INFINITY;
  double top = 0;
  for (int i = 0; i < c.size(); ++i)
    for (int j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      cd d = c.points[i] - c.points[j];
      double v = std::pow(std::abs(d.real() * d.real() - d.imag() * d.imag()), M) / K;
      top = std::max(top, v);
      if (v < best.value) best = {v, i, j};
    }
  if (best.value <= 1e-9 * top) best.value = 0.0;
  return best;
}

const char* to_string(SearchObjective o) {
  switch (o) {
    case SearchObjective::RING_RATIO: return "RING_RATIO";
    case SearchObjective::QAM_ROTATION: return "QAM_ROTATION";
    case SearchObjective::MDC_8QAM: return "MDC_8QAM";
    case SearchObjective::OSTBC_8QAM: return "OSTBC_8QAM";
  }
  return "?";
}

int GridAxis::count() const {
  if (!(step > 0) || hi < lo) throw ParameterError("grid axis '" + name + "': need step > 0 and hi >= lo");
  return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double GridAxis::at(int i) const { return lo + i * step; }

namespace {
double fixed_or(const GridSpec& g, const std::string& k, double dflt) {
  auto it = g.fixed.find(k);
  return it == g.fixed.end() ? dflt : it->second;
}

void require_axes(const GridSpec& g, const std::vector<std::string>& names) {
  if (g.axes.size() != names.size()) throw ParameterError("grid: expected axes in this order: " + names[0] + "...");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (g.axes[i].name != names[i]) throw ParameterError("grid: axis " + std::to_string(i) + " must be " + names[i]);
}

// BER of DAPSK MSDD at one ring ratio; same seed at every point
double ring_ratio_ber(const GridSpec& g, double a, const SearchBudget& b) {
  SimConfig cfg;
  cfg.scheme = Scheme::DAPSK_MSDD;
  ConstellationSpec cs;
  cs.kind = ConstellationKind::DAPSK;
  cs.params.q_p = static_cast<int>(fixed_or(g, "q_p", 8));
  cs.params.q_a = static_cast<int>(fixed_or(g, "q_a", 2));
  cs.params.a = a;
  cfg.constellations = {cs};
  cfg.T = static_cast<int>(fixed_or(g, "T", 2));
  cfg.metric = static_cast<MsddMetric>(static_cast<int>(fixed_or(g, "metric", static_cast<int>(MsddMetric::GLRT))));
  cfg.mode = static_cast<DetectMode>(static_cast<int>(fixed_or(g, "mode", 0)));
  cfg.channel.kind = static_cast<ChannelKind>(static_cast<int>(fixed_or(g, "channel", 0)));
  cfg.channel.fdts = fixed_or(g, "fdts", 0.0);
  cfg.ebn0_grid_db = {fixed_or(g, "ebn0_db", 18.0)};
  cfg.frame_len = static_cast<int>(fixed_or(g, "frame_len", 150));
  const int step = cfg.T - 1;
  cfg.frame_len = (cfg.frame_len + step - 1) / step * step;
  const long bits_per_frame = static_cast<long>(cfg.frame_len) * ilog2(cs.params.q_p * cs.params.q_a);
  cfg.stop.min_bit_errors = LONG_MAX;
  cfg.stop.max_frames = std::max(1L, (b.bits_per_point + bits_per_frame - 1) / bits_per_frame);
  cfg.seed = b.seed;
  cfg.workers = b.workers;
  return run_ber(cfg).at(0).ber;
}

// SER of differential Alamouti with a two-ring 8-QAM, near-optimal decoding over block fading
double ostbc_8qam_ser(const GridSpec& g, double a, double theta_deg, const SearchBudget& b) {
  const Constellation c = circ8_qam(a, deg2rad(theta_deg));
  const STCode code = make_code(CodeKind::ALAMOUTI);
  const Alphabets alph = same_alphabet(code, c);
  const int N = static_cast<int>(fixed_or(g, "N", 1));
  const int blocks = static_cast<int>(fixed_or(g, "frame_len", 50));
  const double eta = 2.0 * c.bits_per_symbol / code.T;
  const double rho = ebn0_to_rho(fixed_or(g, "ebn0_db", 14.0), eta);
  const long bits_per_frame = static_cast<long>(blocks) * 2 * c.bits_per_symbol;
  const long frames = std::max(1L, (b.bits_per_point + bits_per_frame - 1) / bits_per_frame);
  ChannelModel model;
  std::vector<long> errs(frames);
  parallel_for(frames, b.workers, [&](std::size_t f) {
    RngStream rng(b.seed, f);
    std::vector<std::array<int, 2>> z(blocks);
    for (auto& blk : z)
      for (auto& v : blk) v = static_cast<int>(rng.below(c.size()));
    ChannelRealization ch = draw_channel(model, 2, N, blocks + 1, rng);
    DiffState st = DiffState::initial(2);
    CMatrix Yprev = transmit(st.S_prev, ch, rho, rng);
    double a_hat = 1;
    long e = 0;
    for (int t = 0; t < blocks; ++t) {
      std::vector<cd> x{c.points[z[t][0]], c.points[z[t][1]]};
      auto [S, next] = encode_nonunitary(assemble(code, x), st);
      st = next;
      CMatrix Y = transmit(S, ch, rho, rng);
      auto zh = decode_near_optimal(Yprev, Y, code, alph, a_hat);
      e += (zh[0] != z[t][0]) + (zh[1] != z[t][1]);
      a_hat = info_amplitude(code, {c.points[zh[0]], c.points[zh[1]]});
      Yprev = std::move(Y);
    }
    errs[f] = e;
  });
  long total = std::accumulate(errs.begin(), errs.end(), 0L);
  return static_cast<double>(total) / (static_cast<double>(frames) * blocks * 2);
}
}  // namespace

GridResult grid_search(SearchObjective obj, const GridSpec& grid, const SearchBudget& budget) {
  if (grid.axes.empty()) throw ParameterError("grid_search: grid is empty");
  GridResult res;
  for (auto& ax : grid.axes) res.names.push_back(ax.name);
  long total = 1;
  for (auto& ax : grid.axes) total *= ax.count();
  long n = total;
  if (budget.max_points > 0 && budget.max_points < total) {
    n = budget.max_points;
    res.complete = false;
  }
  auto params_of = [&](long idx) {
    std::vector<double> p(grid.axes.size());
    for (std::size_t k = grid.axes.size(); k-- > 0;) {
      int c = grid.axes[k].count();
      p[k] = grid.axes[k].at(static_cast<int>(idx % c));
      idx /= c;
    }
    return p;
  };
  std::vector<double> val(n);
  switch (obj) {
    case SearchObjective::QAM_ROTATION: {
      require_axes(grid, {"theta_deg"});
      res.maximize = true;
      const Constellation base = rect_qam(static_cast<int>(fixed_or(grid, "q", 16)));
      const int M = static_cast<int>(fixed_or(grid, "M", 4)), K = static_cast<int>(fixed_or(grid, "K", 4));
      parallel_for(n, budget.workers, [&](std::size_t i) {
        val[i] = mdc_min_det(rotated(base, deg2rad(params_of(i)[0])), M, K).value;
      });
      break;
    }
    case SearchObjective::MDC_8QAM: {
      require_axes(grid, {"theta1_deg", "theta2_deg"});
      res.maximize = true;
      const double r = fixed_or(grid, "r", 1.37);
      const int M = static_cast<int>(fixed_or(grid, "M", 4)), K = static_cast<int>(fixed_or(grid, "K", 4));
      parallel_for(n, budget.workers, [&](std::size_t i) {
        auto p = params_of(i);
        val[i] = mdc_min_det(mdc_8qam(r, deg2rad(p[0]), deg2rad(p[1])), M, K).value;
      });
      break;
    }
    case SearchObjective::RING_RATIO:
      require_axes(grid, {"a"});
      res.maximize = false;
      for (long i = 0; i < n; ++i) val[i] = ring_ratio_ber(grid, params_of(i)[0], budget);
      break;
    case SearchObjective::OSTBC_8QAM:
      require_axes(grid, {"a", "theta_deg"});
      res.maximize = false;
      for (long i = 0; i < n; ++i) {
        auto p = params_of(i);
        val[i] = ostbc_8qam_ser(grid, p[0], p[1], budget);
      }
      break;
  }
  long arg = 0;
  for (long i = 0; i < n; ++i) {
    res.trace.push_back({params_of(i), val[i]});
    bool better = res.maximize ? val[i] > val[arg] : val[i] < val[arg];
    if (better) arg = i;
  }
  res.best = params_of(arg);
  res.best_objective = val[arg];
  return res;
}

double omdc_objective(const std::vector<double>& radii) {
  std::vector<cd> pts;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    cd z = i % 2 ? cd(0, radii[i]) : cd(radii[i], 0);
    pts.push_back(z);
    pts.push_back(-z);
  }
  double best = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      cd d = pts[i] - pts[j];
      best = std::min(best, std::abs(d.real() * d.real() - d.imag() * d.imag()));
    }
  return best;
}

namespace {
// map free coordinates to sorted radii with sum r^2 = q/2
std::vector<double> to_radii(const std::vector<double>& x, int q) {
  std::vector<double> r(x.size());
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r[i] = std::abs(x[i]);
    s += r[i] * r[i];
  }
  if (s <= 0) return std::vector<double>(x.size(), 0.0);
  const double k = std::sqrt(q / 2.0 / s);
  for (auto& v : r) v *= k;
  std::sort(r.begin(), r.end());
  return r;
}

std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double step, int iters) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]);
  for (int it = 0; it < iters; ++it) {
    std::vector<std::size_t> ord(n + 1);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    auto s2 = s;
    auto f2 = fv;
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = s2[ord[i]];
      fv[i] = f2[ord[i]];
    }
    if (std::abs(fv[n] - fv[0]) < 1e-15) break;
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) c[k] += s[i][k] / n;
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = c[k] + t * (s[n][k] - c[k]);
      return p;
    };
    auto xr = along(-1);
    double fr = f(xr);
    if (fr < fv[0]) {
      auto xe = along(-2);
      double fe = f(xe);
      if (fe < fr) {
        s[n] = xe;
        fv[n] = fe;
      } else {
        s[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      s[n] = xr;
      fv[n] = fr;
    } else {
      auto xc = fr < fv[n] ? along(-0.5) : along(0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        s[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t k = 0; k < n; ++k) s[i][k] = s[0][k] + 0.5 * (s[i][k] - s[0][k]);
          fv[i] = f(s[i]);
        }
      }
    }
  }
  std::size_t best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  return s[best];
}
}  // namespace

std::vector<double> search_omdc_radii(int q) {
  if (q < 4 || q % 2 || !is_pow2(q)) throw ParameterError("search_omdc_radii: q must be a power of two >= 4");
  const int n = q / 2;
  auto f = [&](const std::vector<double>& x) { return -omdc_objective(to_radii(x, q)); };
  RngStream rng(2024, static_cast<std::uint64_t>(q));
  std::vector<double> best;
  double best_val = INFINITY;
  for (int restart = 0; restart < 40; ++restart) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = (i + 1) * (0.5 + rng.uniform());
    for (double step : {0.3, 0.05, 0.01, 1e-3, 1e-4})
      x = nelder_mead(f, x, step, 4000);
    double v = f(x);
    if (v < best_val - 1e-13) {
      best_val = v;
      best = x;
    }
  }
  return to_radii(best, q);
}

}  // namespace dstc
