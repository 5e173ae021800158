#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/cxmat.hpp"

namespace dstc {

struct CodebookReport {
  int L = 0;
  int min_rank = 0;
  int diversity_order = 0;
  double coding_gain = 0;          // min det(D^H D)^(1/M); zero when any pair is rank deficient
  double reduced_coding_gain = 0;  // min over pairs of (prod of nonzero eigenvalues)^(1/rank)
  double diversity_sum = 0;
  int arg_i = 0, arg_j = 0;
};

CodebookReport distance_spectrum(const std::vector<CMatrix>& codebook, int N, double rel_tol = tol::rank_rel,
                                 int workers = 1);
double pep_bound(const CMatrix& Vl, const CMatrix& Vl2, double rho, int N);

struct MinDet {
  double value = 0;
  int i = 0, j = 0;
};
MinDet mdc_min_det(const Constellation& c, int M, int K);

enum class SearchObjective { RING_RATIO, QAM_ROTATION, MDC_8QAM, OSTBC_8QAM };
const char* to_string(SearchObjective o);

struct GridAxis {
  std::string name;
  double lo = 0, hi = 0, step = 1;
  int count() const;
  double at(int i) const;
};

struct GridSpec {
  std::vector<GridAxis> axes;
  std::map<std::string, double> fixed;
};

struct SearchBudget {
  long max_points = 0;           // 0 = whole grid
  long bits_per_point = 200000;  // Monte Carlo objectives
  int workers = 1;
  std::uint64_t seed = 1;
};

struct TracePoint {
  std::vector<double> params;
  double objective = 0;
};

struct GridResult {
  std::vector<std::string> names;
  std::vector<double> best;
  double best_objective = 0;
  bool maximize = true;
  bool complete = true;
  std::vector<TracePoint> trace;
};

GridResult grid_search(SearchObjective obj, const GridSpec& grid, const SearchBudget& budget);

// objective for the on-axis OMDC designs: min over point pairs of |dR^2 - dI^2|
double omdc_objective(const std::vector<double>& radii);
// numerical max-min search of the on-axis radii (sum r^2 = q/2)
std::vector<double> search_omdc_radii(int q);

}  // namespace dstc
