// Frozen on-axis OMDC radii (real axis, imaginary axis, real, imaginary), sum r_i^2 = q/2.
// Regenerate with search_omdc_radii() in design_analysis; tests re-run that search and compare.
#include <vector>

#include "dstc/alphabets.hpp"

namespace dstc {

const std::vector<double>& omdc4_radii() {
  // closed form: r1^2 = 1/3, r2^2 = 5/3
  static const std::vector<double> r = {0.57735026918962573, 1.2909944487358056};
  return r;
}

const std::vector<double>& omdc8_radii() {
  // min |dR^2 - dI^2| = 0.485668648064543 at these radii
  static const std::vector<double> r = {0.348449654923256, 0.779157115144743, 1.045348964769766,
                                        1.476056424991255};
  return r;
}

}  // namespace dstc
