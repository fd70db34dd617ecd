// Far-field sanity picture: a uniformly lit 10 A disc diffracted to a screen
// 1 m away, shown as an ASCII radial profile. The first dark ring lands at
// 1.22 * lambda * L / D ~ 6.1 cm for 2 km/s helium.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hbndiff/farfield.hpp"
#include "hbndiff/tdse.hpp"

using namespace hbndiff;

int main() {
  const double lambda = de_broglie_wavelength(2.0, 4.002602);
  const double distance = 1.0;

  GridSpec grid{15.9, 128, {0.0, 0.0}};
  WaveField field;
  field.grid = grid;
  field.amplitudes.assign(grid.size(), {0.0, 0.0});
  for (int iy = 0; iy < grid.n_points; ++iy)
    for (int ix = 0; ix < grid.n_points; ++ix)
      if (std::hypot(grid.node_x(ix), grid.node_y(iy)) <= 5.0)
        field.amplitudes[static_cast<std::size_t>(iy) * grid.n_points + ix] = 1.0 / grid.extent;
  field.recompute_norm();

  auto pat = kirchhoff_propagate(field, lambda, distance, ObservationGrid{0.3, 128});
  auto prof = radial_profile(pat, {0.0, 0.0}, 0.003);

  double peak = 0.0;
  for (const auto& [r, v] : prof) peak = std::max(peak, v);

  std::printf("lambda = %.4f A, screen at %.0f m, disc D = 10 A\n\n", lambda, distance);
  std::printf("%10s  %12s\n", "r [cm]", "I / I0");
  for (const auto& [r, v] : prof) {
    if (r > 0.15) break;
    double rel = v / peak;
    int bars = static_cast<int>(std::lround(60.0 * std::sqrt(rel)));  // sqrt lifts the rings
    std::printf("%10.2f  %12.3e  %.*s\n", 100.0 * r, rel, bars,
                "############################################################");
  }
  return 0;
}
