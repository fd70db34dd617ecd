// Line cut of the interaction landscape through the hole center: the
// attractive well above the open pore, the hard clamp over the remaining
// atoms, and the sin^4 absorption mask that removes flux near nuclei.

#include <cstdio>

#include "hbndiff/config.hpp"
#include "hbndiff/potential.hpp"

using namespace hbndiff;

int main(int argc, char** argv) {
  auto cfg = load_config_file(resolve_config_path(argc > 1 ? argv[1] : "hbn.json"));
  MonolayerModel pristine = cfg.build_lattice();
  HoleSpec hole = resolve_center(pristine, cfg.hole_by_name("hole6"));
  MonolayerModel holed = punch_hole(pristine, hole);

  GridSpec grid{15.9, 128, hole.center};

  for (double z : {2.0, 0.5}) {
    auto [pot, filt] = sample_slice(holed, grid, z, cfg.potential);
    std::printf("z = %.1f A above the plane (x along the cut, y = hole center)\n", z);
    std::printf("%10s  %14s  %8s  %8s\n", "x [A]", "U [eV]", "clamped", "filter");
    int iy = grid.n_points / 2;
    for (int ix = 0; ix < grid.n_points; ix += 4) {
      std::size_t i = static_cast<std::size_t>(iy) * grid.n_points + ix;
      std::printf("%10.3f  %14.6f  %8s  %8.4f\n", grid.node_x(ix) - hole.center[0],
                  pot.values[i], pot.clamped[i] ? "yes" : "", filt.values[i]);
    }
    std::printf("\n");
  }
  return 0;
}
