// Coarse transmission scan: two hole geometries, a handful of velocities,
// 64^2 desk resolution. Finishes in well under a minute and shows the
// slow/fast crossover between the compact and the dendritic hole.

#include <cstdio>

#include "hbndiff/config.hpp"
#include "hbndiff/metrics.hpp"

using namespace hbndiff;

int main(int argc, char** argv) {
  auto cfg = load_config_file(resolve_config_path(argc > 1 ? argv[1] : "hbn.json"),
                              {"grid.n_points=64", "run.z_start_A=-2", "run.z_stop_A=2",
                               "potential.slice_dz_A=0.05"});

  MonolayerModel pristine = cfg.build_lattice();
  std::vector<HoleSpec> holes{resolve_center(pristine, cfg.hole_by_name("hole6")),
                              resolve_center(pristine, cfg.hole_by_name("snowflake"))};
  std::vector<double> velocities{1.0, 2.0, 5.0, 10.0, 20.0};

  RunConfig base = cfg.make_run(holes.front());
  SweepSettings settings;
  settings.slice_dz = cfg.slice_dz;
  settings.dt_selection = cfg.dt_selection;

  auto sweeps = run_velocity_sweep(pristine, holes, velocities, base, cfg.potential, settings);

  std::printf("%12s", "v [km/s]");
  for (const auto& sw : sweeps) std::printf("  %12s", sw.hole.c_str());
  std::printf("\n");
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    std::printf("%12.1f", velocities[i]);
    for (const auto& sw : sweeps) {
      const auto& p = sw.points[i];
      if (p.ok)
        std::printf("  %12.5f", p.relative_transmission);
      else
        std::printf("  %12s", "failed");
    }
    std::printf("\n");
  }
  std::printf("\n(relative transmission: probability through the reference circle,\n"
              " normalized to the geometric value; 64^2 grid, |z| <= 2 A)\n");
  return 0;
}
