#include <catch2/catch_amalgamated.hpp>

#include "hbndiff/metrics.hpp"
#include "test_support.hpp"

using namespace hbndiff;
using Catch::Approx;

TEST_CASE("kinetic energy covers the thermal-to-hot helium range") {
  // 1/2 m v^2 for helium, in eV
  REQUIRE(kinetic_energy(2.0, 4.002602) == Approx(0.082968).margin(2e-5));
  REQUIRE(kinetic_energy(150.0, 4.002602) == Approx(466.70).margin(0.05));
  REQUIRE(kinetic_energy(0.0, 4.002602) == 0.0);
  REQUIRE_THROWS_AS(kinetic_energy(-1.0, 4.002602), ConfigError);
}

namespace {

RunConfig sweep_base(const GridSpec& grid) {
  RunConfig base;
  base.velocity_km_s = 1.0;  // per-point velocities override this
  base.z_start = -2.0;
  base.z_stop = 2.0;
  base.grid = grid;
  base.mass_amu = 4.002602;
  base.reference_area = 28.3;
  base.snapshot_every = 1 << 30;
  return base;
}

}  // namespace

TEST_CASE("sweep validates its velocity list") {
  auto pristine = testsupport::shipped_lattice();
  HoleSpec h;
  h.name = "hole6";
  h.kind = HoleSpec::Kind::Circular;
  h.center_auto = true;
  h.diameter = 6.0;
  h.reference_area = 28.3;
  h = resolve_center(pristine, h);

  auto base = sweep_base({15.9, 64, h.center});
  PotentialParams params;

  REQUIRE_THROWS_AS(run_velocity_sweep(pristine, {}, {1.0}, base, params), ConfigError);
  REQUIRE_THROWS_AS(run_velocity_sweep(pristine, {h}, {}, base, params), ConfigError);
  REQUIRE_THROWS_AS(run_velocity_sweep(pristine, {h}, {2.0, 1.0}, base, params), ConfigError);
  REQUIRE_THROWS_AS(run_velocity_sweep(pristine, {h}, {1.0, 1.0}, base, params), ConfigError);
  REQUIRE_THROWS_AS(run_velocity_sweep(pristine, {h}, {0.01}, base, params), ConfigError);
  REQUIRE_THROWS_AS(run_velocity_sweep(pristine, {h}, {500.0}, base, params), ConfigError);
}

TEST_CASE("sweep reports per-velocity transmissions for each hole") {
  auto pristine = testsupport::shipped_lattice();
  HoleSpec h;
  h.name = "hole6";
  h.kind = HoleSpec::Kind::Circular;
  h.center_auto = true;
  h.diameter = 6.0;
  h.reference_area = 28.3;
  h = resolve_center(pristine, h);

  auto base = sweep_base({15.9, 64, h.center});
  PotentialParams params;
  SweepSettings settings;
  settings.slice_dz = 0.05;

  auto sweeps = run_velocity_sweep(pristine, {h}, {5.0, 10.0}, base, params, settings);
  REQUIRE(sweeps.size() == 1);
  REQUIRE(sweeps[0].hole == "hole6");
  REQUIRE(sweeps[0].points.size() == 2);

  const auto& slow = sweeps[0].points[0];
  const auto& fast = sweeps[0].points[1];
  REQUIRE(slow.velocity_km_s == 5.0);
  REQUIRE(fast.velocity_km_s == 10.0);
  for (const auto& p : sweeps[0].points) {
    REQUIRE(p.ok);
    REQUIRE(p.diagnostic.empty());
    REQUIRE(p.dt_used > 0.0);
    REQUIRE(p.wall_time_s >= 0.0);
    REQUIRE(p.relative_transmission > 0.0);
    // cannot outshine the open comparison circle by the whole-window factor
    REQUIRE(p.relative_transmission < base.grid.extent * base.grid.extent / 28.3);
  }
  // attractive walls capture more of a slower beam
  REQUIRE(fast.relative_transmission > slow.relative_transmission);
}
