#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "hbndiff/constants.hpp"
#include "hbndiff/lattice.hpp"
#include "hbndiff/potential.hpp"
#include "hbndiff/tdse.hpp"

namespace hbndiff {

/// ½mv² in eV for a probe of mass_amu at velocity_km_s.
inline double kinetic_energy(double velocity_km_s, double mass_amu) {
  if (velocity_km_s < 0.0) throw ConfigError("kinetic_energy: velocity must be >= 0");
  double v = velocity_km_s * constants::kKmPerSToAngPerFs;
  return 0.5 * mass_amu * v * v * constants::kEnergyUnitEv;
}

struct SweepPoint {
  double velocity_km_s = 0.0;
  std::string hole;
  double relative_transmission = 0.0;
  bool ok = false;
  std::string diagnostic;   ///< failure reason when !ok
  double wall_time_s = 0.0;
  double dt_used = 0.0;
};

/// Final relative transmission per velocity for one hole geometry.
struct VelocitySweep {
  std::string hole;
  std::vector<SweepPoint> points;
};

struct SweepSettings {
  double slice_dz = 0.02;  ///< Å, slice cache quantization
  DtSelection dt_selection{};
  int threads = 1;
};

/// Propagate each (hole, velocity) pair and collect the final relative
/// transmissions. The slice cache is shared across the velocities of one hole,
/// and per-velocity time steps come from auto_dt unless base.dt > 0. A run
/// that fails numerically is recorded with its diagnostic and the sweep
/// continues.
inline std::vector<VelocitySweep> run_velocity_sweep(const MonolayerModel& pristine,
                                                     const std::vector<HoleSpec>& holes,
                                                     const std::vector<double>& velocities,
                                                     const RunConfig& base,
                                                     const PotentialParams& pparams,
                                                     const SweepSettings& settings = {}) {
  if (holes.empty()) throw ConfigError("sweep: no holes selected");
  if (velocities.empty()) throw ConfigError("sweep: no velocities given");
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    if (velocities[i] < constants::kMinVelocityKmS || velocities[i] > constants::kMaxVelocityKmS)
      throw ConfigError("sweep: velocity " + std::to_string(velocities[i]) +
                        " outside [0.05, 200] km/s");
    if (i > 0 && !(velocities[i] > velocities[i - 1]))
      throw ConfigError("sweep: velocities must be strictly increasing");
  }

  std::vector<VelocitySweep> result;
  for (const auto& hole : holes) {
    VelocitySweep sweep;
    sweep.hole = hole.name;
    MonolayerModel holed = punch_hole(pristine, hole);

    GridSpec grid = base.grid;
    grid.origin = hole.center;
    SliceProvider slices(holed, grid, pparams, settings.slice_dz, settings.threads);

    for (double v : velocities) {
      SweepPoint pt;
      pt.velocity_km_s = v;
      pt.hole = hole.name;
      auto t0 = std::chrono::steady_clock::now();
      try {
        RunConfig cfg = base;
        cfg.grid = grid;
        cfg.velocity_km_s = v;
        cfg.hole = hole.name;
        cfg.reference_area = reference_circle_area(hole);
        if (!(cfg.dt > 0.0)) cfg.dt = auto_dt(slices, v, settings.dt_selection);
        pt.dt_used = cfg.dt;
        PropagationRecord rec = propagate(slices, cfg);
        pt.relative_transmission = rec.snapshots.back().relative_transmission;
        pt.ok = true;
      } catch (const NumericalError& e) {
        pt.ok = false;
        pt.diagnostic = e.what();
      }
      pt.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      sweep.points.push_back(std::move(pt));
    }
    result.push_back(std::move(sweep));
  }
  return result;
}

}  // namespace hbndiff
