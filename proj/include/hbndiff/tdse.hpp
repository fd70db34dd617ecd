#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "hbndiff/constants.hpp"
#include "hbndiff/errors.hpp"
#include "hbndiff/fft.hpp"
#include "hbndiff/grid.hpp"
#include "hbndiff/potential.hpp"

namespace hbndiff {

/// Transverse wavefunction on a grid. norm tracks the discrete quadrature
/// of |ψ|² (cell area times sum) and is refreshed by every operation here.
struct WaveField {
  GridSpec grid;
  std::vector<std::complex<double>> amplitudes;
  double norm = 0.0;

  void recompute_norm() {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    norm = s * grid.spacing() * grid.spacing();
  }
};

/// Uniform wavefront with total probability 1 over the grid.
inline WaveField init_uniform(const GridSpec& grid) {
  validate_grid(grid);
  WaveField f;
  f.grid = grid;
  f.amplitudes.assign(grid.size(), std::complex<double>(1.0 / grid.extent, 0.0));
  f.recompute_norm();
  return f;
}

/// One propagation run: velocity in km/s, heights in Å, dt in fs, mass in amu.
struct RunConfig {
  double velocity_km_s = 0.0;
  double z_start = 0.0;
  double z_stop = 0.0;
  double dt = 0.0;  ///< 0 requests automatic selection (resolved before propagate)
  GridSpec grid;
  double mass_amu = 0.0;
  std::string hole;
  double reference_area = 0.0;  ///< Å², comparison circle of the selected hole
  int snapshot_every = 10;
  double filter_timescale = 0.1;  ///< fs; per-step absorption exponent is dt/this
};

inline void validate_run_config(const RunConfig& cfg) {
  if (!(cfg.velocity_km_s > 0.0)) throw ConfigError("run: velocity must be > 0");
  if (!(cfg.z_start < 0.0 && cfg.z_stop > 0.0))
    throw ConfigError("run: z_start < 0 < z_stop required");
  if (!(cfg.dt > 0.0)) throw ConfigError("run: dt must be > 0");
  if (!(cfg.mass_amu > 0.0)) throw ConfigError("run: mass must be > 0");
  if (!(cfg.filter_timescale > 0.0))
    throw ConfigError("run: filter_timescale must be > 0");
  if (cfg.snapshot_every < 1) throw ConfigError("run: snapshot_every must be >= 1");
  validate_grid(cfg.grid);
}

/// Symmetric split-operator step: half kinetic phase in spectral space,
/// full potential phase in position space, half kinetic phase, then the
/// absorption filter raised to dt/filter_timescale. Scaling the absorption
/// exponent with dt makes the accumulated loss over a fixed flight span
/// independent of the step size, so refining dt only tightens the splitting
/// error instead of multiplying the filter more often. Kinetic phase tables
/// and FFT plans are built once.
class SplitStepper {
 public:
  SplitStepper(const GridSpec& grid, double dt, double mass_amu,
               double filter_timescale = 0.1)
      : grid_(grid), dt_(dt), mass_(mass_amu),
        filter_exponent_(dt / filter_timescale), fft_(grid.n_points) {
    if (!(filter_timescale > 0.0))
      throw ConfigError("split_step: filter_timescale must be > 0");
    validate_grid(grid);
    const int n = grid.n_points;
    const double dk = 2.0 * constants::kPi / grid.extent;
    // exp(-i hbar k^2 dt / (4 m)) is separable in kx, ky.
    std::vector<std::complex<double>> axis(n);
    const double coef = constants::kHbarInternal * dt / (4.0 * mass_amu);
    for (int i = 0; i < n; ++i) {
      int m = i < n / 2 ? i : i - n;
      double k = dk * m;
      axis[i] = std::polar(1.0, -coef * k * k);
    }
    kinetic_half_.resize(grid.size());
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        kinetic_half_[static_cast<std::size_t>(iy) * n + ix] = axis[iy] * axis[ix];
  }

  double dt() const { return dt_; }
  const GridSpec& grid() const { return grid_; }

  void step(WaveField& field, const PotentialSlice& pot, const FilterSlice& filt) {
    if (field.grid != grid_ || pot.grid != grid_ || filt.grid != grid_)
      throw ContractViolation("split_step: field, potential and filter grids differ");
    auto* psi = field.amplitudes.data();
    const std::size_t total = grid_.size();

    fft_.forward(psi);
    for (std::size_t i = 0; i < total; ++i) psi[i] *= kinetic_half_[i];
    fft_.inverse(psi);

    const auto& phase = potential_phase(pot);
    for (std::size_t i = 0; i < total; ++i) psi[i] *= phase[i];

    fft_.forward(psi);
    for (std::size_t i = 0; i < total; ++i) psi[i] *= kinetic_half_[i];
    fft_.inverse(psi);

    const auto& damp = filter_power(filt);
    for (std::size_t i = 0; i < total; ++i) psi[i] *= damp[i];
    field.recompute_norm();
  }

 private:
  // exp(-i U dt / hbar); rebuilt only when the slice changes, so runs that
  // revisit one cached slice for many consecutive steps pay for it once.
  const std::vector<std::complex<double>>& potential_phase(const PotentialSlice& pot) {
    if (&pot == phase_slice_ && pot.z == phase_z_) return phase_;
    phase_.resize(pot.values.size());
    const double coef = -dt_ / constants::kHbarEvFs;
    for (std::size_t i = 0; i < pot.values.size(); ++i)
      phase_[i] = std::polar(1.0, coef * pot.values[i]);
    phase_slice_ = &pot;
    phase_z_ = pot.z;
    return phase_;
  }

  // Filter values raised to dt/filter_timescale, cached per slice like the
  // potential phase.
  const std::vector<double>& filter_power(const FilterSlice& filt) {
    if (&filt == damp_slice_) return damp_;
    damp_.resize(filt.values.size());
    for (std::size_t i = 0; i < filt.values.size(); ++i) {
      double f = filt.values[i];
      damp_[i] = f <= 0.0 ? 0.0 : (f >= 1.0 ? 1.0 : std::pow(f, filter_exponent_));
    }
    damp_slice_ = &filt;
    return damp_;
  }

  GridSpec grid_;
  double dt_;
  double mass_;
  double filter_exponent_;
  Fft2D fft_;
  std::vector<std::complex<double>> kinetic_half_;
  std::vector<std::complex<double>> phase_;
  std::vector<double> damp_;
  const PotentialSlice* phase_slice_ = nullptr;
  const FilterSlice* damp_slice_ = nullptr;
  double phase_z_ = 0.0;
};

/// Single-step convenience form of the stepper.
inline void split_step(WaveField& field, const PotentialSlice& pot, const FilterSlice& filt,
                       double dt, double mass_amu, double filter_timescale = 0.1) {
  SplitStepper stepper(field.grid, dt, mass_amu, filter_timescale);
  stepper.step(field, pot, filt);
}

/// Surviving probability relative to what the comparison circle initially held:
/// ∫|ψ|² over the grid divided by ∫|ψ₀|² over the circle of area reference_area.
/// ψ₀ is the uniform initial wavefront, so the denominator is exactly
/// norm(ψ₀)·reference_area/extent².
inline double relative_transmission(const WaveField& field, double reference_area,
                                    const WaveField& initial) {
  if (!(reference_area > 0.0))
    throw ConfigError("relative_transmission: reference area must be > 0");
  double denom = initial.norm * reference_area / (initial.grid.extent * initial.grid.extent);
  if (!(denom > 0.0))
    throw ConfigError("relative_transmission: zero-norm initial field");
  return field.norm / denom;
}

struct Snapshot {
  double z = 0.0;                      ///< Å
  double relative_transmission = 0.0;
};

struct PropagationRecord {
  std::vector<Snapshot> snapshots;
  WaveField final_field;
  int steps = 0;
  double dt_used = 0.0;
  double max_abs_potential = 0.0;  ///< largest unclamped |U| among slices used
};

/// Options for automatic time-step selection.
struct DtSelection {
  double max_phase = 0.3;  ///< per-step potential phase bound, rad
  double dz_max = 0.05;    ///< per-step height advance bound, Å
};

/// Pick dt so the potential phase per step stays below max_phase where the
/// filter is live, and the wavefront never advances more than dz_max per step.
inline double auto_dt(SliceProvider& slices, double velocity_km_s,
                      const DtSelection& sel = {}) {
  if (!(velocity_km_s > 0.0)) throw ConfigError("auto_dt: velocity must be > 0");
  double v = velocity_km_s * constants::kKmPerSToAngPerFs;
  double dt = sel.dz_max / v;
  double u_live = slices.live_max_abs_potential();
  if (u_live > 0.0) dt = std::min(dt, sel.max_phase * constants::kHbarEvFs / u_live);
  return dt;
}

/// March the uniform wavefront from z_start to z_stop with z(t) = z_start + v·t,
/// sampling the potential at each step's midpoint height and recording the
/// relative transmission at snapshot boundaries.
inline PropagationRecord propagate(SliceProvider& slices, const RunConfig& cfg) {
  validate_run_config(cfg);
  if (cfg.grid != slices.grid())
    throw ContractViolation("propagate: run grid differs from slice provider grid");
  if (!(cfg.reference_area > 0.0))
    throw ConfigError("propagate: reference area must be > 0");

  const double v = cfg.velocity_km_s * constants::kKmPerSToAngPerFs;
  const double span = cfg.z_stop - cfg.z_start;
  long n_steps = static_cast<long>(std::ceil(span / (v * cfg.dt) - 1e-12));
  if (n_steps < 1) n_steps = 1;
  if (n_steps > 50'000'000)
    throw ConfigError("propagate: step count " + std::to_string(n_steps) +
                      " exceeds limit; check dt and velocity");
  const double dt_eff = span / (v * static_cast<double>(n_steps));

  PropagationRecord rec;
  rec.dt_used = dt_eff;
  rec.steps = static_cast<int>(n_steps);

  WaveField field = init_uniform(cfg.grid);
  const WaveField initial = field;
  rec.snapshots.push_back({cfg.z_start,
                           relative_transmission(field, cfg.reference_area, initial)});

  SplitStepper stepper(cfg.grid, dt_eff, cfg.mass_amu, cfg.filter_timescale);
  for (long s = 0; s < n_steps; ++s) {
    double z_mid = cfg.z_start + (static_cast<double>(s) + 0.5) * v * dt_eff;
    const auto& sl = slices.at_z(z_mid);
    rec.max_abs_potential = std::max(rec.max_abs_potential, sl.potential.max_abs);
    stepper.step(field, sl.potential, sl.filter);
    if (!std::isfinite(field.norm))
      throw NumericalError("propagate: non-finite amplitudes at step " + std::to_string(s) +
                           " of " + std::to_string(n_steps) + ", max |U| encountered = " +
                           std::to_string(rec.max_abs_potential) + " eV");
    bool last = (s + 1 == n_steps);
    if (last || (s + 1) % cfg.snapshot_every == 0) {
      double z_now = last ? cfg.z_stop
                          : cfg.z_start + static_cast<double>(s + 1) * v * dt_eff;
      rec.snapshots.push_back({z_now,
                               relative_transmission(field, cfg.reference_area, initial)});
    }
  }
  rec.final_field = std::move(field);
  return rec;
}

}  // namespace hbndiff
