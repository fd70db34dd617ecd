#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "hbndiff/constants.hpp"
#include "hbndiff/errors.hpp"
#include "hbndiff/fft.hpp"
#include "hbndiff/tdse.hpp"
#include "hbndiff/util.hpp"

namespace hbndiff {

/// λ_dB = h/(m·v), returned in Å.
inline double de_broglie_wavelength(double velocity_km_s, double mass_amu) {
  if (!(velocity_km_s > 0.0)) throw ConfigError("de_broglie_wavelength: velocity must be > 0");
  double v = velocity_km_s * constants::kKmPerSToAngPerFs;
  return constants::kPlanckInternal / (mass_amu * v);
}

/// Square observation window centered on the beam axis, side extent_m.
/// Nodes sit at x_i = (i - n/2)·spacing, so the center node is exactly 0.
struct ObservationGrid {
  double extent_m = 4.0;
  int n_points = 512;

  double spacing() const { return extent_m / n_points; }
  double node(int i) const { return (i - n_points / 2) * spacing(); }
};

/// Probability density per mm² on the observation plane.
struct DiffractionPattern {
  double observation_extent = 0.0;  ///< m
  int n_points = 0;
  std::vector<double> values;       ///< probability per mm², row-major
  double distance = 0.0;            ///< m
  double wavelength = 0.0;          ///< Å

  double spacing() const { return observation_extent / n_points; }
  double node(int i) const { return (i - n_points / 2) * spacing(); }
};

/// Total probability captured by the window (values are per mm²).
inline double integrate_pattern(const DiffractionPattern& p) {
  double cell_mm2 = p.spacing() * 1e3 * p.spacing() * 1e3;
  double s = 0.0;
  for (double v : p.values) s += v;
  return s * cell_mm2;
}

namespace detail {

struct SourcePoint {
  double x, y;  ///< m, relative to the source grid center
  double re, im;
};

/// Nonzero source amplitudes in SI units; absorbed (exactly zero) cells are
/// dropped up front. Order is row-major, so sums stay deterministic.
inline std::vector<SourcePoint> compress_source(const WaveField& field) {
  std::vector<SourcePoint> pts;
  const int n = field.grid.n_points;
  pts.reserve(field.grid.size());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const auto& a = field.amplitudes[static_cast<std::size_t>(iy) * n + ix];
      if (a.real() == 0.0 && a.imag() == 0.0) continue;
      double x = (field.grid.node_x(ix) - field.grid.origin[0]) * 1e-10;
      double y = (field.grid.node_y(iy) - field.grid.origin[1]) * 1e-10;
      // 1e10 converts the amplitude from Å⁻¹ to m⁻¹.
      pts.push_back({x, y, a.real() * 1e10, a.imag() * 1e10});
    }
  }
  return pts;
}

}  // namespace detail

/// Kirchhoff far-field integral, evaluated by direct quadrature over the
/// source grid:  ψ'(r) = (k/2πi) ∫d²ρ ψ(ρ) e^{iks}/(2s)·[1 + cosθ],
/// with s = |r−ρ|, cosθ = L/s and unit amplitude constant, so the pattern
/// integrates to the transmitted probability over an unbounded window.
/// The phase is evaluated as k·(s−L) = k·d²/(s+L); dropping the constant
/// e^{ikL} keeps the sine argument small enough for full double accuracy.
inline DiffractionPattern kirchhoff_propagate(const WaveField& field, double wavelength_A,
                                              double distance_m, const ObservationGrid& obs,
                                              int threads = 1) {
  if (!(wavelength_A > 0.0)) throw ConfigError("kirchhoff: wavelength must be > 0");
  if (!(distance_m > 0.0)) throw ConfigError("kirchhoff: distance must be > 0");
  if (obs.n_points < 2 || !(obs.extent_m > 0.0))
    throw ConfigError("kirchhoff: bad observation grid");
  const double src_extent_m = field.grid.extent * 1e-10;
  if (!(distance_m > 100.0 * src_extent_m))
    throw ConfigError("kirchhoff: observation plane is not in the far field");
  const double lambda_m = wavelength_A * 1e-10;
  // Finest intensity fringe spacing is λL/W for a source of width W; the
  // observation pixels must resolve it.
  const double fringe = lambda_m * distance_m / src_extent_m;
  if (obs.spacing() > 0.5 * fringe)
    throw ConfigError("kirchhoff: observation grid too coarse: pixel " +
                      std::to_string(obs.spacing()) + " m exceeds half the finest fringe " +
                      std::to_string(fringe) + " m");

  const auto src = detail::compress_source(field);
  const double k = 2.0 * constants::kPi / lambda_m;
  const double cell_m2 = field.grid.spacing() * 1e-10 * field.grid.spacing() * 1e-10;
  const double amp = k / (2.0 * constants::kPi) * cell_m2;
  const double L = distance_m;
  const double L2 = L * L;

  DiffractionPattern pat;
  pat.observation_extent = obs.extent_m;
  pat.n_points = obs.n_points;
  pat.distance = distance_m;
  pat.wavelength = wavelength_A;
  pat.values.assign(static_cast<std::size_t>(obs.n_points) * obs.n_points, 0.0);

  const int n = obs.n_points;
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t iy = lo; iy < hi; ++iy) {
      double Y = obs.node(static_cast<int>(iy));
      for (int ix = 0; ix < n; ++ix) {
        double X = obs.node(ix);
        double re = 0.0, im = 0.0;
        for (const auto& p : src) {
          double dx = X - p.x;
          double dy = Y - p.y;
          double d2 = dx * dx + dy * dy;
          double s = std::sqrt(L2 + d2);
          double phase = k * (d2 / (s + L));
          double w = (1.0 + L / s) / (2.0 * s);
          double c = std::cos(phase);
          double si = std::sin(phase);
          re += (p.re * c - p.im * si) * w;
          im += (p.re * si + p.im * c) * w;
        }
        double mod2 = (re * re + im * im) * amp * amp;
        pat.values[iy * n + ix] = mod2 * 1e-6;  // per m² → per mm²
      }
    }
  });
  return pat;
}

/// Fourier fast path: in the far field the pattern is the scaled modulus
/// squared of the transform of ψ. Output lands on the transform's native
/// nodes, extent λL/Δ_source; pad_factor refines the sampling.
inline DiffractionPattern fraunhofer_pattern(const WaveField& field, double wavelength_A,
                                             double distance_m, int pad_factor = 4) {
  if (!(wavelength_A > 0.0)) throw ConfigError("fraunhofer: wavelength must be > 0");
  if (!(distance_m > 0.0)) throw ConfigError("fraunhofer: distance must be > 0");
  if (pad_factor < 1) throw ConfigError("fraunhofer: pad_factor must be >= 1");

  const int n = field.grid.n_points;
  const int np = n * pad_factor;
  const double lambda_m = wavelength_A * 1e-10;
  const double k = 2.0 * constants::kPi / lambda_m;
  const double d_src_m = field.grid.spacing() * 1e-10;
  const double cell_m2 = d_src_m * d_src_m;

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(np) * np,
                                        std::complex<double>(0.0, 0.0));
  const int off = (np - n) / 2;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      buf[static_cast<std::size_t>(iy + off) * np + (ix + off)] =
          field.amplitudes[static_cast<std::size_t>(iy) * n + ix] * 1e10;

  Fft2D fft(np);
  fft.forward(buf.data());

  DiffractionPattern pat;
  pat.n_points = np;
  pat.observation_extent = lambda_m * distance_m / d_src_m;
  pat.distance = distance_m;
  pat.wavelength = wavelength_A;
  pat.values.assign(buf.size(), 0.0);
  const double amp = k / (2.0 * constants::kPi * distance_m) * cell_m2;
  for (int iy = 0; iy < np; ++iy) {
    int fy = (iy + np / 2) % np;  // fftshift
    for (int ix = 0; ix < np; ++ix) {
      int fx = (ix + np / 2) % np;
      double mod2 = std::norm(buf[static_cast<std::size_t>(fy) * np + fx]) * amp * amp;
      pat.values[static_cast<std::size_t>(iy) * np + ix] = mod2 * 1e-6;
    }
  }
  return pat;
}

/// Azimuthal average in fixed-width annuli about center; returns
/// (annulus mid radius in m, mean probability per mm²) out to extent/2.
inline std::vector<std::pair<double, double>> radial_profile(
    const DiffractionPattern& pat, std::array<double, 2> center, double annulus_width_m) {
  if (!(annulus_width_m > 0.0)) throw ConfigError("radial_profile: annulus width must be > 0");
  const double r_max = 0.5 * pat.observation_extent;
  const int bins = std::max(1, static_cast<int>(std::floor(r_max / annulus_width_m)));
  std::vector<double> sum(bins, 0.0);
  std::vector<long> count(bins, 0);
  const int n = pat.n_points;
  for (int iy = 0; iy < n; ++iy) {
    double y = pat.node(iy) - center[1];
    for (int ix = 0; ix < n; ++ix) {
      double x = pat.node(ix) - center[0];
      double r = std::sqrt(x * x + y * y);
      int b = static_cast<int>(r / annulus_width_m);
      if (b >= bins) continue;
      sum[b] += pat.values[static_cast<std::size_t>(iy) * n + ix];
      ++count[b];
    }
  }
  std::vector<std::pair<double, double>> prof(bins);
  for (int b = 0; b < bins; ++b)
    prof[b] = {(b + 0.5) * annulus_width_m, count[b] ? sum[b] / count[b] : 0.0};
  return prof;
}

}  // namespace hbndiff
