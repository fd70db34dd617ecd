#pragma once

// Internal unit system: length in angstrom, time in femtosecond, mass in amu,
// energy in eV, charge in units of the elementary charge.

namespace hbndiff::constants {

inline constexpr double kAmuKg = 1.66053906660e-27;
inline constexpr double kElemChargeC = 1.602176634e-19;
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kHbarJs = 1.054571817e-34;

/// 1 amu·Å²/fs² expressed in eV (≈ 103.6427).
inline constexpr double kEnergyUnitEv = kAmuKg * 1e10 / kElemChargeC;

inline constexpr double kHbarEvFs = kHbarJs / kElemChargeC * 1e15;
inline constexpr double kPlanckEvFs = kPlanckJs / kElemChargeC * 1e15;

/// hbar and h in amu·Å²/fs.
inline constexpr double kHbarInternal = kHbarEvFs / kEnergyUnitEv;
inline constexpr double kPlanckInternal = kPlanckEvFs / kEnergyUnitEv;

/// e²/(4πε₀) in eV·Å (Coulomb constant for charges in units of e).
inline constexpr double kCoulombEvA = kElemChargeC * 8.9875517873681764e9 * 1e10;

/// km/s → Å/fs.
inline constexpr double kKmPerSToAngPerFs = 0.01;

/// Supported probe speed range, km/s. Outside this the paraxial picture or the
/// step budget breaks down.
inline constexpr double kMinVelocityKmS = 0.05;
inline constexpr double kMaxVelocityKmS = 200.0;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace hbndiff::constants
