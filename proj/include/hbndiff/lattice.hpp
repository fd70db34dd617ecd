#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "hbndiff/errors.hpp"

namespace hbndiff {

/// Per-species interaction parameters of a monolayer atom.
struct AtomSpecies {
  std::string name;                 ///< "B" or "N" in the shipped configs
  double c6 = 0.0;                  ///< dispersion coefficient with the probe atom, eV·Å⁶
  std::array<double, 9> d_matrix{};  ///< 3×3 symmetric anisotropy matrix, row-major
  double partial_charge = 0.0;      ///< effective charge, units of e
  double vdw_radius = 0.0;          ///< van der Waals radius, Å

  double d_trace() const { return d_matrix[0] + d_matrix[4] + d_matrix[8]; }
};

inline void validate_species(const AtomSpecies& s) {
  if (!(s.c6 > 0.0)) throw ConfigError("species " + s.name + ": c6 must be > 0");
  if (!(s.vdw_radius > 0.0)) throw ConfigError("species " + s.name + ": vdw_radius must be > 0");
  const auto& d = s.d_matrix;
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  double asym = std::max({std::abs(d[1] - d[3]), std::abs(d[2] - d[6]), std::abs(d[5] - d[7])});
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw ConfigError("species " + s.name + ": d_matrix must be symmetric");
  if (!(s.d_trace() > 0.0) || !std::isfinite(s.d_trace()))
    throw ConfigError("species " + s.name + ": d_matrix trace must be finite and positive");
}

struct Atom {
  std::array<double, 3> pos{};  ///< Å
  int species = 0;              ///< index into MonolayerModel::species
};

/// The diffraction mask: supercell atoms plus their species table.
struct MonolayerModel {
  std::vector<Atom> atoms;
  std::vector<AtomSpecies> species;
  double lattice_constant = 0.0;  ///< Å
  double plane_z = 0.0;           ///< Å

  const AtomSpecies& species_of(const Atom& a) const { return species[a.species]; }
};

/// Hole geometry: a circular punch or an explicit removed-atom list.
struct HoleSpec {
  enum class Kind { Circular, Explicit };
  std::string name;
  Kind kind = Kind::Circular;
  bool center_auto = false;                ///< derive center from the lattice
  std::array<double, 2> center{0.0, 0.0};  ///< Å, in the monolayer plane
  double diameter = 0.0;                   ///< Å, circular only
  std::vector<int> removed_indices;        ///< explicit only
  double reference_area = 0.0;             ///< comparison-circle area, Å²
};

/// Honeycomb supercell with a two-atom (B, N) basis per primitive cell.
/// Lattice vectors a1 = a·(1,0), a2 = a·(1/2, √3/2); the second basis atom
/// sits at (a1+a2)/3, giving a nearest-neighbour distance of a/√3.
inline MonolayerModel build_supercell(int n_cells, double lattice_constant,
                                      const AtomSpecies& b, const AtomSpecies& n) {
  if (n_cells < 1) throw ConfigError("build_supercell: n_cells must be >= 1");
  if (!(lattice_constant > 0.0))
    throw ConfigError("build_supercell: lattice constant must be > 0");

  const double a = lattice_constant;
  const double a1x = a, a1y = 0.0;
  const double a2x = 0.5 * a, a2y = 0.5 * std::sqrt(3.0) * a;
  const double bx = (a1x + a2x) / 3.0, by = (a1y + a2y) / 3.0;

  MonolayerModel model;
  model.lattice_constant = a;
  model.plane_z = 0.0;
  model.species = {b, n};
  model.atoms.reserve(static_cast<std::size_t>(2) * n_cells * n_cells);
  for (int i = 0; i < n_cells; ++i) {
    for (int j = 0; j < n_cells; ++j) {
      double cx = i * a1x + j * a2x;
      double cy = i * a1y + j * a2y;
      model.atoms.push_back({{cx, cy, 0.0}, 0});
      model.atoms.push_back({{cx + bx, cy + by, 0.0}, 1});
    }
  }
  return model;
}

/// Hexagon centers of the honeycomb sit at (2/3)(a1+a2) + integer translations.
/// Returns the one closest to the centroid of the model's atoms; this point is a
/// 3-fold symmetry center of the decorated lattice.
inline std::array<double, 2> default_hole_center(const MonolayerModel& model) {
  if (model.atoms.empty()) throw ConfigError("default_hole_center: empty model");
  const double a = model.lattice_constant;
  const double a1x = a, a1y = 0.0;
  const double a2x = 0.5 * a, a2y = 0.5 * std::sqrt(3.0) * a;

  double cx = 0.0, cy = 0.0;
  for (const auto& at : model.atoms) {
    cx += at.pos[0];
    cy += at.pos[1];
  }
  cx /= static_cast<double>(model.atoms.size());
  cy /= static_cast<double>(model.atoms.size());

  // Solve fractional coordinates of the centroid and scan nearby candidates.
  double det = a1x * a2y - a1y * a2x;
  double fi = (cx * a2y - cy * a2x) / det;
  double fj = (cy * a1x - cx * a1y) / det;
  std::array<double, 2> best{0.0, 0.0};
  double best_d2 = std::numeric_limits<double>::max();
  for (int di = -2; di <= 2; ++di) {
    for (int dj = -2; dj <= 2; ++dj) {
      double ui = std::floor(fi) + di + 2.0 / 3.0;
      double uj = std::floor(fj) + dj + 2.0 / 3.0;
      double hx = ui * a1x + uj * a2x;
      double hy = ui * a1y + uj * a2y;
      double d2 = (hx - cx) * (hx - cx) + (hy - cy) * (hy - cy);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {hx, hy};
      }
    }
  }
  return best;
}

/// Resolve an auto-centered hole against a pristine model: the centroid of the
/// listed atoms for explicit holes, the central hexagon otherwise.
inline HoleSpec resolve_center(const MonolayerModel& model, HoleSpec hole) {
  if (!hole.center_auto) return hole;
  hole.center_auto = false;
  if (hole.kind == HoleSpec::Kind::Explicit && !hole.removed_indices.empty()) {
    double cx = 0.0, cy = 0.0;
    for (int idx : hole.removed_indices) {
      if (idx < 0 || idx >= static_cast<int>(model.atoms.size()))
        throw ConfigError("hole " + hole.name + ": removed index " + std::to_string(idx) +
                          " out of range");
      cx += model.atoms[idx].pos[0];
      cy += model.atoms[idx].pos[1];
    }
    double n = static_cast<double>(hole.removed_indices.size());
    hole.center = {cx / n, cy / n};
  } else {
    hole.center = default_hole_center(model);
  }
  return hole;
}

/// Remove the atoms selected by the hole. Circular: strictly inside diameter/2
/// of the center. Explicit: the listed indices. Returns the reduced model and
/// reports how many atoms were removed via removed_count (a hole that removes
/// nothing is a valid degenerate mask; removing everything is an error).
inline MonolayerModel punch_hole(const MonolayerModel& model, const HoleSpec& hole,
                                 int* removed_count = nullptr) {
  if (model.atoms.empty()) throw ConfigError("punch_hole: empty model");

  std::vector<bool> remove(model.atoms.size(), false);
  if (hole.kind == HoleSpec::Kind::Circular) {
    if (!(hole.diameter > 0.0))
      throw ConfigError("hole " + hole.name + ": circular diameter must be > 0");
    double r2 = 0.25 * hole.diameter * hole.diameter;
    for (std::size_t i = 0; i < model.atoms.size(); ++i) {
      double dx = model.atoms[i].pos[0] - hole.center[0];
      double dy = model.atoms[i].pos[1] - hole.center[1];
      if (dx * dx + dy * dy < r2) remove[i] = true;
    }
  } else {
    std::set<int> seen;
    for (int idx : hole.removed_indices) {
      if (idx < 0 || idx >= static_cast<int>(model.atoms.size()))
        throw ConfigError("hole " + hole.name + ": removed index " + std::to_string(idx) +
                          " out of range");
      if (!seen.insert(idx).second)
        throw ConfigError("hole " + hole.name + ": duplicate removed index " +
                          std::to_string(idx));
      remove[idx] = true;
    }
  }

  MonolayerModel out;
  out.species = model.species;
  out.lattice_constant = model.lattice_constant;
  out.plane_z = model.plane_z;
  int removed = 0;
  for (std::size_t i = 0; i < model.atoms.size(); ++i) {
    if (remove[i])
      ++removed;
    else
      out.atoms.push_back(model.atoms[i]);
  }
  if (out.atoms.empty())
    throw ConfigError("hole " + hole.name + ": hole removes all atoms");
  if (removed_count) *removed_count = removed;
  return out;
}

/// Area of the declared comparison circle used to normalize transmission.
inline double reference_circle_area(const HoleSpec& hole) {
  if (!(hole.reference_area > 0.0))
    throw ConfigError("hole " + hole.name + ": no comparison circle declared");
  return hole.reference_area;
}

/// Plain XYZ text for visual inspection.
inline void write_xyz(std::ostream& os, const MonolayerModel& model,
                      const std::string& comment = "hBN monolayer") {
  os << model.atoms.size() << "\n" << comment << "\n";
  char line[128];
  for (const auto& at : model.atoms) {
    std::snprintf(line, sizeof(line), "%s %.6f %.6f %.6f\n",
                  model.species_of(at).name.c_str(), at.pos[0], at.pos[1], at.pos[2]);
    os << line;
  }
}

}  // namespace hbndiff
