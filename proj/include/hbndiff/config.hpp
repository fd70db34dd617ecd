#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbndiff/errors.hpp"
#include "hbndiff/io.hpp"
#include "hbndiff/lattice.hpp"
#include "hbndiff/metrics.hpp"
#include "hbndiff/potential.hpp"
#include "hbndiff/tdse.hpp"

namespace hbndiff {

struct FarfieldSettings {
  std::string input_field;  // optional saved complex grid; empty = propagate first
  double distance_m = 1.0;
  double window_m = 4.0;
  int n_points = 512;
  std::string method = "direct";  // "direct" or "fourier"
  int pad_factor = 4;
  int radial_bins = 128;
  bool pgm = true;
};

/// Fully resolved, validated simulation setup parsed from one JSON document.
struct SimulationConfig {
  std::vector<AtomSpecies> species;
  int n_cells = 12;
  double lattice_constant = 2.504;
  double plane_z = 0.0;
  std::vector<HoleSpec> holes;

  double mass_amu = 4.002602;
  GridSpec grid{15.9, 256, {0.0, 0.0}};
  PotentialParams potential;
  double slice_dz = 0.02;

  std::string run_hole = "hole6";
  double velocity_km_s = 2.0;
  double z_start = -4.23;
  double z_stop = 4.23;
  double dt = 0.0;  // 0 = auto
  int snapshot_every = 0;
  double filter_timescale = 0.1;
  DtSelection dt_selection;

  std::vector<std::string> sweep_holes;      // empty = all defined holes
  std::vector<double> sweep_velocities;

  std::vector<double> slice_z{0.0};

  FarfieldSettings farfield;

  json resolved;  // canonical merged document, embedded in run manifests

  MonolayerModel build_lattice() const {
    MonolayerModel m = build_supercell(n_cells, lattice_constant, species.at(0), species.at(1));
    m.plane_z = plane_z;
    for (auto& a : m.atoms) a.pos[2] = plane_z;
    return m;
  }

  const HoleSpec& hole_by_name(const std::string& name) const {
    for (const auto& h : holes)
      if (h.name == name) return h;
    std::string avail;
    for (const auto& h : holes) avail += (avail.empty() ? "" : ", ") + h.name;
    throw ConfigError("unknown hole '" + name + "' (available: " + avail + ")");
  }

  /// Base run for a hole whose center is already resolved; the grid is
  /// centered on the hole. snapshot_every 0 keeps only start and end points.
  RunConfig make_run(const HoleSpec& h) const {
    RunConfig rc;
    rc.velocity_km_s = velocity_km_s;
    rc.z_start = z_start;
    rc.z_stop = z_stop;
    rc.dt = dt;
    rc.grid = grid;
    rc.grid.origin = h.center;
    rc.mass_amu = mass_amu;
    rc.hole = h.name;
    rc.reference_area = h.reference_area;
    rc.snapshot_every =
        snapshot_every > 0 ? snapshot_every : std::numeric_limits<int>::max();
    rc.filter_timescale = filter_timescale;
    return rc;
  }
};

namespace detail {

inline void check_keys(const json& j, const std::string& path, std::set<std::string> allowed,
                       std::vector<std::string>& diags) {
  if (!j.is_object()) {
    diags.push_back(path + ": expected an object");
    return;
  }
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) diags.push_back(path + "." + key + ": unknown key");
}

inline double get_num(const json& j, const std::string& path, const char* key, double fallback,
                      std::vector<std::string>& diags) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    diags.push_back(path + "." + key + ": expected a number");
    return fallback;
  }
  return j[key].get<double>();
}

inline int get_int(const json& j, const std::string& path, const char* key, int fallback,
                   std::vector<std::string>& diags) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    diags.push_back(path + "." + key + ": expected an integer");
    return fallback;
  }
  return j[key].get<int>();
}

inline AtomSpecies parse_species(const json& j, const std::string& path,
                                 std::vector<std::string>& diags) {
  AtomSpecies sp;
  check_keys(j, path, {"name", "c6_eV_A6", "d_matrix", "partial_charge_e", "vdw_radius_A"}, diags);
  if (j.contains("name") && j["name"].is_string())
    sp.name = j["name"].get<std::string>();
  else
    diags.push_back(path + ".name: required string");
  sp.c6 = get_num(j, path, "c6_eV_A6", 0.0, diags);
  if (!(sp.c6 > 0)) diags.push_back(path + ".c6_eV_A6: must be > 0");
  sp.partial_charge = get_num(j, path, "partial_charge_e", 0.0, diags);
  sp.vdw_radius = get_num(j, path, "vdw_radius_A", 0.0, diags);
  if (!(sp.vdw_radius > 0)) diags.push_back(path + ".vdw_radius_A: must be > 0");
  sp.d_matrix = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (j.contains("d_matrix")) {
    const json& d = j["d_matrix"];
    bool shape_ok = d.is_array() && d.size() == 3;
    if (shape_ok)
      for (const auto& row : d) shape_ok = shape_ok && row.is_array() && row.size() == 3;
    if (!shape_ok) {
      diags.push_back(path + ".d_matrix: expected a 3x3 array");
    } else {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          if (!d[r][c].is_number()) {
            diags.push_back(path + ".d_matrix: entries must be numbers");
            return sp;
          }
          sp.d_matrix[3 * r + c] = d[r][c].get<double>();
        }
      try {
        validate_species(sp);
      } catch (const ConfigError& e) {
        diags.push_back(path + ".d_matrix: " + e.what());
      }
    }
  }
  return sp;
}

inline HoleSpec parse_hole(const json& j, const std::string& path,
                           std::vector<std::string>& diags) {
  HoleSpec h;
  check_keys(j, path,
             {"name", "kind", "diameter_A", "center", "removed_indices", "reference_area_A2"},
             diags);
  if (j.contains("name") && j["name"].is_string())
    h.name = j["name"].get<std::string>();
  else
    diags.push_back(path + ".name: required string");
  std::string kind = j.value("kind", "circular");
  if (kind == "circular") {
    h.kind = HoleSpec::Kind::Circular;
    h.diameter = get_num(j, path, "diameter_A", 0.0, diags);
    if (!(h.diameter > 0)) diags.push_back(path + ".diameter_A: must be > 0");
  } else if (kind == "explicit") {
    h.kind = HoleSpec::Kind::Explicit;
    if (!j.contains("removed_indices") || !j["removed_indices"].is_array() ||
        j["removed_indices"].empty()) {
      diags.push_back(path + ".removed_indices: required non-empty array for kind 'explicit'");
    } else {
      for (const auto& v : j["removed_indices"]) {
        if (!v.is_number_integer()) {
          diags.push_back(path + ".removed_indices: entries must be integers");
          break;
        }
        h.removed_indices.push_back(v.get<int>());
      }
    }
  } else {
    diags.push_back(path + ".kind: must be 'circular' or 'explicit'");
  }
  h.center_auto = true;
  if (j.contains("center") && !(j["center"].is_string() && j["center"] == "auto")) {
    const json& c = j["center"];
    if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      h.center_auto = false;
      h.center = {c[0].get<double>(), c[1].get<double>()};
    } else {
      diags.push_back(path + ".center: expected \"auto\" or [x, y]");
    }
  }
  h.reference_area = get_num(j, path, "reference_area_A2", 0.0, diags);
  if (!(h.reference_area > 0)) diags.push_back(path + ".reference_area_A2: must be > 0");
  return h;
}

}  // namespace detail

inline json default_config_json() {
  return json{
      {"probe", {{"mass_amu", 4.002602}, {"alpha0_A3", 0.205}}},
      {"lattice", {{"n_cells", 12}, {"lattice_constant_A", 2.504}, {"plane_z_A", 0.0}}},
      {"grid", {{"extent_A", 15.9}, {"n_points", 256}}},
      {"potential",
       {{"cutoff_A", 12.0}, {"u_max_eV", 100.0}, {"smoothing_A", 0.22}, {"slice_dz_A", 0.02}}},
      {"run",
       {{"hole", "hole6"},
        {"velocity_km_s", 2.0},
        {"z_start_A", -4.23},
        {"z_stop_A", 4.23},
        {"dt_fs", 0.0},
        {"snapshot_every", 0},
        {"filter_timescale_fs", 0.1},
        {"dt_max_phase", 0.3},
        {"dt_dz_max_A", 0.05}}},
      {"sweep", {{"holes", json::array()}, {"velocities_km_s", json::array()}}},
      {"slice_dump", {{"z_A", {0.0}}}},
      {"farfield",
       {{"input_field", ""},
        {"distance_m", 1.0},
        {"window_m", 4.0},
        {"n_points", 512},
        {"method", "direct"},
        {"pad_factor", 4},
        {"radial_bins", 128},
        {"pgm", true}}},
  };
}

/// Apply one dotted-path override, e.g. "run.velocity_km_s=4". The value is
/// parsed as JSON when possible and kept as a string otherwise.
inline void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like path.to.key=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  std::string pointer;
  for (std::size_t i = 0; i < path.size(); ++i)
    pointer += (path[i] == '.') ? '/' : path[i];
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;
  try {
    doc[json::json_pointer("/" + pointer)] = parsed;
  } catch (const json::exception& e) {
    throw ConfigError("cannot apply override '" + assignment + "': " + e.what());
  }
}

/// Merge user document over defaults, validate everything, and produce the
/// typed configuration. Collects all diagnostics before failing.
inline SimulationConfig load_config(const json& user) {
  std::vector<std::string> diags;

  json doc = default_config_json();
  if (!user.is_object()) {
    throw ConfigError("config root: expected a JSON object");
  }
  doc.update(user, /*merge_objects=*/true);

  detail::check_keys(doc, "config",
                     {"species", "probe", "lattice", "holes", "grid", "potential", "run", "sweep",
                      "slice_dump", "farfield"},
                     diags);

  SimulationConfig cfg;

  if (!doc.contains("species") || !doc["species"].is_array() || doc["species"].size() != 2) {
    diags.push_back("species: required array of exactly 2 entries (the two honeycomb basis atoms)");
  } else {
    int i = 0;
    for (const auto& s : doc["species"])
      cfg.species.push_back(detail::parse_species(s, "species[" + std::to_string(i++) + "]", diags));
    std::set<std::string> names;
    for (const auto& s : cfg.species)
      if (!names.insert(s.name).second) diags.push_back("species: duplicate name '" + s.name + "'");
  }

  if (doc.contains("probe")) {
    detail::check_keys(doc["probe"], "probe", {"mass_amu", "alpha0_A3"}, diags);
    cfg.mass_amu = detail::get_num(doc["probe"], "probe", "mass_amu", cfg.mass_amu, diags);
    cfg.potential.alpha0 =
        detail::get_num(doc["probe"], "probe", "alpha0_A3", cfg.potential.alpha0, diags);
    if (!(cfg.mass_amu > 0)) diags.push_back("probe.mass_amu: must be > 0");
    if (cfg.potential.alpha0 < 0) diags.push_back("probe.alpha0_A3: must be >= 0");
  }

  {
    const json& l = doc["lattice"];
    detail::check_keys(l, "lattice", {"n_cells", "lattice_constant_A", "plane_z_A"}, diags);
    cfg.n_cells = detail::get_int(l, "lattice", "n_cells", cfg.n_cells, diags);
    cfg.lattice_constant =
        detail::get_num(l, "lattice", "lattice_constant_A", cfg.lattice_constant, diags);
    cfg.plane_z = detail::get_num(l, "lattice", "plane_z_A", cfg.plane_z, diags);
    if (cfg.n_cells < 1) diags.push_back("lattice.n_cells: must be >= 1");
    if (!(cfg.lattice_constant > 0)) diags.push_back("lattice.lattice_constant_A: must be > 0");
  }

  if (!doc.contains("holes") || !doc["holes"].is_array() || doc["holes"].empty()) {
    diags.push_back("holes: required non-empty array");
  } else {
    int i = 0;
    for (const auto& h : doc["holes"])
      cfg.holes.push_back(detail::parse_hole(h, "holes[" + std::to_string(i++) + "]", diags));
    std::set<std::string> names;
    for (const auto& h : cfg.holes)
      if (!names.insert(h.name).second) diags.push_back("holes: duplicate name '" + h.name + "'");
  }

  {
    const json& g = doc["grid"];
    detail::check_keys(g, "grid", {"extent_A", "n_points"}, diags);
    cfg.grid.extent = detail::get_num(g, "grid", "extent_A", cfg.grid.extent, diags);
    cfg.grid.n_points = detail::get_int(g, "grid", "n_points", cfg.grid.n_points, diags);
    try {
      validate_grid(cfg.grid);
    } catch (const ConfigError& e) {
      diags.push_back(std::string("grid: ") + e.what());
    }
  }

  {
    const json& p = doc["potential"];
    detail::check_keys(p, "potential", {"cutoff_A", "u_max_eV", "smoothing_A", "slice_dz_A"},
                       diags);
    cfg.potential.cutoff = detail::get_num(p, "potential", "cutoff_A", cfg.potential.cutoff, diags);
    cfg.potential.u_max = detail::get_num(p, "potential", "u_max_eV", cfg.potential.u_max, diags);
    cfg.potential.smoothing =
        detail::get_num(p, "potential", "smoothing_A", cfg.potential.smoothing, diags);
    cfg.slice_dz = detail::get_num(p, "potential", "slice_dz_A", cfg.slice_dz, diags);
    if (!(cfg.potential.cutoff > 0)) diags.push_back("potential.cutoff_A: must be > 0");
    if (!(cfg.potential.u_max > 0)) diags.push_back("potential.u_max_eV: must be > 0");
    if (cfg.potential.smoothing < 0)
      diags.push_back("potential.smoothing_A: must be >= 0 (0 disables band-limiting)");
    if (!(cfg.slice_dz > 0)) diags.push_back("potential.slice_dz_A: must be > 0");
  }

  {
    const json& r = doc["run"];
    detail::check_keys(r, "run",
                       {"hole", "velocity_km_s", "z_start_A", "z_stop_A", "dt_fs",
                        "snapshot_every", "filter_timescale_fs", "dt_max_phase", "dt_dz_max_A"},
                       diags);
    if (r.contains("hole") && r["hole"].is_string())
      cfg.run_hole = r["hole"].get<std::string>();
    else
      diags.push_back("run.hole: expected a string");
    cfg.velocity_km_s = detail::get_num(r, "run", "velocity_km_s", cfg.velocity_km_s, diags);
    cfg.z_start = detail::get_num(r, "run", "z_start_A", cfg.z_start, diags);
    cfg.z_stop = detail::get_num(r, "run", "z_stop_A", cfg.z_stop, diags);
    cfg.dt = detail::get_num(r, "run", "dt_fs", cfg.dt, diags);
    cfg.snapshot_every = detail::get_int(r, "run", "snapshot_every", cfg.snapshot_every, diags);
    cfg.filter_timescale =
        detail::get_num(r, "run", "filter_timescale_fs", cfg.filter_timescale, diags);
    cfg.dt_selection.max_phase =
        detail::get_num(r, "run", "dt_max_phase", cfg.dt_selection.max_phase, diags);
    cfg.dt_selection.dz_max =
        detail::get_num(r, "run", "dt_dz_max_A", cfg.dt_selection.dz_max, diags);
    if (cfg.velocity_km_s < constants::kMinVelocityKmS || cfg.velocity_km_s > constants::kMaxVelocityKmS)
      diags.push_back("run.velocity_km_s: must be in [" + format_double(constants::kMinVelocityKmS) + ", " +
                      format_double(constants::kMaxVelocityKmS) + "]");
    if (!(cfg.z_start < 0.0 && cfg.z_stop > 0.0))
      diags.push_back("run.z_start_A/run.z_stop_A: range must straddle the monolayer plane "
                      "(z_start_A < 0 < z_stop_A)");
    if (cfg.dt < 0) diags.push_back("run.dt_fs: must be >= 0 (0 selects the step automatically)");
    if (cfg.snapshot_every < 0) diags.push_back("run.snapshot_every: must be >= 0");
    if (!(cfg.filter_timescale > 0))
      diags.push_back("run.filter_timescale_fs: must be > 0");
    if (!(cfg.dt_selection.max_phase > 0)) diags.push_back("run.dt_max_phase: must be > 0");
    if (!(cfg.dt_selection.dz_max > 0)) diags.push_back("run.dt_dz_max_A: must be > 0");
  }

  {
    const json& s = doc["sweep"];
    detail::check_keys(s, "sweep", {"holes", "velocities_km_s"}, diags);
    if (s.contains("holes")) {
      if (!s["holes"].is_array())
        diags.push_back("sweep.holes: expected an array of hole names");
      else
        for (const auto& h : s["holes"]) {
          if (!h.is_string()) {
            diags.push_back("sweep.holes: entries must be strings");
            break;
          }
          cfg.sweep_holes.push_back(h.get<std::string>());
        }
    }
    if (s.contains("velocities_km_s")) {
      if (!s["velocities_km_s"].is_array())
        diags.push_back("sweep.velocities_km_s: expected an array of numbers");
      else
        for (const auto& v : s["velocities_km_s"]) {
          if (!v.is_number()) {
            diags.push_back("sweep.velocities_km_s: entries must be numbers");
            break;
          }
          cfg.sweep_velocities.push_back(v.get<double>());
        }
    }
    for (std::size_t i = 0; i < cfg.sweep_velocities.size(); ++i) {
      double v = cfg.sweep_velocities[i];
      if (v < constants::kMinVelocityKmS || v > constants::kMaxVelocityKmS) {
        diags.push_back("sweep.velocities_km_s[" + std::to_string(i) + "]: must be in [" +
                        format_double(constants::kMinVelocityKmS) + ", " + format_double(constants::kMaxVelocityKmS) +
                        "]");
        break;
      }
      if (i > 0 && !(v > cfg.sweep_velocities[i - 1])) {
        diags.push_back("sweep.velocities_km_s: must be strictly increasing");
        break;
      }
    }
  }

  {
    const json& s = doc["slice_dump"];
    detail::check_keys(s, "slice_dump", {"z_A"}, diags);
    if (s.contains("z_A")) {
      if (!s["z_A"].is_array() || s["z_A"].empty()) {
        diags.push_back("slice_dump.z_A: expected a non-empty array of numbers");
      } else {
        cfg.slice_z.clear();
        for (const auto& v : s["z_A"]) {
          if (!v.is_number()) {
            diags.push_back("slice_dump.z_A: entries must be numbers");
            break;
          }
          cfg.slice_z.push_back(v.get<double>());
        }
      }
    }
  }

  {
    const json& f = doc["farfield"];
    detail::check_keys(f, "farfield",
                       {"input_field", "distance_m", "window_m", "n_points", "method",
                        "pad_factor", "radial_bins", "pgm"},
                       diags);
    FarfieldSettings& ff = cfg.farfield;
    if (f.contains("input_field")) {
      if (f["input_field"].is_string())
        ff.input_field = f["input_field"].get<std::string>();
      else
        diags.push_back("farfield.input_field: expected a string path");
    }
    ff.distance_m = detail::get_num(f, "farfield", "distance_m", ff.distance_m, diags);
    ff.window_m = detail::get_num(f, "farfield", "window_m", ff.window_m, diags);
    ff.n_points = detail::get_int(f, "farfield", "n_points", ff.n_points, diags);
    ff.method = f.value("method", ff.method);
    ff.pad_factor = detail::get_int(f, "farfield", "pad_factor", ff.pad_factor, diags);
    ff.radial_bins = detail::get_int(f, "farfield", "radial_bins", ff.radial_bins, diags);
    if (f.contains("pgm")) {
      if (f["pgm"].is_boolean())
        ff.pgm = f["pgm"].get<bool>();
      else
        diags.push_back("farfield.pgm: expected a boolean");
    }
    if (!(ff.distance_m > 0)) diags.push_back("farfield.distance_m: must be > 0");
    if (!(ff.window_m > 0)) diags.push_back("farfield.window_m: must be > 0");
    if (ff.n_points < 16) diags.push_back("farfield.n_points: must be >= 16");
    if (ff.method != "direct" && ff.method != "fourier")
      diags.push_back("farfield.method: must be 'direct' or 'fourier'");
    if (ff.pad_factor < 1) diags.push_back("farfield.pad_factor: must be >= 1");
    if (ff.radial_bins < 1) diags.push_back("farfield.radial_bins: must be >= 1");
  }

  // Cross-references last so the "unknown hole" message lists real names.
  if (diags.empty()) {
    auto known = [&](const std::string& name) {
      return std::any_of(cfg.holes.begin(), cfg.holes.end(),
                         [&](const HoleSpec& h) { return h.name == name; });
    };
    if (!known(cfg.run_hole)) {
      std::string avail;
      for (const auto& h : cfg.holes) avail += (avail.empty() ? "" : ", ") + h.name;
      diags.push_back("run.hole: unknown hole '" + cfg.run_hole + "' (available: " + avail + ")");
    }
    for (const auto& name : cfg.sweep_holes)
      if (!known(name)) diags.push_back("sweep.holes: unknown hole '" + name + "'");
  }

  if (!diags.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& d : diags) msg += "\n  - " + d;
    throw ConfigError(msg);
  }

  cfg.resolved = doc;
  return cfg;
}

inline SimulationConfig load_config_file(const std::filesystem::path& path,
                                         const std::vector<std::string>& overrides = {}) {
  json doc = read_json_file(path);
  for (const auto& ov : overrides) apply_override(doc, ov);
  return load_config(doc);
}

/// Locate a config shipped with the project: absolute/relative path as given,
/// else relative to HBNDIFF_DATA_DIR.
inline std::filesystem::path resolve_config_path(const std::string& arg) {
  std::filesystem::path p(arg);
  if (std::filesystem::exists(p)) return p;
  if (const char* env = std::getenv("HBNDIFF_DATA_DIR")) {
    std::filesystem::path alt = std::filesystem::path(env) / p;
    if (std::filesystem::exists(alt)) return alt;
  }
  throw ConfigError("config file not found: " + arg);
}

}  // namespace hbndiff
