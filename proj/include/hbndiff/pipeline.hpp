#pragma once

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hbndiff/config.hpp"
#include "hbndiff/farfield.hpp"
#include "hbndiff/io.hpp"
#include "hbndiff/metrics.hpp"

namespace hbndiff {

struct JobSpec {
  std::string mode;  // propagate | sweep | farfield | slice-dump
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;
  int threads = 1;
  unsigned seed = 0;  // recorded in the manifest; the pipeline is deterministic
};

namespace detail {

/// Collects files written into the output directory. Deterministic outputs get
/// checksums in the manifest; volatile ones (timings) are listed by name only.
class OutputTracker {
 public:
  explicit OutputTracker(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& rel) const { return dir_ / rel; }

  void add(const std::string& rel) {
    created_.push_back(path(rel));
    outputs_.push_back({{"path", rel},
                        {"sha256", sha256_file(path(rel))},
                        {"bytes", std::filesystem::file_size(path(rel))}});
  }

  void add_volatile(const std::string& rel) {
    created_.push_back(path(rel));
    volatile_.push_back(rel);
  }

  void discard_all() {
    std::error_code ec;
    for (const auto& p : created_) std::filesystem::remove(p, ec);
    outputs_ = json::array();
    volatile_ = json::array();
  }

  json outputs() const { return outputs_; }
  json volatile_files() const { return volatile_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> created_;
  json outputs_ = json::array();
  json volatile_ = json::array();
};

struct PropagationOutcome {
  MonolayerModel holed;
  HoleSpec hole;
  RunConfig run;
  PropagationRecord record;
  int removed_atoms = 0;
  std::size_t cached_slices = 0;
};

inline PropagationOutcome run_single(const SimulationConfig& cfg, int threads) {
  MonolayerModel pristine = cfg.build_lattice();
  PropagationOutcome out;
  out.hole = resolve_center(pristine, cfg.hole_by_name(cfg.run_hole));
  out.holed = punch_hole(pristine, out.hole, &out.removed_atoms);
  out.run = cfg.make_run(out.hole);

  SliceProvider slices(out.holed, out.run.grid, cfg.potential, cfg.slice_dz, threads);
  if (!(out.run.dt > 0.0))
    out.run.dt = auto_dt(slices, out.run.velocity_km_s, cfg.dt_selection);
  out.record = propagate(slices, out.run);
  out.cached_slices = slices.cached_slices();
  return out;
}

inline void write_mask_xyz(OutputTracker& tracker, const MonolayerModel& holed,
                           const std::string& hole_name) {
  std::ofstream os(tracker.path("mask.xyz"));
  if (!os) throw ConfigError("cannot write " + tracker.path("mask.xyz").string());
  write_xyz(os, holed, "hBN monolayer, hole " + hole_name);
  os.close();
  tracker.add("mask.xyz");
}

inline json propagate_mode(const SimulationConfig& cfg, const JobSpec& job,
                           OutputTracker& tracker) {
  PropagationOutcome out = run_single(cfg, job.threads);

  write_mask_xyz(tracker, out.holed, out.hole.name);
  write_transmission_csv(tracker.path("transmission.csv"), out.record.snapshots);
  tracker.add("transmission.csv");

  const WaveField& f = out.record.final_field;
  write_grid_complex(tracker.path("final_field.bin"), f.amplitudes, f.grid.n_points,
                     slice_sidecar(f.grid, cfg.z_stop, "probability_amplitude_per_A"));
  tracker.add("final_field.bin");
  tracker.add("final_field.json");

  return json{
      {"hole", out.hole.name},
      {"hole_center_A", {out.hole.center[0], out.hole.center[1]}},
      {"removed_atoms", out.removed_atoms},
      {"velocity_km_s", out.run.velocity_km_s},
      {"kinetic_energy_eV", kinetic_energy(out.run.velocity_km_s, out.run.mass_amu)},
      {"de_broglie_A", de_broglie_wavelength(out.run.velocity_km_s, out.run.mass_amu)},
      {"dt_fs", out.record.dt_used},
      {"steps", out.record.steps},
      {"cached_slices", out.cached_slices},
      {"max_abs_potential_eV", out.record.max_abs_potential},
      {"relative_transmission", out.record.snapshots.back().relative_transmission},
  };
}

inline json sweep_mode(const SimulationConfig& cfg, const JobSpec& job, OutputTracker& tracker) {
  if (cfg.sweep_velocities.empty())
    throw ConfigError("sweep.velocities_km_s: empty; list the velocities to sweep");

  MonolayerModel pristine = cfg.build_lattice();
  std::vector<HoleSpec> holes;
  if (cfg.sweep_holes.empty()) {
    for (const auto& h : cfg.holes) holes.push_back(resolve_center(pristine, h));
  } else {
    for (const auto& name : cfg.sweep_holes)
      holes.push_back(resolve_center(pristine, cfg.hole_by_name(name)));
  }

  RunConfig base = cfg.make_run(holes.front());
  base.snapshot_every = std::numeric_limits<int>::max();
  SweepSettings settings;
  settings.slice_dz = cfg.slice_dz;
  settings.dt_selection = cfg.dt_selection;
  settings.threads = job.threads;

  auto sweeps =
      run_velocity_sweep(pristine, holes, cfg.sweep_velocities, base, cfg.potential, settings);

  write_sweep_csv(tracker.path("sweep.csv"), sweeps);
  tracker.add("sweep.csv");
  write_sweep_timings_csv(tracker.path("sweep_timings.csv"), sweeps);
  tracker.add_volatile("sweep_timings.csv");

  int failures = 0;
  for (const auto& sw : sweeps)
    for (const auto& p : sw.points)
      if (!p.ok) ++failures;
  return json{{"holes", holes.size()},
              {"velocities", cfg.sweep_velocities.size()},
              {"failed_points", failures}};
}

inline json farfield_mode(const SimulationConfig& cfg, const JobSpec& job,
                          OutputTracker& tracker) {
  const FarfieldSettings& ff = cfg.farfield;
  const double lambda = de_broglie_wavelength(cfg.velocity_km_s, cfg.mass_amu);

  WaveField field;
  json source_stats;
  if (!ff.input_field.empty()) {
    std::filesystem::path p = resolve_config_path(ff.input_field);
    auto [amps, n] = read_grid_complex(p);
    json side = read_json_file(std::filesystem::path(p).replace_extension(".json"));
    field.grid.extent = side.at("extent").get<double>();
    field.grid.n_points = n;
    if (side.contains("origin"))
      field.grid.origin = {side["origin"][0].get<double>(), side["origin"][1].get<double>()};
    validate_grid(field.grid);
    if (side.at("n_points").get<int>() != n)
      throw ConfigError(p.string() + ": sidecar n_points disagrees with payload");
    field.amplitudes = std::move(amps);
    field.recompute_norm();
    source_stats = json{{"input_field", ff.input_field}, {"source_norm", field.norm}};
  } else {
    PropagationOutcome out = run_single(cfg, job.threads);
    field = std::move(out.record.final_field);
    source_stats = json{{"hole", out.hole.name},
                        {"steps", out.record.steps},
                        {"dt_fs", out.record.dt_used},
                        {"source_norm", field.norm},
                        {"relative_transmission",
                         out.record.snapshots.back().relative_transmission}};
  }

  DiffractionPattern pat;
  if (ff.method == "direct") {
    ObservationGrid obs;
    obs.extent_m = ff.window_m;
    obs.n_points = ff.n_points;
    pat = kirchhoff_propagate(field, lambda, ff.distance_m, obs, job.threads);
  } else {
    pat = fraunhofer_pattern(field, lambda, ff.distance_m, ff.pad_factor);
  }

  write_grid_real(tracker.path("pattern.bin"), pat.values, pat.n_points, pattern_sidecar(pat));
  tracker.add("pattern.bin");
  tracker.add("pattern.json");

  {
    double width = 0.5 * pat.observation_extent / ff.radial_bins;
    auto prof = radial_profile(pat, {0.0, 0.0}, width);
    std::ofstream os(tracker.path("radial.csv"));
    if (!os) throw ConfigError("cannot write " + tracker.path("radial.csv").string());
    os << "radius_m,mean_probability_per_mm2\n";
    for (const auto& [r, v] : prof) os << format_double(r) << "," << format_double(v) << "\n";
    os.close();
    tracker.add("radial.csv");
  }

  if (ff.pgm) {
    write_pattern_pgm(tracker.path("pattern.pgm"), pat);
    tracker.add("pattern.pgm");
  }

  json stats{{"method", ff.method},
             {"wavelength_A", lambda},
             {"distance_m", ff.distance_m},
             {"observation_extent_m", pat.observation_extent},
             {"pattern_points", pat.n_points},
             {"window_integral", integrate_pattern(pat)}};
  stats.update(source_stats);
  return stats;
}

inline json slice_dump_mode(const SimulationConfig& cfg, const JobSpec& job,
                            OutputTracker& tracker) {
  MonolayerModel pristine = cfg.build_lattice();
  HoleSpec hole = resolve_center(pristine, cfg.hole_by_name(cfg.run_hole));
  int removed = 0;
  MonolayerModel holed = punch_hole(pristine, hole, &removed);
  GridSpec grid = cfg.grid;
  grid.origin = hole.center;

  write_mask_xyz(tracker, holed, hole.name);

  std::string index_csv = "index,z_angstrom,max_abs_eV,clamped_points\n";
  for (std::size_t i = 0; i < cfg.slice_z.size(); ++i) {
    double z = cfg.slice_z[i];
    auto [pot, filt] = sample_slice(holed, grid, z, cfg.potential, job.threads);
    char tag[16];
    std::snprintf(tag, sizeof(tag), "%03zu", i);
    std::string pot_name = std::string("potential_") + tag + ".bin";
    std::string filt_name = std::string("filter_") + tag + ".bin";
    write_grid_real(tracker.path(pot_name), pot.values, grid.n_points,
                    slice_sidecar(grid, z, "eV"));
    tracker.add(pot_name);
    tracker.add(std::string("potential_") + tag + ".json");
    write_grid_real(tracker.path(filt_name), filt.values, grid.n_points,
                    slice_sidecar(grid, z, "dimensionless"));
    tracker.add(filt_name);
    tracker.add(std::string("filter_") + tag + ".json");

    long clamped = 0;
    for (auto c : pot.clamped) clamped += c;
    index_csv += std::to_string(i) + "," + format_double(z) + "," +
                 format_double(pot.max_abs) + "," + std::to_string(clamped) + "\n";
  }
  {
    std::ofstream os(tracker.path("slices.csv"));
    if (!os) throw ConfigError("cannot write " + tracker.path("slices.csv").string());
    os << index_csv;
    os.close();
    tracker.add("slices.csv");
  }

  return json{{"hole", hole.name},
              {"removed_atoms", removed},
              {"slices", cfg.slice_z.size()}};
}

}  // namespace detail

/// Execute one job and write its outputs plus a manifest.json into
/// job.output_dir. On failure every file written so far is removed and the
/// manifest records the error, so the directory never holds partial results.
/// Returns the manifest.
inline json run_job(const JobSpec& job) {
  if (job.mode != "propagate" && job.mode != "sweep" && job.mode != "farfield" &&
      job.mode != "slice-dump")
    throw ConfigError("unknown mode '" + job.mode +
                      "' (expected propagate, sweep, farfield or slice-dump)");
  if (job.output_dir.empty()) throw ConfigError("output directory required");
  if (job.threads < 1) throw ConfigError("threads must be >= 1");

  SimulationConfig cfg =
      load_config_file(resolve_config_path(job.config_path), job.overrides);

  std::filesystem::create_directories(job.output_dir);
  detail::OutputTracker tracker{std::filesystem::path(job.output_dir)};

  json manifest;
  manifest["mode"] = job.mode;
  manifest["seed"] = job.seed;
  manifest["config"] = cfg.resolved;
  if (!job.overrides.empty()) manifest["overrides"] = job.overrides;

  try {
    json stats;
    if (job.mode == "propagate")
      stats = detail::propagate_mode(cfg, job, tracker);
    else if (job.mode == "sweep")
      stats = detail::sweep_mode(cfg, job, tracker);
    else if (job.mode == "farfield")
      stats = detail::farfield_mode(cfg, job, tracker);
    else
      stats = detail::slice_dump_mode(cfg, job, tracker);

    manifest["status"] = "ok";
    manifest["stats"] = stats;
    manifest["outputs"] = tracker.outputs();
    manifest["volatile"] = tracker.volatile_files();
    write_json_file(tracker.path("manifest.json"), manifest);
    return manifest;
  } catch (const std::exception& e) {
    tracker.discard_all();
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["outputs"] = json::array();
    manifest["volatile"] = json::array();
    write_json_file(tracker.path("manifest.json"), manifest);
    throw;
  }
}

/// Parse and fully validate a config; returns the resolved document.
inline json validate_job(const std::string& config_path,
                         const std::vector<std::string>& overrides = {}) {
  SimulationConfig cfg = load_config_file(resolve_config_path(config_path), overrides);
  return cfg.resolved;
}

}  // namespace hbndiff
