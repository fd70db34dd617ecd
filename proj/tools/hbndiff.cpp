#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "hbndiff/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"helium matter-wave transmission and diffraction through holey hBN"};

  std::string mode, config, out;
  std::vector<std::string> overrides;
  int threads = 1;
  unsigned seed = 0;
  bool validate_only = false;

  app.add_option("--mode", mode, "propagate, sweep, farfield or slice-dump");
  app.add_option("--config", config, "JSON configuration file")->required();
  app.add_option("--out", out, "output directory (created if missing)");
  app.add_option("--set", overrides,
                 "dotted-path config override, e.g. --set run.velocity_km_s=4 (repeatable)");
  app.add_option("--threads", threads, "worker threads; results are identical for any count");
  app.add_option("--seed", seed, "recorded in the manifest; the pipeline is deterministic");
  app.add_flag("--validate", validate_only, "parse and validate the config, then exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate_only) {
      hbndiff::json doc = hbndiff::validate_job(config, overrides);
      std::cout << "configuration OK\n" << doc.dump(2) << "\n";
      return 0;
    }
    if (mode.empty())
      throw hbndiff::ConfigError("--mode required (propagate, sweep, farfield or slice-dump)");
    if (out.empty()) throw hbndiff::ConfigError("--out required");

    hbndiff::JobSpec job;
    job.mode = mode;
    job.config_path = config;
    job.output_dir = out;
    job.overrides = overrides;
    job.threads = threads;
    job.seed = seed;
    hbndiff::json manifest = hbndiff::run_job(job);

    std::cout << "status: ok\n"
              << "outputs: " << out << "\n"
              << manifest["stats"].dump(2) << "\n";
    return 0;
  } catch (const hbndiff::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const hbndiff::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
