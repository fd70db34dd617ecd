#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hbndiff/io.hpp"
#include "hbndiff/metrics.hpp"
#include "test_support.hpp"

using namespace hbndiff;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("sha256 matches the FIPS reference vectors") {
  REQUIRE(sha256_hex(std::string{}) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  REQUIRE(sha256_hex(std::string{"abc"}) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  REQUIRE(sha256_hex(std::string{"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"}) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  REQUIRE(sha256_hex(std::string(1000000, 'a')) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("file hashing sees exactly the stored bytes") {
  auto dir = testsupport::fresh_dir("io_sha");
  auto p = dir / "blob.bin";
  std::string payload = "neither text\0nor short", tail(3000, 'x');
  payload += tail;
  {
    std::ofstream os(p, std::ios::binary);
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  }
  REQUIRE(sha256_file(p) == sha256_hex(payload));
  REQUIRE_THROWS_AS(sha256_file(dir / "absent.bin"), ConfigError);
}

TEST_CASE("real grids round-trip with their sidecar") {
  auto dir = testsupport::fresh_dir("io_real");
  auto p = dir / "slice.bin";

  GridSpec grid{15.9, 16, {1.0, -2.0}};
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = 0.25 * static_cast<double>(i) - 7.0;

  write_grid_real(p, values, grid.n_points, slice_sidecar(grid, 0.5, "eV"));
  auto [back, n] = read_grid_real(p);
  REQUIRE(n == 16);
  REQUIRE(back == values);

  json side = read_json_file(dir / "slice.json");
  REQUIRE(side.at("extent").get<double>() == 15.9);
  REQUIRE(side.at("n_points").get<int>() == 16);
  REQUIRE(side.at("z").get<double>() == 0.5);
  REQUIRE(side.at("units").get<std::string>() == "eV");
  REQUIRE(side.at("origin")[0].get<double>() == 1.0);
  REQUIRE(side.at("origin")[1].get<double>() == -2.0);
}

TEST_CASE("complex grids round-trip bit-exactly") {
  auto dir = testsupport::fresh_dir("io_cplx");
  auto p = dir / "field.bin";

  GridSpec grid{8.0, 16, {0.0, 0.0}};
  std::vector<std::complex<double>> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = {std::sin(0.1 * static_cast<double>(i)), std::cos(0.2 * static_cast<double>(i))};

  write_grid_complex(p, values, grid.n_points, slice_sidecar(grid, 4.23, "amplitude"));
  auto [back, n] = read_grid_complex(p);
  REQUIRE(n == 16);
  REQUIRE(back == values);
}

TEST_CASE("grid readers reject foreign or damaged files") {
  auto dir = testsupport::fresh_dir("io_bad");
  auto p = dir / "grid.bin";
  GridSpec grid{8.0, 16, {0.0, 0.0}};
  std::vector<double> values(grid.size(), 1.5);
  write_grid_real(p, values, grid.n_points, slice_sidecar(grid, 0.0, "eV"));

  // kind mismatch
  REQUIRE_THROWS_AS(read_grid_complex(p), ConfigError);
  // truncation
  std::filesystem::resize_file(p, 16 + 100);
  REQUIRE_THROWS_AS(read_grid_real(p), ConfigError);
  // corrupt magic
  {
    std::fstream fs(p, std::ios::in | std::ios::out | std::ios::binary);
    fs.put('X');
  }
  REQUIRE_THROWS_AS(read_grid_real(p), ConfigError);
  // missing entirely
  REQUIRE_THROWS_AS(read_grid_real(dir / "nope.bin"), ConfigError);
}

TEST_CASE("doubles are printed with full round-trip precision") {
  for (double v : {0.1, 1.0 / 3.0, -2.504e-17, 6.02214076e23, 0.0}) {
    std::string s = format_double(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
  }
  REQUIRE(format_double(0.5) == "0.5");
}

TEST_CASE("transmission table lists one snapshot per row") {
  auto dir = testsupport::fresh_dir("io_csv");
  auto p = dir / "transmission.csv";
  // values with exact binary representations keep the expectation literal
  std::vector<Snapshot> snaps = {{-4.25, 1.0}, {0.0, 0.5}, {4.25, 0.09375}};
  write_transmission_csv(p, snaps);
  REQUIRE(slurp(p) ==
          "z_angstrom,relative_transmission\n"
          "-4.25,1\n"
          "0,0.5\n"
          "4.25,0.09375\n");
}

TEST_CASE("sweep table marks failed points with nan") {
  auto dir = testsupport::fresh_dir("io_sweep");
  auto p = dir / "sweep.csv";

  VelocitySweep sw;
  sw.hole = "hole6";
  SweepPoint a;
  a.velocity_km_s = 2.0;
  a.hole = "hole6";
  a.relative_transmission = 0.25;
  a.ok = true;
  SweepPoint b;
  b.velocity_km_s = 5.0;
  b.hole = "hole6";
  b.ok = false;
  b.diagnostic = "went numerically sideways";
  sw.points = {a, b};

  write_sweep_csv(p, {sw});
  REQUIRE(slurp(p) ==
          "velocity_km_s,hole_name,relative_transmission\n"
          "2,hole6,0.25\n"
          "5,hole6,nan\n");

  auto t = dir / "timings.csv";
  write_sweep_timings_csv(t, {sw});
  std::string timings = slurp(t);
  REQUIRE(timings.find("velocity_km_s") != std::string::npos);
  REQUIRE(timings.find("hole6") != std::string::npos);
}

TEST_CASE("pattern exports an 8-bit log-scale preview") {
  auto dir = testsupport::fresh_dir("io_pgm");
  auto p = dir / "pattern.pgm";

  DiffractionPattern pat;
  pat.observation_extent = 1.0;
  pat.n_points = 32;
  pat.values.assign(32 * 32, 0.0);
  pat.values[0] = 1.0;
  pat.values[1] = 1e-3;
  pat.values[2] = 1e-9;  // below the 6-decade floor
  write_pattern_pgm(p, pat);

  std::string bytes = slurp(p);
  REQUIRE(bytes.rfind("P5\n32 32\n255\n", 0) == 0);
  std::string payload = bytes.substr(bytes.size() - 32 * 32);
  REQUIRE(static_cast<unsigned char>(payload[0]) == 255);
  REQUIRE(static_cast<unsigned char>(payload[1]) == 128);  // three of six decades down
  REQUIRE(static_cast<unsigned char>(payload[2]) == 0);
  REQUIRE(static_cast<unsigned char>(payload[3]) == 0);
}

TEST_CASE("pattern sidecar carries the geometry needed to re-read it") {
  DiffractionPattern pat;
  pat.observation_extent = 4.0;
  pat.n_points = 512;
  pat.distance = 1.0;
  pat.wavelength = 0.4985;
  json side = pattern_sidecar(pat);
  REQUIRE(side.at("extent").get<double>() == 4.0);
  REQUIRE(side.at("n_points").get<int>() == 512);
  REQUIRE(side.at("distance_m").get<double>() == 1.0);
  REQUIRE(side.at("wavelength_angstrom").get<double>() == 0.4985);
  REQUIRE(side.at("units").get<std::string>() == "probability_per_mm2");
}
