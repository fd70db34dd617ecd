#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbndiff/errors.hpp"
#include "hbndiff/farfield.hpp"
#include "hbndiff/metrics.hpp"
#include "hbndiff/potential.hpp"
#include "hbndiff/tdse.hpp"

namespace hbndiff {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Binary grid format: 16-byte header, then row-major little-endian float64
// payload (interleaved re,im pairs for complex). Metadata lives in a JSON
// sidecar next to the file.
//   bytes 0..7   magic "HBNGRID1"
//   bytes 8..11  uint32 kind: 1 = real64, 2 = complex128
//   bytes 12..15 uint32 points per axis
// ---------------------------------------------------------------------------

inline constexpr char kGridMagic[8] = {'H', 'B', 'N', 'G', 'R', 'I', 'D', '1'};
inline constexpr std::uint32_t kGridKindReal = 1;
inline constexpr std::uint32_t kGridKindComplex = 2;

namespace detail {

inline void write_grid_header(std::ofstream& os, std::uint32_t kind, std::uint32_t n) {
  os.write(kGridMagic, 8);
  os.write(reinterpret_cast<const char*>(&kind), 4);
  os.write(reinterpret_cast<const char*>(&n), 4);
}

inline std::pair<std::uint32_t, std::uint32_t> read_grid_header(std::ifstream& is,
                                                                const std::string& path) {
  char magic[8];
  std::uint32_t kind = 0, n = 0;
  is.read(magic, 8);
  is.read(reinterpret_cast<char*>(&kind), 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  if (!is || std::memcmp(magic, kGridMagic, 8) != 0)
    throw ConfigError("not a grid file: " + path);
  return {kind, n};
}

}  // namespace detail

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return j;
}

/// Real grid (potential or filter slice, diffraction pattern) + sidecar.
inline void write_grid_real(const std::filesystem::path& path, const std::vector<double>& values,
                            int n_points, const json& sidecar) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  detail::write_grid_header(os, kGridKindReal, static_cast<std::uint32_t>(n_points));
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!os) throw ConfigError("short write: " + path.string());
  write_json_file(std::filesystem::path(path).replace_extension(".json"), sidecar);
}

inline void write_grid_complex(const std::filesystem::path& path,
                               const std::vector<std::complex<double>>& values, int n_points,
                               const json& sidecar) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  detail::write_grid_header(os, kGridKindComplex, static_cast<std::uint32_t>(n_points));
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * 2 * sizeof(double)));
  if (!os) throw ConfigError("short write: " + path.string());
  write_json_file(std::filesystem::path(path).replace_extension(".json"), sidecar);
}

inline std::pair<std::vector<double>, int> read_grid_real(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  auto [kind, n] = detail::read_grid_header(is, path.string());
  if (kind != kGridKindReal) throw ConfigError(path.string() + ": not a real grid");
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw ConfigError("truncated grid file: " + path.string());
  return {std::move(values), static_cast<int>(n)};
}

inline std::pair<std::vector<std::complex<double>>, int> read_grid_complex(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  auto [kind, n] = detail::read_grid_header(is, path.string());
  if (kind != kGridKindComplex) throw ConfigError(path.string() + ": not a complex grid");
  std::vector<std::complex<double>> values(static_cast<std::size_t>(n) * n);
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * 2 * sizeof(double)));
  if (!is) throw ConfigError("truncated grid file: " + path.string());
  return {std::move(values), static_cast<int>(n)};
}

inline json slice_sidecar(const GridSpec& grid, double z, const std::string& units) {
  return json{{"extent", grid.extent},
              {"n_points", grid.n_points},
              {"origin", {grid.origin[0], grid.origin[1]}},
              {"z", z},
              {"units", units}};
}

inline json pattern_sidecar(const DiffractionPattern& p) {
  return json{{"extent", p.observation_extent},
              {"n_points", p.n_points},
              {"z", p.distance},
              {"distance_m", p.distance},
              {"wavelength_angstrom", p.wavelength},
              {"units", "probability_per_mm2"}};
}

// ---------------------------------------------------------------------------
// CSV emission. %.17g round-trips doubles and is byte-stable.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_transmission_csv(const std::filesystem::path& path,
                                   const std::vector<Snapshot>& snapshots) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "z_angstrom,relative_transmission\n";
  for (const auto& s : snapshots)
    os << format_double(s.z) << "," << format_double(s.relative_transmission) << "\n";
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<VelocitySweep>& sweeps) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "velocity_km_s,hole_name,relative_transmission\n";
  for (const auto& sw : sweeps)
    for (const auto& p : sw.points) {
      os << format_double(p.velocity_km_s) << "," << p.hole << ",";
      if (p.ok)
        os << format_double(p.relative_transmission) << "\n";
      else
        os << "nan\n";
    }
}

inline void write_sweep_timings_csv(const std::filesystem::path& path,
                                    const std::vector<VelocitySweep>& sweeps) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "velocity_km_s,hole_name,wall_time_s,dt_fs,status\n";
  for (const auto& sw : sweeps)
    for (const auto& p : sw.points) {
      os << format_double(p.velocity_km_s) << "," << p.hole << ","
         << format_double(p.wall_time_s) << "," << format_double(p.dt_used) << ","
         << (p.ok ? "ok" : ("failed: " + p.diagnostic)) << "\n";
    }
}

/// 8-bit logarithmic PGM of a pattern for quick viewing; decades sets the
/// dynamic range below the maximum.
inline void write_pattern_pgm(const std::filesystem::path& path, const DiffractionPattern& p,
                              double decades = 6.0) {
  double vmax = 0.0;
  for (double v : p.values) vmax = std::max(vmax, v);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << "P5\n" << p.n_points << " " << p.n_points << "\n255\n";
  std::vector<unsigned char> row(p.n_points);
  for (int iy = 0; iy < p.n_points; ++iy) {
    for (int ix = 0; ix < p.n_points; ++ix) {
      double v = p.values[static_cast<std::size_t>(iy) * p.n_points + ix];
      double level = 0.0;
      if (v > 0.0 && vmax > 0.0) {
        level = 1.0 + std::log10(v / vmax) / decades;  // 1 at max, 0 at vmax·10^-decades
        level = std::clamp(level, 0.0, 1.0);
      }
      row[ix] = static_cast<unsigned char>(std::lround(level * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()), p.n_points);
  }
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), used for output checksums in run manifests.
// ---------------------------------------------------------------------------

class Sha256 {
 public:
  Sha256() { reset(); }

  void reset() {
    state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
              0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    buffer_len_ = 0;
    total_bits_ = 0;
  }

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    total_bits_ += static_cast<std::uint64_t>(len) * 8;
    while (len > 0) {
      std::size_t take = std::min(len, static_cast<std::size_t>(64 - buffer_len_));
      std::memcpy(buffer_.data() + buffer_len_, p, take);
      buffer_len_ += take;
      p += take;
      len -= take;
      if (buffer_len_ == 64) {
        process_block(buffer_.data());
        buffer_len_ = 0;
      }
    }
  }

  std::string hex_digest() {
    std::array<std::uint32_t, 8> st = state_;
    std::array<unsigned char, 64> buf = buffer_;
    std::size_t blen = buffer_len_;
    std::uint64_t bits = total_bits_;

    buf[blen++] = 0x80;
    if (blen > 56) {
      std::fill(buf.begin() + blen, buf.end(), 0);
      process_block_on(st, buf.data());
      blen = 0;
    }
    std::fill(buf.begin() + blen, buf.begin() + 56, 0);
    for (int i = 0; i < 8; ++i) buf[56 + i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    process_block_on(st, buf.data());

    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", st[i]);
    return std::string(out, 64);
  }

 private:
  static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  static void process_block_on(std::array<std::uint32_t, 8>& st, const unsigned char* block) {
    static constexpr std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto [a, b, c, d, e, f, g, h] = st;
    for (int i = 0; i < 64; ++i) {
      std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = h + s1 + ch + K[i] + w[i];
      std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = s0 + maj;
      h = g; g = f; f = e; e = d + t1;
      d = c; c = b; b = a; a = t1 + t2;
    }
    st[0] += a; st[1] += b; st[2] += c; st[3] += d;
    st[4] += e; st[5] += f; st[6] += g; st[7] += h;
  }

  void process_block(const unsigned char* block) { process_block_on(state_, block); }

  std::array<std::uint32_t, 8> state_{};
  std::array<unsigned char, 64> buffer_{};
  std::size_t buffer_len_ = 0;
  std::uint64_t total_bits_ = 0;
};

inline std::string sha256_hex(const void* data, std::size_t len) {
  Sha256 h;
  h.update(data, len);
  return h.hex_digest();
}

inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  Sha256 h;
  char buf[65536];
  while (is) {
    is.read(buf, sizeof(buf));
    h.update(buf, static_cast<std::size_t>(is.gcount()));
  }
  return h.hex_digest();
}

}  // namespace hbndiff
