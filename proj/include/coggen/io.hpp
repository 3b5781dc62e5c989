#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"
#include "coggen/optimizer.hpp"
#include "coggen/sampling_mask.hpp"

namespace coggen {

// CGIM container: magic "CGIM", u32 version=1, u32 height, u32 width,
// u8 dtype (0 = complex-f64 interleaved, 1 = bool-u8), then the row-major
// little-endian payload.
namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  require(is.gcount() == 4, errc::truncated_file, "cgim: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  require(is.gcount() == 8, errc::truncated_file, "cgim: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void write_cgim_header(std::ostream& os, std::uint32_t h, std::uint32_t w,
                              std::uint8_t dtype) {
  os.write("CGIM", 4);
  put_u32(os, 1);
  put_u32(os, h);
  put_u32(os, w);
  os.put(static_cast<char>(dtype));
}

struct cgim_header {
  std::uint32_t height = 0, width = 0;
  std::uint8_t dtype = 0;
};

inline cgim_header read_cgim_header(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  require(is.gcount() == 4, errc::truncated_file, "cgim: file shorter than the magic");
  require(std::memcmp(magic, "CGIM", 4) == 0, errc::bad_magic, "cgim: wrong magic bytes");
  const std::uint32_t version = get_u32(is);
  require(version == 1, errc::unsupported_version, "cgim: unsupported version");
  cgim_header h;
  h.height = get_u32(is);
  h.width = get_u32(is);
  int d = is.get();
  require(d != EOF, errc::truncated_file, "cgim: truncated header");
  h.dtype = static_cast<std::uint8_t>(d);
  require(h.height >= 1 && h.width >= 1 &&
              static_cast<std::uint64_t>(h.height) * h.width <= 100'000'000ull,
          errc::bad_dims, "cgim: implausible dimensions");
  return h;
}

}  // namespace detail

inline void write_grid(const std::string& path, const complex_grid& g) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), errc::io_error, "write_grid: cannot open " + path);
  detail::write_cgim_header(os, static_cast<std::uint32_t>(g.height),
                            static_cast<std::uint32_t>(g.width), 0);
  for (const cdouble& z : g.data) {
    detail::put_f64(os, z.real());
    detail::put_f64(os, z.imag());
  }
  require(os.good(), errc::io_error, "write_grid: write failed for " + path);
}

inline complex_grid read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), errc::io_error, "read_grid: cannot open " + path);
  const detail::cgim_header h = detail::read_cgim_header(is);
  require(h.dtype == 0, errc::io_error, "read_grid: file holds a mask, not a complex grid");
  complex_grid g(h.height, h.width);
  for (cdouble& z : g.data) {
    const double re = detail::get_f64(is);
    const double im = detail::get_f64(is);
    z = cdouble(re, im);
  }
  return g;
}

inline void write_mask(const std::string& path, const sampling_mask& m) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), errc::io_error, "write_mask: cannot open " + path);
  detail::write_cgim_header(os, static_cast<std::uint32_t>(m.height),
                            static_cast<std::uint32_t>(m.width), 1);
  os.write(reinterpret_cast<const char*>(m.selected.data()),
           static_cast<std::streamsize>(m.selected.size()));
  require(os.good(), errc::io_error, "write_mask: write failed for " + path);
}

// The file stores geometry only; pattern provenance, acceleration and seed
// are reconstructed (achieved AF from the counts, FULL vs VD2D from
// whether anything is missing).
inline sampling_mask read_mask(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), errc::io_error, "read_mask: cannot open " + path);
  const detail::cgim_header h = detail::read_cgim_header(is);
  require(h.dtype == 1, errc::io_error, "read_mask: file holds a complex grid, not a mask");
  sampling_mask m;
  m.height = h.height;
  m.width = h.width;
  m.selected.resize(static_cast<std::size_t>(h.height) * h.width);
  is.read(reinterpret_cast<char*>(m.selected.data()),
          static_cast<std::streamsize>(m.selected.size()));
  require(static_cast<std::size_t>(is.gcount()) == m.selected.size(), errc::truncated_file,
          "read_mask: truncated payload");
  for (std::uint8_t& b : m.selected) b = b ? 1 : 0;
  const std::size_t count = m.count();
  require(count >= 1, errc::bad_inputs, "read_mask: empty mask");
  m.pattern = count == m.selected.size() ? mask_pattern::full : mask_pattern::vd2d;
  m.acceleration_factor = static_cast<double>(m.selected.size()) / static_cast<double>(count);
  m.center_fraction = 0.0;
  m.seed = 0;
  return m;
}

// Curve CSV: header + one row per logged point, floats at 9 significant
// digits.
inline void write_curve_csv(const std::string& path, const std::vector<curve_point>& curve) {
  std::ofstream os(path);
  require(os.good(), errc::io_error, "write_curve_csv: cannot open " + path);
  os << "iteration,stage,loss,rlne_roi,psnr_db\n";
  char buf[160];
  for (const curve_point& p : curve) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g,%.9g\n", p.iteration, p.stage, p.loss,
                  p.rlne_roi, p.psnr_db);
    os << buf;
  }
  require(os.good(), errc::io_error, "write_curve_csv: write failed for " + path);
}

inline std::vector<curve_point> read_curve_csv(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), errc::io_error, "read_curve_csv: cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), errc::truncated_file,
          "read_curve_csv: empty file");
  require(line == "iteration,stage,loss,rlne_roi,psnr_db", errc::bad_magic,
          "read_curve_csv: unexpected header");
  std::vector<curve_point> curve;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    curve_point p;
    char* end = nullptr;
    const char* s = line.c_str();
    p.iteration = std::strtoull(s, &end, 10);
    require(*end == ',', errc::io_error, "read_curve_csv: malformed row");
    p.stage = std::strtoull(end + 1, &end, 10);
    require(*end == ',', errc::io_error, "read_curve_csv: malformed row");
    p.loss = std::strtod(end + 1, &end);
    require(*end == ',', errc::io_error, "read_curve_csv: malformed row");
    p.rlne_roi = std::strtod(end + 1, &end);
    require(*end == ',', errc::io_error, "read_curve_csv: malformed row");
    p.psnr_db = std::strtod(end + 1, &end);
    curve.push_back(p);
  }
  return curve;
}

// 8-bit PGM magnitude export for eyeballing reconstructions.
inline void write_pgm_magnitude(const std::string& path, const complex_grid& g) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), errc::io_error, "write_pgm_magnitude: cannot open " + path);
  double peak = 0.0;
  for (const cdouble& z : g.data) peak = std::max(peak, std::abs(z));
  os << "P5\n" << g.width << " " << g.height << "\n255\n";
  for (const cdouble& z : g.data) {
    const double v = peak > 0.0 ? std::abs(z) / peak : 0.0;
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
  }
  require(os.good(), errc::io_error, "write_pgm_magnitude: write failed for " + path);
}

}  // namespace coggen
