// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#include "shearlab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "shearlab/errors.hpp"

namespace shearlab {

namespace {

constexpr char kMagic[4] = {'F', '6', '4', 'R'};
constexpr std::uint16_t kVersion = 1;

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const std::string& in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)])) << (8 * i);
  return v;
}

bool power_of_two(std::uint64_t n) { return n >= 8 && (n & (n - 1)) == 0; }

}  // namespace

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << contents;
  if (!out) throw FormatError("short write to " + path);
}

std::string encode_f64r(const F64RArray& a) {
  std::uint64_t count = 1;
  for (auto e : a.extents) count *= e;
  if (a.extents.empty() || a.extents.size() > 0xffff || count != a.data.size())
    throw FormatError("F64R extents do not match the payload");
  std::string out(kMagic, 4);
  put_le(out, kVersion, 2);
  put_le(out, a.extents.size(), 2);
  for (auto e : a.extents) put_le(out, e, 8);
  out.reserve(out.size() + 8 * a.data.size());
  for (double v : a.data) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

F64RArray decode_f64r(const std::string& b) {
  if (b.size() < 8 || std::memcmp(b.data(), kMagic, 4) != 0) throw FormatError("not an F64R container");
  if (get_le(b, 4, 2) != kVersion) throw FormatError("unsupported F64R version");
  const auto ndim = static_cast<std::size_t>(get_le(b, 6, 2));
  if (ndim == 0) throw FormatError("F64R container with zero dimensions");
  if (b.size() < 8 + 8 * ndim) throw FormatError("truncated F64R header");
  F64RArray a;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    const std::uint64_t e = get_le(b, 8 + 8 * i, 8);
    if (e != 0 && count > (std::uint64_t{1} << 60) / e) throw FormatError("F64R extents overflow");
    count *= e;
    a.extents.push_back(e);
  }
  const std::size_t head = 8 + 8 * ndim;
  if (b.size() - head != 8 * count)
    throw FormatError("F64R payload holds " + std::to_string(b.size() - head) + " bytes, expected " +
                      std::to_string(8 * count));
  a.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) a.data[i] = std::bit_cast<double>(get_le(b, head + 8 * i, 8));
  return a;
}

void write_f64r(const std::string& path, const F64RArray& a) { write_file(path, encode_f64r(a)); }
F64RArray read_f64r(const std::string& path) { return decode_f64r(read_file(path)); }

void write_raster(const std::string& path, const Raster& r) {
  F64RArray a;
  for (int i = 0; i < r.dim; ++i) a.extents.push_back(r.extents[static_cast<std::size_t>(i)]);
  a.data = r.data;
  write_f64r(path, a);
}

Raster read_raster(const std::string& path) {
  F64RArray a = read_f64r(path);
  if (a.extents.size() != 2 && a.extents.size() != 3) throw FormatError(path + ": raster must be 2D or 3D");
  for (auto e : a.extents)
    if (e != a.extents[0] || !power_of_two(e))
      throw FormatError(path + ": raster extents must be equal powers of two >= 8");
  Raster r(static_cast<int>(a.extents.size()), a.extents[0]);
  r.data = std::move(a.data);
  for (double v : r.data)
    if (!std::isfinite(v)) throw FormatError(path + ": raster holds non-finite values");
  return r;
}

void write_coefficients(const std::string& path, const CoefficientSet& c) {
  F64RArray a;
  if (c.dense) {
    a.extents = {1, c.values.size()};
    a.data = c.values;
  } else {
    a.extents = {2, c.values.size()};
    a.data.reserve(2 * c.values.size());
    for (auto p : c.positions) a.data.push_back(static_cast<double>(p));
    a.data.insert(a.data.end(), c.values.begin(), c.values.end());
  }
  write_f64r(path, a);
  std::ostringstream side;
  side << "# coefficient sidecar\nstorage=" << (c.dense ? "dense" : "sparse") << "\ntotal=" << c.total
       << "\nsaturated=" << (c.saturated ? 1 : 0) << '\n'
       << c.spec.to_config();
  write_file(path + ".system", side.str());
}

CoefficientSet read_coefficients(const std::string& path) {
  const std::string side = read_file(path + ".system");
  std::istringstream in(side);
  std::string line, config, storage;
  CoefficientSet c;
  while (std::getline(in, line)) {
    if (line.rfind("storage=", 0) == 0) storage = line.substr(8);
    else if (line.rfind("total=", 0) == 0) c.total = std::stoull(line.substr(6));
    else if (line.rfind("saturated=", 0) == 0) c.saturated = line.substr(10) == "1";
    else config += line + '\n';
  }
  if (storage != "dense" && storage != "sparse") throw FormatError(path + ".system: missing storage form");
  c.spec = SystemSpec::from_config(config);
  F64RArray a = read_f64r(path);
  if (a.extents.size() != 2) throw FormatError(path + ": coefficient array must be 2D");
  c.dense = storage == "dense";
  if (c.dense) {
    if (a.extents[0] != 1 || a.extents[1] != c.total) throw FormatError(path + ": dense size does not match total");
    c.values = std::move(a.data);
  } else {
    if (a.extents[0] != 2) throw FormatError(path + ": sparse array must have 2 rows");
    const std::size_t K = a.extents[1];
    for (std::size_t i = 0; i < K; ++i) {
      const double p = a.data[i];
      if (!(p >= 0.0) || p != std::floor(p) || p >= static_cast<double>(c.total))
        throw FormatError(path + ": invalid coefficient position");
      c.positions.push_back(static_cast<std::uint64_t>(p));
    }
    c.values.assign(a.data.begin() + static_cast<std::ptrdiff_t>(K), a.data.end());
  }
  return c;
}

void write_pgm(const std::string& path, const Raster& r) {
  const std::size_t n0 = r.extents[0], n1 = r.extents[1];
  const std::size_t slice = r.dim == 3 ? r.extents[2] / 2 : 0;
  auto at = [&](std::size_t i, std::size_t j) {
    return r.dim == 3 ? r.data[(i * n1 + j) * r.extents[2] + slice] : r.data[i * n1 + j];
  };
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) lo = std::min(lo, at(i, j)), hi = std::max(hi, at(i, j));
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  std::string out = "P5\n" + std::to_string(n1) + ' ' + std::to_string(n0) + "\n255\n";
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround((at(i, j) - lo) * scale))));
  write_file(path, out);
}

}  // namespace shearlab
