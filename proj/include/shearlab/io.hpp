// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 shearlab contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shearlab/transform.hpp"

namespace shearlab {

/// F64R container: "F64R", u16 version (1), u16 ndim, ndim x u64 extents,
/// then prod(extents) binary64 values, all little-endian, row-major.
struct F64RArray {
  std::vector<std::uint64_t> extents;
  std::vector<double> data;
};

std::string encode_f64r(const F64RArray& a);
/// Throws FormatError on a bad magic, version, truncated or oversized payload.
F64RArray decode_f64r(const std::string& bytes);
void write_f64r(const std::string& path, const F64RArray& a);
F64RArray read_f64r(const std::string& path);

/// Raster <-> F64R. Reading checks for 2 or 3 equal power-of-two extents.
void write_raster(const std::string& path, const Raster& r);
Raster read_raster(const std::string& path);

/// Coefficients as F64R plus a sidecar "<path>.system" holding the system
/// config and the storage form. Dense sets are a 1 x total array; sparse sets
/// a 2 x K array of positions (exact as doubles below 2^53) over values.
void write_coefficients(const std::string& path, const CoefficientSet& c);
CoefficientSet read_coefficients(const std::string& path);

/// 8-bit PGM of a 2D raster (or the middle slice of a 3D one), linearly
/// mapped from [min, max] to [0, 255].
void write_pgm(const std::string& path, const Raster& r);

/// "%.17e" formatting used for every floating value written to disk.
std::string format_sci(double v);

/// Whole-file helpers; throw FormatError when the file cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace shearlab
