#pragma once

// File formats: k-space JSON header with a raw complex128 sibling, 16-bit PGM
// images with an optional float64 sidecar, and CSV tables. Every file is
// written to a temporary name and renamed into place.

#include "shgs/recon.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace shgs {

/// Throws Error(Io) on failure.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Writes <path> (JSON header) and <path minus extension>.raw.
void write_kspace(const std::filesystem::path& header, const KSpace& k);
KSpace read_kspace(const std::filesystem::path& header);

/// P5 with maxval 65535, scaled so the image maximum maps to 65535. Width is
/// nx, rows run over ny. With `sidecar`, also writes <path>.raw as float64 LE in the same order.
void write_pgm(const std::filesystem::path& path, const Image& img, bool sidecar = false);
/// Returns the 16-bit values as doubles.
Image read_pgm(const std::filesystem::path& path);
/// Reads a sidecar written by write_pgm.
Image read_raw_image(const std::filesystem::path& path, int nx, int ny);

/// Formats a double with 17 significant digits.
std::string csv_number(double v);

} // namespace shgs
