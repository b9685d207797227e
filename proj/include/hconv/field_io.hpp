#pragma once

// SampledField persistence: `stem.json` holds the grid header and `stem.bin`
// the values as little-endian float64 in row-major order (t fastest).

#include <filesystem>

#include "hconv/convolve.hpp"

namespace hconv {

void write_field(const SampledField<double>& f, const std::filesystem::path& stem);

/// Throws IoError on missing files, malformed headers or a size mismatch.
SampledField<double> read_field(const std::filesystem::path& stem);

}  // namespace hconv
