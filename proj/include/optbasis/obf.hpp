#pragma once

#include <filesystem>

#include "optbasis/config.hpp"
#include "optbasis/rsvd.hpp"

namespace optbasis {

/// Binary basis file, little-endian:
///   "OBAS" | u32 version = 1 | u64 N | u64 r | u8 problem tag |
///   lambda (r f64) | U column-major (N r f64) | V column-major (N r f64)
inline constexpr std::uint32_t kObfVersion = 1;

void write_obf(const std::filesystem::path &path, const SVDBasis &basis);

/// Only the tag survives in metadata; the rest lives in the sidecar.
/// Throws IoError on a short read, bad magic or unknown version.
SVDBasis read_obf(const std::filesystem::path &path);

/// `<stem>.meta.json` next to the basis file.
std::filesystem::path sidecar_path(const std::filesystem::path &basis_path);

/// Writes the full config plus basis metadata to the sidecar.
void write_sidecar(const std::filesystem::path &basis_path,
                   const ExperimentConfig &cfg, const SVDBasis &basis);

} // namespace optbasis
