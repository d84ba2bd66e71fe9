#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "speclog/solver.hpp"

namespace speclog {

/// Binary form-matrix cache, little-endian:
///   "SLFM" | version u32 | n f64 | s f64 | size u32 | symbol tag u8 | digest[32] | upper triangle (row-major f64)
inline constexpr std::uint32_t kMatrixCacheVersion = 1;

void write_matrix_cache(const std::filesystem::path& path, const FormMatrix& matrix);

/// Returns the cached matrix when the file is intact and its header matches the
/// digest of (basis, params, quad, symbol); nullopt on a missing, corrupted or stale file.
std::optional<FormMatrix> read_matrix_cache(const std::filesystem::path& path, const GalerkinBasis& basis,
                                            const SpectralParams& params, const QuadratureConfig& quad,
                                            const Symbol& symbol);

}  // namespace speclog
