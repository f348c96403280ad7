#pragma once

#include <filesystem>

#include "repsim/matrix.hpp"

namespace repsim {

enum class MatrixFormat { csv, rsm_binary };

/// rsm-binary layout: magic "RSM1", u64 little-endian n, u64 little-endian p,
/// then n*p float64 little-endian values in row-major order.

/// Load an activation matrix (centered = false). Throws parse_error naming
/// the offending byte/line for malformed files, validation_error for
/// non-finite entries, io_error for unreadable paths.
ActivationMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);

/// Sniff the format: "RSM1" magic means rsm-binary, anything else is CSV.
MatrixFormat detect_format(const std::filesystem::path& path);

void save_rsm(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// CSV with 17-significant-digit values (float64 round trip), no header.
void save_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Format a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace repsim
