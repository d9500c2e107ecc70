#pragma once

#include <string>

#include "wavelab/transforms.hpp"

namespace wavelab {

/// Binary transform-pair container.
///
/// Layout (little-endian):
///   bytes 0..7   magic "WLNOFSP1"
///   u32 M, u32 Q, u32 N, u64 seed, u64 config_digest
///   forward transform, then inverse transform, each as:
///     u32 rows, u32 cols, u8 activation tag,
///     f64 weights (row-major, rows*cols),
///     f64 bias (rows),
///     u8 mask (row-major, rows*cols, 1 = connection active)
void save_pair(const std::string& path, const TransformPair& pair);

TransformPair load_pair(const std::string& path);

}  // namespace wavelab
