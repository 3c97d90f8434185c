#pragma once

#include <string>
#include <vector>

#include "sfcsim/nn/matrix.hpp"

namespace sfcsim::nn {

/// Checkpoint layout, little-endian throughout:
///   u32 magic "SFNN", u32 version (1), u32 tensor count,
///   then per tensor u32 rows, u32 cols, rows*cols float32 values row-major.
/// Roundtrips are bit-exact.
void save_checkpoint(const std::string& path, const std::vector<const Matrix*>& tensors);
void save_checkpoint(const std::string& path, const std::vector<Matrix*>& tensors);

/// Loads every tensor in file order. Throws CheckpointError on bad magic,
/// version or a truncated file.
std::vector<Matrix> load_checkpoint(const std::string& path);

/// Loads into an existing parameter list, verifying count and shapes.
void load_checkpoint_into(const std::string& path, const std::vector<Matrix*>& tensors);

}  // namespace sfcsim::nn
