#pragma once

#include <string>

#include <torch/torch.h>

namespace talkfield {

// Raw float32 array files: a 4-byte little-endian header length, a JSON
// header {"shape": [...], "dtype": "f32", "order": "row-major"}, then the
// payload as little-endian float32 in row-major order.

void write_blob(const std::string& path, const torch::Tensor& array);
torch::Tensor read_blob(const std::string& path);

}  // namespace talkfield
