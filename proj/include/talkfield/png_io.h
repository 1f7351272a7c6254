#pragma once

#include <string>

#include <torch/torch.h>

namespace talkfield {

// Minimal PNG codec (8-bit RGB, non-interlaced) over zlib. Images move
// through the library as float tensors of shape (3, H, W) with values in
// [0, 1]; quantization to 8 bits happens only at the file boundary.

void write_png(const std::string& path, const torch::Tensor& image);
torch::Tensor read_png(const std::string& path);

// Round-trip helper: the exact float image a write-then-read would produce.
torch::Tensor quantize_to_u8_levels(const torch::Tensor& image);

}  // namespace talkfield
