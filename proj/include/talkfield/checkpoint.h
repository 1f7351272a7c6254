#pragma once

#include <string>

#include <torch/torch.h>

namespace talkfield {

// String/scalar metadata helpers over torch archives (used for config
// hashes, stage tags and serialized RNG streams inside checkpoints).
void archive_write_string(torch::serialize::OutputArchive& archive,
                          const std::string& key, const std::string& value);
std::string archive_read_string(torch::serialize::InputArchive& archive,
                                const std::string& key);
void archive_write_i64(torch::serialize::OutputArchive& archive,
                       const std::string& key, int64_t value);
int64_t archive_read_i64(torch::serialize::InputArchive& archive,
                         const std::string& key);

}  // namespace talkfield
