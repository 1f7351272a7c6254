#include "talkfield/checkpoint.h"

#include "talkfield/errors.h"

namespace talkfield {

namespace {

// Strings ride along as uint8 tensors; torch archives only carry tensors
// and nested archives portably.
torch::Tensor string_tensor(const std::string& s) {
  auto t = torch::empty({static_cast<int64_t>(s.size())}, torch::kUInt8);
  std::memcpy(t.data_ptr<uint8_t>(), s.data(), s.size());
  return t;
}

}  // namespace

void archive_write_string(torch::serialize::OutputArchive& archive,
                          const std::string& key, const std::string& value) {
  archive.write(key, string_tensor(value));
}

std::string archive_read_string(torch::serialize::InputArchive& archive,
                                const std::string& key) {
  torch::Tensor t;
  if (!archive.try_read(key, t)) {
    throw IoError("checkpoint: missing key " + key);
  }
  t = t.contiguous();
  return std::string(reinterpret_cast<const char*>(t.data_ptr<uint8_t>()),
                     static_cast<size_t>(t.numel()));
}

void archive_write_i64(torch::serialize::OutputArchive& archive,
                       const std::string& key, int64_t value) {
  archive.write(key, torch::tensor(value, torch::kInt64));
}

int64_t archive_read_i64(torch::serialize::InputArchive& archive,
                         const std::string& key) {
  torch::Tensor t;
  if (!archive.try_read(key, t)) {
    throw IoError("checkpoint: missing key " + key);
  }
  return t.item<int64_t>();
}

}  // namespace talkfield
