#include "talkfield/blob_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "talkfield/errors.h"

namespace talkfield {

static_assert(std::endian::native == std::endian::little,
              "blob files assume a little-endian host");

void write_blob(const std::string& path, const torch::Tensor& array) {
  auto data = array.detach().to(torch::kFloat32).contiguous();
  nlohmann::json header;
  header["shape"] = std::vector<int64_t>(data.sizes().begin(), data.sizes().end());
  header["dtype"] = "f32";
  header["order"] = "row-major";
  const std::string hs = header.dump();

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_blob: cannot open " + path);
  uint32_t len = static_cast<uint32_t>(hs.size());
  f.write(reinterpret_cast<const char*>(&len), 4);
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  f.write(reinterpret_cast<const char*>(data.data_ptr<float>()),
          static_cast<std::streamsize>(data.numel() * sizeof(float)));
  if (!f) throw IoError("write_blob: short write to " + path);
}

torch::Tensor read_blob(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_blob: cannot open " + path);
  uint32_t len = 0;
  f.read(reinterpret_cast<char*>(&len), 4);
  std::string hs(len, '\0');
  f.read(hs.data(), len);
  if (!f) throw IoError("read_blob: truncated header in " + path);

  auto header = nlohmann::json::parse(hs);
  if (header.at("dtype") != "f32" || header.at("order") != "row-major") {
    throw IoError("read_blob: unsupported header in " + path);
  }
  std::vector<int64_t> shape = header.at("shape").get<std::vector<int64_t>>();
  int64_t n = 1;
  for (auto d : shape) n *= d;

  auto out = torch::empty(shape, torch::kFloat32);
  f.read(reinterpret_cast<char*>(out.data_ptr<float>()),
         static_cast<std::streamsize>(n * sizeof(float)));
  if (!f) throw IoError("read_blob: truncated payload in " + path);
  return out;
}

}  // namespace talkfield
