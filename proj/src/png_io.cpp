#include "talkfield/png_io.h"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <vector>

#include "talkfield/errors.h"

namespace talkfield {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back((v >> 24) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

uint32_t get_u32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void write_chunk(std::vector<uint8_t>& out, const char type[4],
                 const std::vector<uint8_t>& data) {
  put_u32(out, static_cast<uint32_t>(data.size()));
  size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uint32_t crc = crc32(0, out.data() + crc_start, out.size() - crc_start);
  put_u32(out, crc);
}

// Paeth predictor from the PNG spec.
int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void write_png(const std::string& path, const torch::Tensor& image) {
  if (image.dim() != 3 || image.size(0) != 3) {
    throw ShapeError("write_png: expected (3,H,W) tensor");
  }
  auto img = image.detach().to(torch::kFloat32).clamp(0, 1).contiguous();
  const int64_t h = img.size(1), w = img.size(2);
  auto bytes = (img * 255.0f + 0.5f).to(torch::kUInt8);
  auto acc = bytes.accessor<uint8_t, 3>();

  // filter type 0 on every scanline; zlib does the rest
  std::vector<uint8_t> raw(static_cast<size_t>(h) * (1 + 3 * w));
  size_t k = 0;
  for (int64_t y = 0; y < h; ++y) {
    raw[k++] = 0;
    for (int64_t x = 0; x < w; ++x) {
      raw[k++] = acc[0][y][x];
      raw[k++] = acc[1][y][x];
      raw[k++] = acc[2][y][x];
    }
  }

  uLongf comp_cap = compressBound(raw.size());
  std::vector<uint8_t> comp(comp_cap);
  if (compress2(comp.data(), &comp_cap, raw.data(), raw.size(), 6) != Z_OK) {
    throw IoError("write_png: deflate failed");
  }
  comp.resize(comp_cap);

  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::vector<uint8_t> ihdr;
  put_u32(ihdr, static_cast<uint32_t>(w));
  put_u32(ihdr, static_cast<uint32_t>(h));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: RGB
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // no interlace
  write_chunk(out, "IHDR", ihdr);
  write_chunk(out, "IDAT", comp);
  write_chunk(out, "IEND", {});

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_png: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write_png: short write to " + path);
}

torch::Tensor read_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_png: cannot open " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (buf.size() < 8 || std::memcmp(buf.data(), sig, 8) != 0) {
    throw IoError("read_png: bad signature in " + path);
  }

  uint32_t w = 0, h = 0;
  int bit_depth = 0, color_type = 0, interlace = 0;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  while (pos + 8 <= buf.size()) {
    uint32_t len = get_u32(&buf[pos]);
    std::string type(reinterpret_cast<const char*>(&buf[pos + 4]), 4);
    if (pos + 12 + len > buf.size()) throw IoError("read_png: truncated chunk");
    const uint8_t* data = &buf[pos + 8];
    if (type == "IHDR") {
      w = get_u32(data);
      h = get_u32(data + 4);
      bit_depth = data[8];
      color_type = data[9];
      interlace = data[12];
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }
  if (w == 0 || h == 0) throw IoError("read_png: missing IHDR");
  if (bit_depth != 8 || interlace != 0) {
    throw IoError("read_png: only 8-bit non-interlaced PNGs are supported");
  }
  int channels;
  switch (color_type) {
    case 0: channels = 1; break;
    case 2: channels = 3; break;
    case 6: channels = 4; break;
    default: throw IoError("read_png: unsupported color type");
  }

  const size_t stride = static_cast<size_t>(w) * channels;
  std::vector<uint8_t> raw(h * (stride + 1));
  uLongf raw_len = raw.size();
  if (uncompress(raw.data(), &raw_len, idat.data(), idat.size()) != Z_OK ||
      raw_len != raw.size()) {
    throw IoError("read_png: inflate failed for " + path);
  }

  std::vector<uint8_t> pix(h * stride);
  const int bpp = channels;
  for (uint32_t y = 0; y < h; ++y) {
    uint8_t filter = raw[y * (stride + 1)];
    const uint8_t* src = &raw[y * (stride + 1) + 1];
    uint8_t* dst = &pix[y * stride];
    const uint8_t* prev = y > 0 ? &pix[(y - 1) * stride] : nullptr;
    for (size_t x = 0; x < stride; ++x) {
      int a = x >= size_t(bpp) ? dst[x - bpp] : 0;
      int b = prev ? prev[x] : 0;
      int c = (prev && x >= size_t(bpp)) ? prev[x - bpp] : 0;
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw IoError("read_png: bad filter byte");
      }
      dst[x] = static_cast<uint8_t>(v & 0xff);
    }
  }

  auto out = torch::empty({3, h, w}, torch::kFloat32);
  auto acc = out.accessor<float, 3>();
  for (uint32_t y = 0; y < h; ++y) {
    for (uint32_t x = 0; x < w; ++x) {
      const uint8_t* p = &pix[y * stride + x * channels];
      float r, g, b;
      if (channels == 1) {
        r = g = b = p[0] / 255.0f;
      } else {
        r = p[0] / 255.0f;
        g = p[1] / 255.0f;
        b = p[2] / 255.0f;
      }
      acc[0][y][x] = r;
      acc[1][y][x] = g;
      acc[2][y][x] = b;
    }
  }
  return out;
}

torch::Tensor quantize_to_u8_levels(const torch::Tensor& image) {
  auto img = image.detach().to(torch::kFloat32).clamp(0, 1);
  return ((img * 255.0f + 0.5f).floor().clamp(0, 255)) / 255.0f;
}

}  // namespace talkfield
