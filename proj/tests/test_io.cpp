#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "talkfield/blob_io.h"
#include "talkfield/errors.h"
#include "talkfield/png_io.h"
#include "talkfield/rng.h"

using namespace talkfield;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  auto dir = fs::temp_directory_path() / "talkfield_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("png round trip preserves 8-bit images exactly") {
  RandomStream rng(3);
  auto img = rng.uniform_tensor({3, 20, 17});
  auto path = temp_file("roundtrip.png").string();
  write_png(path, img);
  auto back = read_png(path);
  REQUIRE(back.sizes() == img.sizes());
  CHECK(torch::equal(back, quantize_to_u8_levels(img)));

  // a second write of the same data is byte-stable
  auto path2 = temp_file("roundtrip2.png").string();
  write_png(path2, img);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
}

TEST_CASE("png writer rejects bad shapes") {
  CHECK_THROWS_AS(write_png(temp_file("bad.png").string(),
                            torch::zeros({2, 4, 4})),
                  ShapeError);
  CHECK_THROWS_AS(read_png(temp_file("missing_file.png").string()), IoError);
}

TEST_CASE("blob round trip is exact for float32 payloads") {
  RandomStream rng(11);
  auto data = rng.normal_tensor({5, 16, 20});
  auto path = temp_file("array.blob").string();
  write_blob(path, data);
  auto back = read_blob(path);
  REQUIRE(back.sizes() == data.sizes());
  CHECK(torch::equal(back, data));
}

TEST_CASE("random stream state round trips") {
  RandomStream a(42);
  for (int i = 0; i < 37; ++i) a.uniform();
  auto state = a.state();

  RandomStream b(0);
  b.set_state(state);
  for (int i = 0; i < 10; ++i) {
    CHECK(a.uniform() == doctest::Approx(b.uniform()).epsilon(0));
  }
}

TEST_CASE("uniform tensors depend only on the seed") {
  RandomStream a(9), b(9);
  CHECK(torch::equal(a.uniform_tensor({4, 5}), b.uniform_tensor({4, 5})));
}
