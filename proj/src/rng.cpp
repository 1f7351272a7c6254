#include "talkfield/rng.h"

#include <sstream>

namespace talkfield {

torch::Tensor RandomStream::uniform_tensor(std::vector<int64_t> shape,
                                           torch::Dtype dtype) {
  int64_t n = 1;
  for (auto d : shape) n *= d;
  auto out = torch::empty(shape, torch::kFloat64);
  auto* p = out.data_ptr<double>();
  for (int64_t i = 0; i < n; ++i) p[i] = uniform();
  return out.to(dtype);
}

torch::Tensor RandomStream::normal_tensor(std::vector<int64_t> shape,
                                          double stddev, torch::Dtype dtype) {
  int64_t n = 1;
  for (auto d : shape) n *= d;
  auto out = torch::empty(shape, torch::kFloat64);
  auto* p = out.data_ptr<double>();
  for (int64_t i = 0; i < n; ++i) p[i] = normal() * stddev;
  return out.to(dtype);
}

std::string RandomStream::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void RandomStream::set_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
  // distributions carry per-call caches (e.g. Box-Muller spare); reset them
  // so restored streams are independent of prior draws
  uniform_.reset();
  normal_.reset();
}

}  // namespace talkfield
