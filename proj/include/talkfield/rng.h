#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace talkfield {

// Seeded random stream owned by the library. Every stochastic choice in
// training and data generation is drawn from one of these, never from the
// global torch generator, so a serialized state is enough to resume a run
// bit-exactly.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }
  // Uniform integer in [0, n).
  int64_t index(int64_t n) {
    return static_cast<int64_t>(engine_() % static_cast<uint64_t>(n));
  }

  // Tensor of iid U[0,1) values, given dtype.
  torch::Tensor uniform_tensor(std::vector<int64_t> shape,
                               torch::Dtype dtype = torch::kFloat32);
  torch::Tensor normal_tensor(std::vector<int64_t> shape, double stddev = 1.0,
                              torch::Dtype dtype = torch::kFloat32);

  std::string state() const;
  void set_state(const std::string& s);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace talkfield
