#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace faascamp::learn {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain fully-connected net: ReLU hidden layers, logistic output scalar.
// weights[l] is row-major (dims[l+1] x dims[l]).
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return layer_dims.empty() ? 0 : layer_dims.front(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

// 212-wide input, five hidden layers of 256, scalar output.
std::vector<int> default_layer_dims();

// He-uniform init, deterministic per seed.
MlpModel make_model(std::vector<int> layer_dims, std::uint64_t seed);

// Eviction probability in (0, 1).
double forward(const MlpModel& model, std::span<const double> features);

// Little-endian binary: magic "FCMLP1\n", layer count, dims, then per layer
// row-major float64 weights followed by biases. Load errors name the field
// that failed.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace faascamp::learn
