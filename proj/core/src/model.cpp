#include "faascamp/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "faascamp/rng.hpp"

namespace faascamp::learn {

namespace {

constexpr char kMagic[] = "FCMLP1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

void validate_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw ModelError("model needs at least input and output layers");
  for (const int d : dims) {
    if (d <= 0) throw ModelError("layer width must be positive");
  }
  if (dims.back() != 1) throw ModelError("output layer must be scalar");
}

}  // namespace

std::vector<int> default_layer_dims() { return {212, 256, 256, 256, 256, 256, 1}; }

MlpModel make_model(std::vector<int> layer_dims, std::uint64_t seed) {
  validate_dims(layer_dims);
  MlpModel m;
  m.layer_dims = std::move(layer_dims);
  Rng rng(Rng(seed).split("init").next_u64());
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    const int fan_in = m.layer_dims[l];
    const int fan_out = m.layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<double> w(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
    for (double& v : w) v = (rng.next_double() * 2.0 - 1.0) * bound;
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return m;
}

double forward(const MlpModel& model, std::span<const double> features) {
  if (static_cast<int>(features.size()) != model.input_dim())
    throw ModelError("feature width does not match model input");

  std::vector<double> act(features.begin(), features.end());
  std::vector<double> next;
  for (int l = 0; l < model.num_layers(); ++l) {
    const int in = model.layer_dims[static_cast<std::size_t>(l)];
    const int out = model.layer_dims[static_cast<std::size_t>(l) + 1];
    const std::vector<double>& w = model.weights[static_cast<std::size_t>(l)];
    const std::vector<double>& b = model.biases[static_cast<std::size_t>(l)];
    next.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double acc = b[static_cast<std::size_t>(o)];
      const double* row = w.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) acc += row[i] * act[static_cast<std::size_t>(i)];
      const bool last = l + 1 == model.num_layers();
      next[static_cast<std::size_t>(o)] = last ? acc : (acc > 0.0 ? acc : 0.0);
    }
    act.swap(next);
  }
  return 1.0 / (1.0 + std::exp(-act[0]));
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  validate_dims(model.layer_dims);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write " + path.string());

  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  const std::uint32_t n_dims = static_cast<std::uint32_t>(model.layer_dims.size());
  out.write(reinterpret_cast<const char*>(&n_dims), sizeof(n_dims));
  for (const int d : model.layer_dims) {
    const std::int32_t v = d;
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (int l = 0; l < model.num_layers(); ++l) {
    const auto& w = model.weights[static_cast<std::size_t>(l)];
    const auto& b = model.biases[static_cast<std::size_t>(l)];
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  if (!out) throw ModelError("write failed for " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open " + path.string());

  char magic[kMagicLen];
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw ModelError(path.string() + ": bad magic, not a model file");

  std::uint32_t n_dims = 0;
  in.read(reinterpret_cast<char*>(&n_dims), sizeof(n_dims));
  if (!in || n_dims < 2 || n_dims > 64)
    throw ModelError(path.string() + ": implausible layer count");

  MlpModel m;
  m.layer_dims.resize(n_dims);
  for (std::uint32_t i = 0; i < n_dims; ++i) {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in || v <= 0) throw ModelError(path.string() + ": bad layer width");
    m.layer_dims[i] = v;
  }
  if (m.layer_dims.back() != 1) throw ModelError(path.string() + ": output layer must be scalar");

  for (std::uint32_t l = 0; l + 1 < n_dims; ++l) {
    const std::size_t in_w = static_cast<std::size_t>(m.layer_dims[l]);
    const std::size_t out_w = static_cast<std::size_t>(m.layer_dims[l + 1]);
    std::vector<double> w(in_w * out_w);
    in.read(reinterpret_cast<char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
    if (!in) throw ModelError(path.string() + ": truncated weights for layer " + std::to_string(l));
    std::vector<double> b(out_w);
    in.read(reinterpret_cast<char*>(b.data()),
            static_cast<std::streamsize>(b.size() * sizeof(double)));
    if (!in) throw ModelError(path.string() + ": truncated biases for layer " + std::to_string(l));
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  in.peek();
  if (!in.eof()) throw ModelError(path.string() + ": trailing bytes after model data");
  return m;
}

}  // namespace faascamp::learn
