#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "faascamp/engine.hpp"
#include "faascamp/model.hpp"
#include "faascamp/trace.hpp"

namespace faascamp::learn {

// One candidate row from one eviction decision. Rows of a decision share a
// group_id; exactly one of them (the clairvoyant policy's choice) is labeled 1.
struct TrainingSample {
  std::vector<float> features;  // kFeatureDim encoded values
  std::uint8_t label = 0;
  std::int32_t group_id = -1;  // -1 when unknown (samples loaded from CSV)
};

struct DataGenConfig {
  std::vector<trace::Workload> workloads;
  sim::PoolConfig pool;
  int oracle_window = 30;
  // Per-stream cap on captured decisions; 0 keeps all of them.
  int max_decisions_per_stream = 0;
  // Keep every k-th decision so a capped capture still spans the whole
  // stream rather than just its opening minutes.
  int capture_stride = 1;
  // Policies driving the rollouts, cycled over the streams. Labels always
  // come from the clairvoyant pick, so adding weaker rollout policies teaches
  // recovery from the states those policies actually reach.
  std::vector<std::string> rollout_policies = {"belady"};
};

// Replays each stream and captures sampled eviction decisions, one group of
// candidate rows per decision, labeled with the clairvoyant choice.
std::vector<TrainingSample> generate_training_data(
    std::span<const std::vector<trace::InvocationEvent>> streams, const DataGenConfig& cfg);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 256;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  // Fraction of decision groups held out to score each epoch; the returned
  // model is the best epoch's, which is what keeps the net from memorizing
  // its trajectories. Zero trains on everything and returns the last epoch.
  double validation_fraction = 0.0;
  // With validation, stop after this many epochs without improvement; zero
  // waits out every epoch.
  int patience = 0;
};

struct TrainStats {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;
  // Per-epoch validation score, lower is better: 1 - decision accuracy for
  // grouped data, mean weighted BCE otherwise.
  std::vector<double> val_score;
  int best_epoch = -1;  // -1 without validation
};

// Weighted binary cross-entropy under Adam. Within a decision group the lone
// positive row carries weight group_size - 1 so both classes pull equally;
// ungrouped corpora fall back to a global negatives/positives weight.
// init, when given, warm-starts from an existing model instead of a fresh
// seeded one.
MlpModel train(std::span<const TrainingSample> samples, const TrainConfig& cfg,
               std::vector<int> layer_dims = default_layer_dims(), TrainStats* stats = nullptr,
               const MlpModel* init = nullptr);

enum class RetrainStrategy {
  Scratch,  // new model, new samples only
  Mix,      // warm start from base, old subsample blended with new samples
};

struct RetrainConfig {
  TrainConfig train;
  double mix_old_fraction = 0.5;  // share of the old corpus blended in under Mix
};

MlpModel retrain(const MlpModel& base, std::span<const TrainingSample> old_samples,
                 std::span<const TrainingSample> new_samples, RetrainStrategy strategy,
                 const RetrainConfig& cfg, TrainStats* stats = nullptr);

// Mean weighted BCE of the model on a sample set.
double evaluate_loss(const MlpModel& model, std::span<const TrainingSample> samples);

// Fraction of decision groups where the model's top-scored row is the
// labeled one. Requires group ids.
double group_accuracy(const MlpModel& model, std::span<const TrainingSample> samples);

// Header + one row per sample: 203 system values, 9 container values, label.
// Group ids do not survive the round trip.
void save_samples_csv(const std::filesystem::path& path, std::span<const TrainingSample> samples);
std::vector<TrainingSample> load_samples_csv(const std::filesystem::path& path);

// Gradient surface exposed for verification against finite differences.
struct Gradients {
  std::vector<std::vector<double>> dweights;
  std::vector<std::vector<double>> dbiases;
};

// Mean weighted BCE over the batch plus its exact gradients.
double loss_and_gradients(const MlpModel& model, std::span<const TrainingSample> batch,
                          std::span<const double> sample_weights, Gradients& out);
double batch_loss(const MlpModel& model, std::span<const TrainingSample> batch,
                  std::span<const double> sample_weights);

}  // namespace faascamp::learn
