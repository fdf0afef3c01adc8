#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "faascamp/engine.hpp"
#include "faascamp/experiment.hpp"
#include "faascamp/learn.hpp"
#include "faascamp/model.hpp"
#include "faascamp/policies.hpp"
#include "faascamp/rng.hpp"
#include "faascamp/synth.hpp"
#include "faascamp/trace.hpp"

namespace {

using namespace faascamp;

std::vector<trace::InvocationEvent> day_stream(std::uint64_t seed) {
  trace::SynthParams sp;
  sp.num_traces = 40;
  sp.seed = seed;
  return experiment::build_flat_stream(trace::synth_traces(sp), 8, seed);
}

sim::PoolConfig small_node() {
  sim::PoolConfig pool;
  pool.max_containers = 4;
  pool.warm_keepalive_ms = 600'000;
  pool.on_saturation = sim::SaturationMode::Drop;
  return pool;
}

void BM_engine_replay(benchmark::State& state, const char* policy_name) {
  const std::vector<trace::Workload> workloads = trace::default_workloads();
  const std::vector<trace::InvocationEvent> events = day_stream(1);
  const sim::PoolConfig pool = small_node();
  policy::PolicyParams pp;
  for (auto _ : state) {
    const auto policy = policy::make_policy(policy_name, pp);
    sim::RunResult result = sim::run_simulation(events, workloads, pool, *policy);
    benchmark::DoNotOptimize(result.containers_created);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK_CAPTURE(BM_engine_replay, lru, "lru");
BENCHMARK_CAPTURE(BM_engine_replay, gdsf, "gdsf");
BENCHMARK_CAPTURE(BM_engine_replay, belady, "belady");

// Buffered node with a reclaim pool: exercises demotion, restore timers, and
// the queue alongside plain provisioning.
void BM_engine_replay_reclaim(benchmark::State& state) {
  const std::vector<trace::Workload> workloads = trace::default_workloads();
  const std::vector<trace::InvocationEvent> events = day_stream(2);
  sim::PoolConfig pool;
  pool.max_containers = 6;
  pool.reclaim_capacity = 2;
  pool.reclaim_enabled = true;
  pool.warm_keepalive_ms = 60'000;
  pool.reclaim_keepalive_ms = 120'000;
  pool.on_saturation = sim::SaturationMode::Buffer;
  policy::PolicyParams pp;
  for (auto _ : state) {
    const auto policy = policy::make_policy("lru", pp);
    sim::RunResult result = sim::run_simulation(events, workloads, pool, *policy);
    benchmark::DoNotOptimize(result.restores_completed);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_engine_replay_reclaim);

// Per-candidate scoring cost of the learned policy's net.
void BM_mlp_forward(benchmark::State& state) {
  const learn::MlpModel model = learn::make_model(learn::default_layer_dims(), 1);
  Rng rng(2);
  std::vector<double> row(static_cast<std::size_t>(model.input_dim()));
  for (double& v : row) v = rng.next_double() * 2.0 - 1.0;
  for (auto _ : state) {
    const double p = learn::forward(model, row);
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_mlp_forward);

// One optimizer-step worth of work: forward + backward over a full batch.
void BM_loss_and_gradients(benchmark::State& state) {
  const learn::MlpModel model = learn::make_model(learn::default_layer_dims(), 1);
  Rng rng(3);
  std::vector<learn::TrainingSample> batch(256);
  std::vector<double> weights(256, 1.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].features.resize(static_cast<std::size_t>(model.input_dim()));
    for (float& v : batch[i].features) v = static_cast<float>(rng.next_double() * 2.0 - 1.0);
    batch[i].label = static_cast<std::uint8_t>(i % 2);
  }
  learn::Gradients grads;
  for (auto _ : state) {
    const double loss = learn::loss_and_gradients(model, batch, weights, grads);
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_loss_and_gradients);

// Trace generation through expansion and the strictly-increasing merge.
void BM_synth_and_flatten(benchmark::State& state) {
  std::int64_t events_out = 0;
  for (auto _ : state) {
    const std::vector<trace::InvocationEvent> events = day_stream(4);
    events_out = static_cast<std::int64_t>(events.size());
    benchmark::DoNotOptimize(events_out);
  }
  state.SetItemsProcessed(state.iterations() * events_out);
}
BENCHMARK(BM_synth_and_flatten);

// The clairvoyant selector at the engine's decision point: reuse-distance
// scan of a window-30 future over a full candidate set.
void BM_belady_select(benchmark::State& state) {
  Rng rng(5);
  std::vector<policy::EvictionCandidate> candidates(8);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].container_id = static_cast<int>(i);
    candidates[i].workload_id = static_cast<int>(i);
    candidates[i].last_used_t_ms = static_cast<std::int64_t>(rng.uniform(1'000'000));
  }
  std::vector<policy::FutureRequest> future(4096);
  for (policy::FutureRequest& f : future) {
    f.workload_id = static_cast<int>(rng.uniform(8));
  }
  for (auto _ : state) {
    const int victim = policy::belady_select(
        candidates, policy::OracleContext{future, 0}, 30);
    benchmark::DoNotOptimize(victim);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_belady_select);

}  // namespace

BENCHMARK_MAIN();
