#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "faascamp/engine.hpp"
#include "faascamp/report.hpp"
#include "faascamp/trace.hpp"

namespace faascamp::experiment {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A node configuration under test. Specs parse from
// "LABEL:POLICY[:WARM_KEEPALIVE_MS[:RECLAIM_KEEPALIVE_MS]]" where LABEL ends
// in "<warm>-<reclaim>" pool sizes, e.g. "faascamp-24-8:lru" is a 32-container
// node with 8 reclaim slots, and "vanilla-24-0:lru:600000" disables the
// reclaim pool and keeps warm containers 10 minutes. Defaults: 5 min for both
// keepalives when a reclaim pool exists, 10 min warm otherwise.
struct SystemSpec {
  std::string label;
  std::string policy = "lru";
  sim::PoolConfig pool;
  std::string model_path;
  int belady_window = 30;
};

SystemSpec parse_system_spec(const std::string& text);

// One generated node-day (or node-window): the merged multi-tenant stream
// plus the assignment bookkeeping behind it.
struct ScenarioStream {
  std::vector<trace::InvocationEvent> events;
  std::vector<trace::TenantProfile> profiles;
  std::vector<int> workload_of_trace;
  std::int64_t window_start_ms = 0;
  std::int64_t window_len_ms = 0;
};

// Assigns workloads and tenants, slices a seed-chosen window of the day,
// shifts it to t = 0, guarantees every tenant at least one invocation in the
// window, and merges. Deterministic per seed.
ScenarioStream build_scenario_stream(const std::vector<trace::AzureTraceRow>& rows,
                                     trace::Scenario scenario, const trace::ScenarioParams& params,
                                     int num_workloads, int window_minutes, std::uint64_t seed);

// Single-tenant full-day merge of all rows; the shape used for training and
// policy gap studies.
std::vector<trace::InvocationEvent> build_flat_stream(const std::vector<trace::AzureTraceRow>& rows,
                                                      int num_workloads, std::uint64_t seed);

report::RunRecord run_system_on_stream(const ScenarioStream& stream, const SystemSpec& system,
                                       const std::vector<trace::Workload>& workloads,
                                       const std::string& scenario_name, std::uint64_t seed);

struct ExperimentSpec {
  trace::Scenario scenario = trace::Scenario::RegularOnly;
  trace::ScenarioParams params;
  std::vector<SystemSpec> systems;
  int repetitions = 1;
  std::uint64_t base_seed = 1;
  int window_minutes = 15;
};

struct ExperimentResult {
  std::vector<report::RunRecord> runs;
  std::vector<report::ComparisonRow> table;
};

// Repetition r uses seed base_seed + r to draw its scenario stream; every
// system replays the identical stream of that repetition.
ExperimentResult run_experiment(const std::vector<trace::AzureTraceRow>& rows,
                                const ExperimentSpec& spec);

const char* scenario_name(trace::Scenario s);
trace::Scenario parse_scenario(const std::string& name);

// Simulation job settings from a "key = value" file ('#' comments). Unknown
// keys are errors so typos fail loudly.
struct SimJobConfig {
  sim::PoolConfig pool;
  std::string policy = "lru";
  std::string model_path;
  int belady_window = 30;
  std::uint64_t seed = 1;
};

SimJobConfig load_sim_config(const std::filesystem::path& path);

}  // namespace faascamp::experiment
