#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "faascamp/experiment.hpp"

using namespace faascamp;
using experiment::ExperimentError;
using experiment::SystemSpec;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

trace::AzureTraceRow row_with(const std::string& key, const std::vector<std::pair<int, int>>& counts) {
  trace::AzureTraceRow row;
  row.function_key = key;
  row.per_minute_counts.assign(trace::kMinutesPerDay, 0);
  for (const auto& [minute, count] : counts) row.per_minute_counts[static_cast<std::size_t>(minute)] = count;
  return row;
}

// Twenty invocations spread across the whole day keeps the trace in the
// mobile class (< 100/day) while giving most windows something to serve.
trace::AzureTraceRow mobile_row(const std::string& key, int offset_min) {
  std::vector<std::pair<int, int>> counts;
  for (int j = 0; j < 20; ++j) counts.emplace_back(offset_min + 70 * j, 1);
  return row_with(key, counts);
}

std::vector<trace::AzureTraceRow> mobile_corpus(int n) {
  std::vector<trace::AzureTraceRow> rows;
  for (int i = 0; i < n; ++i) rows.push_back(mobile_row("fn" + std::to_string(i), i));
  return rows;
}

bool streams_equal(const std::vector<trace::InvocationEvent>& a,
                   const std::vector<trace::InvocationEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t_ms != b[i].t_ms || a[i].tenant_id != b[i].tenant_id ||
        a[i].workload_id != b[i].workload_id || a[i].trace_id != b[i].trace_id ||
        a[i].seq != b[i].seq)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("system_spec_reads_pool_sizes_from_the_label_suffix") {
  const SystemSpec camp = experiment::parse_system_spec("faascamp-24-8:lru");
  CHECK(camp.label == "faascamp-24-8");
  CHECK(camp.policy == "lru");
  CHECK(camp.pool.max_containers == 32);
  CHECK(camp.pool.reclaim_capacity == 8);
  CHECK(camp.pool.reclaim_enabled);
  CHECK(camp.pool.warm_keepalive_ms == 300'000);  // 5 min defaults with a reclaim pool
  CHECK(camp.pool.reclaim_keepalive_ms == 300'000);
  CHECK(camp.model_path.empty());
  CHECK(camp.belady_window == 30);

  const SystemSpec vanilla = experiment::parse_system_spec("vanilla-24-0:lfu");
  CHECK(vanilla.pool.max_containers == 24);
  CHECK(vanilla.pool.reclaim_capacity == 0);
  CHECK_FALSE(vanilla.pool.reclaim_enabled);
  CHECK(vanilla.pool.warm_keepalive_ms == 600'000);  // 10 min without one
}

TEST_CASE("system_spec_accepts_explicit_keepalives") {
  const SystemSpec warm = experiment::parse_system_spec("vanilla-24-0:lru:600000");
  CHECK(warm.pool.warm_keepalive_ms == 600'000);

  const SystemSpec both = experiment::parse_system_spec("camp-16-8:gdsf:120000:90000");
  CHECK(both.policy == "gdsf");
  CHECK(both.pool.max_containers == 24);
  CHECK(both.pool.warm_keepalive_ms == 120'000);
  CHECK(both.pool.reclaim_keepalive_ms == 90'000);
}

TEST_CASE("system_spec_rejects_malformed_text") {
  CHECK_THROWS_AS(experiment::parse_system_spec("nolabel"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("a-2-1:fifo"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("noslots:lru"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("a-0-4:lru"), ExperimentError);  // no warm slots
  CHECK_THROWS_AS(experiment::parse_system_spec("a-2-x:lru"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("a-2-1:lru:0"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("a-2-0:lru:1000:1000"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("a-2-1:lru:1000:0"), ExperimentError);
  CHECK_THROWS_AS(experiment::parse_system_spec("a-2-1:lru:1:2:3"), ExperimentError);
}

TEST_CASE("scenario_names_round_trip") {
  CHECK(experiment::scenario_name(trace::Scenario::RegularOnly) == std::string("regular"));
  CHECK(experiment::scenario_name(trace::Scenario::MobileOnly) == std::string("mobile"));
  CHECK(experiment::scenario_name(trace::Scenario::Mixed) == std::string("mixed"));
  CHECK(experiment::parse_scenario("regular") == trace::Scenario::RegularOnly);
  CHECK(experiment::parse_scenario("mobile") == trace::Scenario::MobileOnly);
  CHECK(experiment::parse_scenario("mixed") == trace::Scenario::Mixed);
  CHECK_THROWS_AS(experiment::parse_scenario("weekend"), ExperimentError);
}

TEST_CASE("flat_stream_is_single_tenant_filtered_and_deterministic") {
  std::vector<trace::AzureTraceRow> rows = {
      row_with("a", {{0, 10}}),
      row_with("noise", {{0, 5}}),  // below the daily-total floor, filtered out
      row_with("b", {{0, 10}}),
      row_with("c", {{1, 12}}),
  };

  const std::vector<trace::InvocationEvent> events = experiment::build_flat_stream(rows, 8, 42);
  REQUIRE(events.size() == 32);  // 10 + 10 + 12 survive the filter
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].tenant_id == 0);
    CHECK(events[i].seq == static_cast<std::int64_t>(i));
    CHECK(events[i].trace_id >= 0);
    CHECK(events[i].trace_id < 3);
    CHECK(events[i].workload_id >= 0);
    CHECK(events[i].workload_id < 8);
    if (i > 0) CHECK(events[i].t_ms > events[i - 1].t_ms);
  }

  CHECK(streams_equal(events, experiment::build_flat_stream(rows, 8, 42)));
}

TEST_CASE("scenario_stream_slices_a_window_and_covers_every_tenant") {
  const std::vector<trace::AzureTraceRow> rows = mobile_corpus(6);
  trace::ScenarioParams params;
  params.tenant_count = 4;

  const experiment::ScenarioStream stream =
      experiment::build_scenario_stream(rows, trace::Scenario::MobileOnly, params, 8, 60, 9);

  CHECK(stream.window_len_ms == 3'600'000);
  CHECK(stream.window_start_ms % trace::kMsPerMinute == 0);
  CHECK(stream.window_start_ms >= 0);
  CHECK(stream.window_start_ms <= (trace::kMinutesPerDay - 60) * trace::kMsPerMinute);
  CHECK(stream.workload_of_trace.size() == rows.size());

  REQUIRE(stream.profiles.size() == 4);
  std::set<int> used_traces;
  for (const trace::TenantProfile& prof : stream.profiles) {
    CHECK(prof.kind == trace::TenantKind::Mobile);
    REQUIRE(prof.trace_ids.size() == 1);  // one sub-100/day trace per mobile tenant
    used_traces.insert(prof.trace_ids.front());
  }
  CHECK(used_traces.size() == 4);

  // The window is shifted to t = 0 and every tenant got at least one event.
  std::set<int> tenants_seen;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const trace::InvocationEvent& ev = stream.events[i];
    CHECK(ev.t_ms >= 0);
    CHECK(ev.t_ms < stream.window_len_ms);
    if (i > 0) CHECK(ev.t_ms > stream.events[i - 1].t_ms);
    tenants_seen.insert(ev.tenant_id);
  }
  CHECK(tenants_seen == std::set<int>{0, 1, 2, 3});

  const experiment::ScenarioStream again =
      experiment::build_scenario_stream(rows, trace::Scenario::MobileOnly, params, 8, 60, 9);
  CHECK(streams_equal(stream.events, again.events));
  CHECK(again.window_start_ms == stream.window_start_ms);
}

TEST_CASE("scenario_stream_rejects_out_of_range_windows") {
  const std::vector<trace::AzureTraceRow> rows = mobile_corpus(3);
  trace::ScenarioParams params;
  params.tenant_count = 2;
  CHECK_THROWS_AS(
      experiment::build_scenario_stream(rows, trace::Scenario::MobileOnly, params, 8, 0, 1),
      ExperimentError);
  CHECK_THROWS_AS(
      experiment::build_scenario_stream(rows, trace::Scenario::MobileOnly, params, 8, 2000, 1),
      ExperimentError);
}

TEST_CASE("run_experiment_replays_each_repetition_stream_on_every_system") {
  const std::vector<trace::AzureTraceRow> rows = mobile_corpus(6);

  experiment::ExperimentSpec spec;
  spec.scenario = trace::Scenario::MobileOnly;
  spec.params.tenant_count = 3;
  spec.systems = {experiment::parse_system_spec("camp-2-1:lru"),
                  experiment::parse_system_spec("vanilla-3-0:lru")};
  spec.repetitions = 2;
  spec.base_seed = 5;
  spec.window_minutes = 30;

  const experiment::ExperimentResult result = experiment::run_experiment(rows, spec);
  REQUIRE(result.runs.size() == 4);

  CHECK(result.runs[0].system == "camp-2-1");
  CHECK(result.runs[1].system == "vanilla-3-0");
  CHECK(result.runs[2].system == "camp-2-1");
  CHECK(result.runs[3].system == "vanilla-3-0");
  CHECK(result.runs[0].seed == 5);
  CHECK(result.runs[1].seed == 5);
  CHECK(result.runs[2].seed == 6);
  CHECK(result.runs[3].seed == 6);
  for (const report::RunRecord& r : result.runs) CHECK(r.scenario == "mobile");

  // Systems of one repetition see the identical stream.
  CHECK(result.runs[0].report.total_requests == result.runs[1].report.total_requests);
  CHECK(result.runs[2].report.total_requests == result.runs[3].report.total_requests);
  CHECK(result.runs[0].report.total_requests > 0);

  REQUIRE(result.table.size() == 2);
  CHECK(result.table[0].system == "camp-2-1");
  CHECK(result.table[0].runs == 2);
  CHECK(result.table[1].system == "vanilla-3-0");
  CHECK(result.table[1].runs == 2);
}

TEST_CASE("run_experiment_rejects_empty_plans") {
  const std::vector<trace::AzureTraceRow> rows = mobile_corpus(3);
  experiment::ExperimentSpec spec;
  spec.scenario = trace::Scenario::MobileOnly;
  spec.params.tenant_count = 2;

  CHECK_THROWS_WITH_AS(experiment::run_experiment(rows, spec), "no systems to run",
                       ExperimentError);

  spec.systems = {experiment::parse_system_spec("a-2-0:lru")};
  spec.repetitions = 0;
  CHECK_THROWS_AS(experiment::run_experiment(rows, spec), ExperimentError);
}

TEST_CASE("sim_config_file_parses_every_key_with_comments_and_spacing") {
  const std::filesystem::path path = temp_path("faascamp_job.conf");
  {
    std::ofstream out(path);
    out << "# node under test\n"
        << "max_containers = 24\n"
        << "reclaim_capacity=8\n"
        << "reclaim_enabled = true\n"
        << "\n"
        << "warm_keepalive_ms = 300000   # five minutes\n"
        << "reclaim_keepalive_ms = 240000\n"
        << "restore_cost_ms = 500\n"
        << "eviction_decision_cost_ms = 38\n"
        << "on_saturation = drop\n"
        << "ml_warm_pool = false\n"
        << "audit = 1\n"
        << "policy = gdsf\n"
        << "belady_window = 50\n"
        << "seed = 77\n"
        << "model = /tmp/m.bin\n";
  }

  const experiment::SimJobConfig cfg = experiment::load_sim_config(path);
  CHECK(cfg.pool.max_containers == 24);
  CHECK(cfg.pool.reclaim_capacity == 8);
  CHECK(cfg.pool.reclaim_enabled);
  CHECK(cfg.pool.warm_keepalive_ms == 300'000);
  CHECK(cfg.pool.reclaim_keepalive_ms == 240'000);
  CHECK(cfg.pool.restore_cost_ms == 500);
  CHECK(cfg.pool.eviction_decision_cost_ms == 38.0);
  CHECK(cfg.pool.on_saturation == sim::SaturationMode::Drop);
  CHECK_FALSE(cfg.pool.ml_warm_pool);
  CHECK(cfg.pool.audit);
  CHECK(cfg.policy == "gdsf");
  CHECK(cfg.belady_window == 50);
  CHECK(cfg.seed == 77);
  CHECK(cfg.model_path == "/tmp/m.bin");
  std::filesystem::remove(path);
}

TEST_CASE("sim_config_errors_name_the_line_and_key") {
  const std::filesystem::path path = temp_path("faascamp_bad_job.conf");

  auto write_and_expect_throw = [&](const std::string& content, const std::string& needle) {
    {
      std::ofstream out(path);
      out << content;
    }
    try {
      experiment::load_sim_config(path);
      FAIL_CHECK("expected ExperimentError for: " << content);
    } catch (const ExperimentError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  write_and_expect_throw("max_containers = 24\nwarm_pool_size = 9\n", ":2: unknown key");
  write_and_expect_throw("just some words\n", "expected key = value");
  write_and_expect_throw("reclaim_enabled = maybe\n", "expected true/false");
  write_and_expect_throw("policy = fifo\n", "unknown policy");
  write_and_expect_throw("on_saturation = queue\n", "drop or buffer");
  write_and_expect_throw("max_containers = many\n", "expected integer");
  write_and_expect_throw("seed =\n", "empty key or value");

  CHECK_THROWS_AS(experiment::load_sim_config(temp_path("faascamp_no_such.conf")),
                  ExperimentError);
  std::filesystem::remove(path);
}
