#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "faascamp/report.hpp"

using namespace faascamp;
using report::ComparisonRow;
using report::ReportError;
using report::RunRecord;
using report::SimulationReport;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

sim::RequestOutcome outcome(std::int64_t t_ms, sim::OutcomeKind kind, double wait = 0.0,
                            double init = 0.0, double exec = 0.0) {
  sim::RequestOutcome o;
  o.event.t_ms = t_ms;
  o.kind = kind;
  if (kind != sim::OutcomeKind::DroppedAsCold) {
    o.wait_ms = wait;
    o.init_ms = init;
    o.exec_ms = exec;
    o.response_ms = wait + init + exec;
  }
  return o;
}

// 8 requests over three one-minute windows: 4 warm hits up front, one cold at
// each end of the window-0/window-1 boundary, two drops in window 2.
sim::RunResult crafted_run() {
  sim::RunResult r;
  r.outcomes = {
      outcome(0, sim::OutcomeKind::WarmFromWarmPool, 0.0, 0.0, 100.0),
      outcome(1000, sim::OutcomeKind::WarmFromWarmPool, 0.0, 0.0, 100.0),
      outcome(2000, sim::OutcomeKind::WarmFromWarmPool, 0.0, 0.0, 100.0),
      outcome(3000, sim::OutcomeKind::WarmFromReclaim, 0.0, 430.0, 100.0),
      outcome(59'999, sim::OutcomeKind::ColdStart, 30.0, 1000.0, 70.0),
      outcome(60'000, sim::OutcomeKind::ColdStart, 30.0, 1000.0, 70.0),
      outcome(120'000, sim::OutcomeKind::DroppedAsCold),
      outcome(179'999, sim::OutcomeKind::DroppedAsCold),
  };
  r.queue_log = {{0, 0}, {1000, 2}, {3000, 1}, {5000, 0}};
  r.sim_end_ms = 10'000;
  return r;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

SimulationReport report_with(double warm_rate, double response, double queue = 0.0) {
  SimulationReport rep;
  rep.warm_rate_pct = warm_rate;
  rep.mean_response_ms = response;
  rep.mean_queue_depth = queue;
  return rep;
}

RunRecord record(const std::string& system, const std::string& scenario, std::uint64_t seed,
                 double warm_rate, double response = 0.0) {
  return {system, scenario, seed, report_with(warm_rate, response)};
}

}  // namespace

TEST_CASE("summarize_counts_outcomes_and_bins_cold_starts_by_arrival_window") {
  const SimulationReport rep = report::summarize(crafted_run(), 60'000);

  CHECK(rep.total_requests == 8);
  CHECK(rep.warm_from_warm == 3);
  CHECK(rep.warm_from_reclaim == 1);
  CHECK(rep.cold_starts == 2);
  CHECK(rep.dropped == 2);
  CHECK(rep.warm_rate_pct == 50.0);  // reclaim hits count as warm, drops count against

  // Drops bin alongside cold starts; 59999 lands in window 0, 60000 in 1.
  CHECK(rep.window_ms == 60'000);
  CHECK(rep.cold_per_window == std::vector<std::int64_t>{1, 1, 2});

  // Served requests only: (3*100 + 530 + 2*1100) / 6 and (2*30) / 6.
  CHECK(rep.mean_response_ms == doctest::Approx(505.0).epsilon(1e-12));
  CHECK(rep.mean_wait_ms == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("queue_depth_is_time_averaged_with_samples_held_to_the_next_change") {
  const SimulationReport rep = report::summarize(crafted_run(), 60'000);
  // Depth 2 over [1000,3000), 1 over [3000,5000), 0 elsewhere in [0,10000].
  CHECK(rep.mean_queue_depth == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(rep.max_queue_depth == 2);

  sim::RunResult tail;
  tail.outcomes = {outcome(0, sim::OutcomeKind::ColdStart, 0.0, 1000.0, 0.0)};
  tail.queue_log = {{0, 0}, {100, 5}};
  tail.sim_end_ms = 1000;
  // The last sample extends to sim_end: 5 * 900 / 1000.
  CHECK(report::summarize(tail).mean_queue_depth == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(report::summarize(tail).max_queue_depth == 5);
}

TEST_CASE("empty_run_summarizes_to_zeroes") {
  const SimulationReport rep = report::summarize(sim::RunResult{});
  CHECK(rep.total_requests == 0);
  CHECK(rep.warm_rate_pct == 0.0);
  CHECK(rep.cold_per_window.empty());
  CHECK(rep.mean_response_ms == 0.0);
  CHECK(rep.mean_queue_depth == 0.0);
  CHECK(rep.max_queue_depth == 0);
}

TEST_CASE("all_dropped_run_has_zero_warm_rate_and_no_response_mean") {
  sim::RunResult r;
  r.outcomes = {outcome(0, sim::OutcomeKind::DroppedAsCold),
                outcome(10, sim::OutcomeKind::DroppedAsCold)};
  r.sim_end_ms = 10;
  const SimulationReport rep = report::summarize(r);
  CHECK(rep.warm_rate_pct == 0.0);
  CHECK(rep.dropped == 2);
  CHECK(rep.mean_response_ms == 0.0);  // no served requests to average
  CHECK(rep.cold_per_window == std::vector<std::int64_t>{2});
}

TEST_CASE("summarize_rejects_nonpositive_window") {
  CHECK_THROWS_AS(report::summarize(crafted_run(), 0), ReportError);
  CHECK_THROWS_AS(report::summarize(crafted_run(), -5), ReportError);
}

TEST_CASE("report_csv_writes_meta_comments_then_metric_rows") {
  const SimulationReport rep = report::summarize(crafted_run(), 60'000);
  const std::filesystem::path path = temp_path("faascamp_report.csv");
  report::write_report_csv(path, rep, {{"policy", "lru"}, {"seed", "42"}});

  const std::vector<std::string> lines = read_lines(path);
  REQUIRE(lines.size() == 17);
  CHECK(lines[0] == "# policy: lru");
  CHECK(lines[1] == "# seed: 42");
  CHECK(lines[2] == "metric,value");
  CHECK(lines[3] == "total_requests,8");
  CHECK(lines[4] == "warm_from_warm_pool,3");
  CHECK(lines[5] == "warm_from_reclaim,1");
  CHECK(lines[6] == "cold_starts,2");
  CHECK(lines[7] == "dropped,2");
  CHECK(lines[8] == "warm_rate_pct,50.0000");
  CHECK(lines[9] == "mean_response_ms,505.0000");
  CHECK(lines[10] == "mean_wait_ms,10.0000");
  CHECK(lines[11] == "mean_queue_depth,0.600000");
  CHECK(lines[12] == "max_queue_depth,2");
  CHECK(lines[13] == "cold_window_ms,60000");
  CHECK(lines[14] == "cold_window_0,1");
  CHECK(lines[15] == "cold_window_1,1");
  CHECK(lines[16] == "cold_window_2,2");
  std::filesystem::remove(path);
}

TEST_CASE("report_text_lists_every_metric_and_the_window_histogram") {
  const std::string text = report::format_report_text(report::summarize(crafted_run(), 60'000));
  CHECK(text.find("total requests") != std::string::npos);
  CHECK(text.find("warm rate %") != std::string::npos);
  CHECK(text.find("50.00") != std::string::npos);
  CHECK(text.find("cold starts per window: 1 1 2") != std::string::npos);
}

TEST_CASE("compare_averages_per_system_and_counts_strict_wins") {
  // Seed 1 goes to A, seed 2 to B, seed 3 ties and counts for nobody.
  const std::vector<RunRecord> runs = {
      record("A", "s1", 1, 90.0, 100.0), record("A", "s1", 2, 80.0, 200.0),
      record("A", "s1", 3, 70.0, 300.0), record("B", "s1", 1, 85.0, 300.0),
      record("B", "s1", 2, 85.0, 100.0), record("B", "s1", 3, 70.0, 200.0),
  };
  const std::vector<ComparisonRow> rows = report::compare(runs);
  REQUIRE(rows.size() == 2);

  CHECK(rows[0].system == "A");
  CHECK(rows[0].runs == 3);
  CHECK(rows[0].mean_warm_rate_pct == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(rows[0].mean_response_ms == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(rows[0].wins == 1);

  CHECK(rows[1].system == "B");
  CHECK(rows[1].runs == 3);
  CHECK(rows[1].mean_warm_rate_pct == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(rows[1].wins == 1);
}

TEST_CASE("compare_orders_rows_by_scenario_then_first_appearance_of_system") {
  const std::vector<RunRecord> runs = {
      record("A", "s1", 1, 90.0), record("B", "s1", 1, 80.0),
      record("A", "s2", 1, 70.0), record("B", "s2", 1, 60.0),
  };
  const std::vector<ComparisonRow> rows = report::compare(runs);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].scenario == "s1");
  CHECK(rows[0].system == "A");
  CHECK(rows[1].scenario == "s1");
  CHECK(rows[1].system == "B");
  CHECK(rows[2].scenario == "s2");
  CHECK(rows[2].system == "A");
  CHECK(rows[3].scenario == "s2");
  CHECK(rows[3].system == "B");
  CHECK(rows[0].wins == 1);
  CHECK(rows[1].wins == 0);
}

TEST_CASE("compare_requires_identical_seed_sets_per_scenario") {
  CHECK_THROWS_WITH_AS(report::compare({}), "nothing to compare", ReportError);

  // B never ran s2.
  const std::vector<RunRecord> missing = {
      record("A", "s1", 1, 90.0), record("B", "s1", 1, 80.0), record("A", "s2", 1, 70.0),
  };
  CHECK_THROWS_AS(report::compare(missing), ReportError);

  const std::vector<RunRecord> skewed = {
      record("A", "s1", 1, 90.0), record("A", "s1", 2, 90.0),
      record("B", "s1", 1, 80.0), record("B", "s1", 3, 80.0),
  };
  CHECK_THROWS_AS(report::compare(skewed), ReportError);

  // Duplicate seeds are part of the multiset: {1,1} differs from {1}.
  const std::vector<RunRecord> doubled = {
      record("A", "s1", 1, 90.0), record("A", "s1", 1, 90.0), record("B", "s1", 1, 80.0),
  };
  CHECK_THROWS_AS(report::compare(doubled), ReportError);
}

TEST_CASE("comparison_csv_and_text_render_the_rows") {
  const std::vector<RunRecord> runs = {
      record("faascamp-16-8", "mobile", 1, 40.25, 812.5),
      record("vanilla-24-0", "mobile", 1, 13.5, 950.0),
  };
  const std::vector<ComparisonRow> rows = report::compare(runs);

  const std::filesystem::path path = temp_path("faascamp_comparison.csv");
  report::write_comparison_csv(path, rows);
  const std::vector<std::string> lines = read_lines(path);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "system,scenario,runs,mean_warm_rate_pct,wins,mean_response_ms,mean_queue_depth");
  CHECK(lines[1] == "faascamp-16-8,mobile,1,40.2500,1,812.5000,0.000000");
  CHECK(lines[2] == "vanilla-24-0,mobile,1,13.5000,0,950.0000,0.000000");
  std::filesystem::remove(path);

  const std::string text = report::format_comparison_text(rows);
  CHECK(text.find("system") != std::string::npos);
  CHECK(text.find("faascamp-16-8") != std::string::npos);
  CHECK(text.find("40.25") != std::string::npos);
}
