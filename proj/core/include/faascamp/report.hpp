#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "faascamp/engine.hpp"

namespace faascamp::report {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kDefaultColdWindowMs = 1'200'000;  // 20 minutes

// Aggregates of one run. warm_rate_pct counts both warm-pool and reclaim
// hits over all requests; dropped requests count against it like cold
// starts do. cold_per_window bins cold starts and drops by arrival time.
// mean_response_ms covers served requests only; queue stats are
// time-averaged over [0, sim_end_ms].
struct SimulationReport {
  std::int64_t total_requests = 0;
  std::int64_t warm_from_warm = 0;
  std::int64_t warm_from_reclaim = 0;
  std::int64_t cold_starts = 0;
  std::int64_t dropped = 0;
  double warm_rate_pct = 0.0;
  std::int64_t window_ms = kDefaultColdWindowMs;
  std::vector<std::int64_t> cold_per_window;
  double mean_response_ms = 0.0;
  double mean_wait_ms = 0.0;
  double mean_queue_depth = 0.0;
  int max_queue_depth = 0;
};

SimulationReport summarize(const sim::RunResult& result,
                           std::int64_t window_ms = kDefaultColdWindowMs);

// key,value CSV; `meta` entries land first as "# key: value" comment lines.
void write_report_csv(const std::filesystem::path& path, const SimulationReport& rep,
                      const std::vector<std::pair<std::string, std::string>>& meta = {});
std::string format_report_text(const SimulationReport& rep);

struct RunRecord {
  std::string system;
  std::string scenario;
  std::uint64_t seed = 0;
  SimulationReport report;
};

struct ComparisonRow {
  std::string system;
  std::string scenario;
  int runs = 0;
  double mean_warm_rate_pct = 0.0;
  int wins = 0;  // seeds where this system's warm rate is strictly highest
  double mean_response_ms = 0.0;
  double mean_queue_depth = 0.0;
};

// Rows grouped by scenario, then input system order. Every system must have
// been run on the identical seed set per scenario; anything else throws.
std::vector<ComparisonRow> compare(const std::vector<RunRecord>& runs);

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ComparisonRow>& rows);
std::string format_comparison_text(const std::vector<ComparisonRow>& rows);

}  // namespace faascamp::report
