#pragma once

#include <cstdint>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace faascamp::trace {

inline constexpr int kMinutesPerDay = 1440;
inline constexpr std::int64_t kMsPerMinute = 60'000;

// Daily invocation totals outside this band are treated as outliers:
// below it a function is noise, above it the per-minute expansion loses meaning.
inline constexpr std::int64_t kMinDailyTotal = 10;
inline constexpr std::int64_t kMaxDailyTotal = 10'000;

// Functions with fewer than this many daily invocations behave like
// user-facing mobile backends: long silences, short bursts.
inline constexpr std::int64_t kMobileTotalCutoff = 100;

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One function-day: opaque key plus per-minute invocation counts.
struct AzureTraceRow {
  std::string function_key;
  std::vector<std::int64_t> per_minute_counts;  // exactly kMinutesPerDay entries

  std::int64_t total() const {
    return std::accumulate(per_minute_counts.begin(), per_minute_counts.end(), std::int64_t{0});
  }
};

struct Workload {
  int workload_id = 0;
  std::int64_t cold_start_ms = 0;
  std::int64_t exec_ms = 0;  // zero allowed: lets tests model pure cache behavior
  int memory_mb = 0;
  std::int64_t checkpoint_extra_ms = 0;  // one-time cost of the first cold start per workload
};

// Eight functions covering the usual serverless mix (numeric kernels, crypto,
// ML train/serve, web render, image work). Timings are fixed constants so runs
// are comparable across machines.
std::vector<Workload> default_workloads();

void validate_workloads(const std::vector<Workload>& ws);

struct InvocationEvent {
  std::int64_t t_ms = 0;
  int tenant_id = 0;
  int workload_id = 0;
  int trace_id = 0;
  std::int64_t seq = 0;  // position in the merged stream, assigned by merge_streams
};

enum class TenantKind { Regular, Mobile };

struct TenantProfile {
  int tenant_id = 0;
  TenantKind kind = TenantKind::Regular;
  std::vector<int> trace_ids;
};

enum class Scenario { RegularOnly, MobileOnly, Mixed };

struct ScenarioParams {
  int tenant_count = 0;
  // Mixed-scenario split, mobile:regular. 5:2 means 5 mobile tenants for
  // every 2 regular ones.
  int mobile_ratio = 1;
  int regular_ratio = 1;
};

struct SpikeReport {
  std::vector<int> spike_minutes;
  std::vector<int> intervals_min;          // gaps between consecutive spikes
  double mean_interval_min = 0.0;          // 0 when fewer than two spikes
  // (interval_minutes, fraction of intervals <= interval_minutes), ascending.
  std::vector<std::pair<int, double>> interval_cdf;
};

// Accepts two layouts: "key,c0..c1439" (1441 columns) and the original Azure
// function-trace layout "HashOwner,HashApp,HashFunction,Trigger,1..1440"
// (1444 columns, key = owner|app|function). A header row is skipped when the
// final column is not an integer. Errors carry 1-based line numbers.
std::vector<AzureTraceRow> load_azure_csv(const std::filesystem::path& path);

// Writes the simplified 1441-column layout, no header.
void save_azure_csv(const std::filesystem::path& path, const std::vector<AzureTraceRow>& rows);

// Keeps rows with kMinDailyTotal <= total <= kMaxDailyTotal.
std::vector<AzureTraceRow> filter_outliers(std::vector<AzureTraceRow> rows);

// Spreads each minute's count evenly across that minute:
// event k of c lands at m*60000 + floor(k*60000/c). seq stays 0 until merge.
std::vector<InvocationEvent> expand_trace(const AzureTraceRow& row, int trace_id, int tenant_id,
                                          int workload_id);

// Concatenates, orders by (t_ms, trace_id, input order), then bumps equal
// timestamps forward 1 ms each so the result is strictly increasing in t_ms.
// seq is the final stream position.
std::vector<InvocationEvent> merge_streams(const std::vector<std::vector<InvocationEvent>>& streams);

// A spike is a minute whose count reaches twice the trace's per-minute mean.
// All-zero traces are an error; fewer than two spikes yields empty intervals.
SpikeReport detect_spikes(const AzureTraceRow& row);

// Distribution of per-trace *mean* spike intervals over rows that have at
// least two spikes. Pairs are (mean_interval_minutes, cumulative fraction).
std::vector<std::pair<double, double>> mean_spike_interval_cdf(const std::vector<AzureTraceRow>& rows);

// Deterministic per seed. RegularOnly deals the >=100/day traces round-robin
// across tenants; MobileOnly gives each tenant exactly one distinct <100/day
// trace; Mixed splits tenants by mobile_ratio:regular_ratio and fills each
// side the same way. Throws TraceError when there are not enough traces of
// the required class.
std::vector<TenantProfile> assign_tenants(const std::vector<AzureTraceRow>& rows, Scenario scenario,
                                          const ScenarioParams& params, std::uint64_t seed);

// Popularity-skewed workload choice per trace (heavier weight on low ids),
// deterministic per seed.
std::vector<int> assign_workloads(int num_traces, int num_workloads, std::uint64_t seed);

// Guarantees the tenant appears in [window_start_ms, window_end_ms): when it
// has no event there, one is added at a seed-determined uniform time (bumped
// +1 ms past exact collisions) and the stream is re-merged.
std::vector<InvocationEvent> inject_min_invocation(std::vector<InvocationEvent> events, int tenant_id,
                                                   int workload_id, int trace_id,
                                                   std::int64_t window_start_ms,
                                                   std::int64_t window_end_ms, std::uint64_t seed);

// "t_ms,tenant_id,workload_id,trace_id" per line, strictly increasing t_ms.
void write_event_stream(const std::filesystem::path& path, const std::vector<InvocationEvent>& events);
std::vector<InvocationEvent> read_event_stream(const std::filesystem::path& path);

void write_spike_cdf_csv(const std::filesystem::path& path, const SpikeReport& report);

}  // namespace faascamp::trace
