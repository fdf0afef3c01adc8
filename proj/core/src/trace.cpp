#include "faascamp/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "faascamp/rng.hpp"

namespace faascamp::trace {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_i64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !s.empty();
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& what) {
  throw TraceError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<Workload> default_workloads() {
  // Timing constants are representative of the usual function mix; fixed so
  // every run of the same stream costs the same.
  return {
      {0, 900, 120, 256, 180},    // float-op
      {1, 1100, 400, 256, 200},   // linpack
      {2, 1200, 650, 256, 200},   // matmul
      {3, 1000, 300, 256, 190},   // aes
      {4, 3900, 2600, 256, 320},  // model training
      {5, 2600, 900, 256, 260},   // model serving
      {6, 800, 150, 256, 170},    // html render
      {7, 1800, 1400, 256, 240},  // image processing
  };
}

void validate_workloads(const std::vector<Workload>& ws) {
  if (ws.empty()) throw TraceError("workload catalog is empty");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const Workload& w = ws[i];
    if (w.workload_id != static_cast<int>(i))
      throw TraceError("workload ids must be dense 0..n-1, got id " +
                       std::to_string(w.workload_id) + " at index " + std::to_string(i));
    if (w.cold_start_ms <= 0) throw TraceError("cold_start_ms must be positive");
    if (w.exec_ms < 0) throw TraceError("exec_ms must be non-negative");
    if (w.memory_mb <= 0) throw TraceError("memory_mb must be positive");
    if (w.checkpoint_extra_ms < 0) throw TraceError("checkpoint_extra_ms must be non-negative");
  }
}

std::vector<AzureTraceRow> load_azure_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open " + path.string());

  std::vector<AzureTraceRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_csv(line);
    std::size_t first_count;
    if (fields.size() == 1u + kMinutesPerDay) {
      first_count = 1;
    } else if (fields.size() == 4u + kMinutesPerDay) {
      first_count = 4;
    } else {
      fail_line(path, line_no,
                "expected 1441 or 1444 columns, got " + std::to_string(fields.size()));
    }

    // The full-layout header ("HashOwner,...,Trigger,1,...,1440") has integer
    // count columns, so it is recognized by name; the simplified layout's
    // header shows up as an unparseable first count on line 1.
    if (line_no == 1 && first_count == 4 && fields[0] == "HashOwner") continue;

    AzureTraceRow row;
    row.per_minute_counts.resize(kMinutesPerDay);
    bool ok = true;
    for (int m = 0; m < kMinutesPerDay; ++m) {
      std::int64_t v = 0;
      if (!parse_i64(fields[first_count + m], v)) {
        ok = false;
        break;
      }
      if (v < 0)
        fail_line(path, line_no, "negative count in minute " + std::to_string(m));
      row.per_minute_counts[m] = v;
    }
    if (!ok) {
      if (line_no == 1) continue;  // simplified-layout header
      fail_line(path, line_no, "non-numeric invocation count");
    }

    if (first_count == 1) {
      row.function_key = std::string(fields[0]);
    } else {
      row.function_key =
          std::string(fields[0]) + "|" + std::string(fields[1]) + "|" + std::string(fields[2]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_azure_csv(const std::filesystem::path& path, const std::vector<AzureTraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write " + path.string());
  for (const AzureTraceRow& row : rows) {
    out << row.function_key;
    for (const std::int64_t c : row.per_minute_counts) out << ',' << c;
    out << '\n';
  }
  if (!out) throw TraceError("write failed for " + path.string());
}

std::vector<AzureTraceRow> filter_outliers(std::vector<AzureTraceRow> rows) {
  std::erase_if(rows, [](const AzureTraceRow& r) {
    const std::int64_t t = r.total();
    return t < kMinDailyTotal || t > kMaxDailyTotal;
  });
  return rows;
}

std::vector<InvocationEvent> expand_trace(const AzureTraceRow& row, int trace_id, int tenant_id,
                                          int workload_id) {
  if (static_cast<int>(row.per_minute_counts.size()) != kMinutesPerDay)
    throw TraceError("trace row must cover " + std::to_string(kMinutesPerDay) + " minutes");
  std::vector<InvocationEvent> events;
  events.reserve(static_cast<std::size_t>(row.total()));
  for (int m = 0; m < kMinutesPerDay; ++m) {
    const std::int64_t c = row.per_minute_counts[m];
    for (std::int64_t k = 0; k < c; ++k) {
      InvocationEvent ev;
      ev.t_ms = m * kMsPerMinute + k * kMsPerMinute / c;
      ev.tenant_id = tenant_id;
      ev.workload_id = workload_id;
      ev.trace_id = trace_id;
      events.push_back(ev);
    }
  }
  return events;
}

std::vector<InvocationEvent> merge_streams(const std::vector<std::vector<InvocationEvent>>& streams) {
  std::vector<InvocationEvent> merged;
  std::size_t total = 0;
  for (const auto& s : streams) total += s.size();
  merged.reserve(total);
  for (const auto& s : streams) merged.insert(merged.end(), s.begin(), s.end());

  std::stable_sort(merged.begin(), merged.end(), [](const InvocationEvent& a, const InvocationEvent& b) {
    if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
    return a.trace_id < b.trace_id;
  });

  // Collisions shift forward 1 ms each; later events already past the shifted
  // time are left alone, so time stays strictly increasing end to end.
  for (std::size_t i = 1; i < merged.size(); ++i) {
    if (merged[i].t_ms <= merged[i - 1].t_ms) merged[i].t_ms = merged[i - 1].t_ms + 1;
  }
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i].seq = static_cast<std::int64_t>(i);
  return merged;
}

SpikeReport detect_spikes(const AzureTraceRow& row) {
  const std::int64_t total = row.total();
  if (total == 0) throw TraceError("cannot detect spikes in an all-zero trace");
  const double mean = static_cast<double>(total) / kMinutesPerDay;
  const double threshold = 2.0 * mean;

  SpikeReport rep;
  for (int m = 0; m < static_cast<int>(row.per_minute_counts.size()); ++m) {
    const std::int64_t c = row.per_minute_counts[m];
    if (c > 0 && static_cast<double>(c) >= threshold) rep.spike_minutes.push_back(m);
  }
  if (rep.spike_minutes.size() < 2) return rep;

  for (std::size_t i = 1; i < rep.spike_minutes.size(); ++i)
    rep.intervals_min.push_back(rep.spike_minutes[i] - rep.spike_minutes[i - 1]);

  double sum = 0.0;
  for (const int v : rep.intervals_min) sum += v;
  rep.mean_interval_min = sum / static_cast<double>(rep.intervals_min.size());

  std::vector<int> sorted = rep.intervals_min;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    rep.interval_cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return rep;
}

std::vector<std::pair<double, double>> mean_spike_interval_cdf(const std::vector<AzureTraceRow>& rows) {
  std::vector<double> means;
  for (const AzureTraceRow& row : rows) {
    if (row.total() == 0) continue;
    const SpikeReport rep = detect_spikes(row);
    if (!rep.intervals_min.empty()) means.push_back(rep.mean_interval_min);
  }
  std::sort(means.begin(), means.end());
  std::vector<std::pair<double, double>> cdf;
  const double n = static_cast<double>(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (i + 1 < means.size() && means[i + 1] == means[i]) continue;
    cdf.emplace_back(means[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

std::vector<TenantProfile> assign_tenants(const std::vector<AzureTraceRow>& rows, Scenario scenario,
                                          const ScenarioParams& params, std::uint64_t seed) {
  if (params.tenant_count <= 0) throw TraceError("tenant_count must be positive");

  std::vector<int> mobile_idx;
  std::vector<int> regular_idx;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    (rows[i].total() < kMobileTotalCutoff ? mobile_idx : regular_idx).push_back(i);
  }

  Rng rng(seed);
  Rng mobile_rng = rng.split("mobile");
  Rng regular_rng = rng.split("regular");
  mobile_rng.shuffle(mobile_idx);
  regular_rng.shuffle(regular_idx);

  const int T = params.tenant_count;
  std::vector<TenantProfile> profiles(T);
  for (int t = 0; t < T; ++t) profiles[t].tenant_id = t;

  int mobile_tenants = 0;
  switch (scenario) {
    case Scenario::RegularOnly:
      mobile_tenants = 0;
      break;
    case Scenario::MobileOnly:
      mobile_tenants = T;
      break;
    case Scenario::Mixed: {
      const int denom = params.mobile_ratio + params.regular_ratio;
      if (params.mobile_ratio < 0 || params.regular_ratio < 0 || denom <= 0)
        throw TraceError("invalid mixed-scenario ratio");
      mobile_tenants = T * params.mobile_ratio / denom;
      break;
    }
  }
  const int regular_tenants = T - mobile_tenants;

  if (mobile_tenants > static_cast<int>(mobile_idx.size()))
    throw TraceError("need " + std::to_string(mobile_tenants) + " mobile traces, have " +
                     std::to_string(mobile_idx.size()));
  for (int t = 0; t < mobile_tenants; ++t) {
    profiles[t].kind = TenantKind::Mobile;
    profiles[t].trace_ids.push_back(mobile_idx[t]);
  }

  if (regular_tenants > 0) {
    if (static_cast<int>(regular_idx.size()) < regular_tenants)
      throw TraceError("need at least " + std::to_string(regular_tenants) +
                       " regular traces, have " + std::to_string(regular_idx.size()));
    for (int j = 0; j < static_cast<int>(regular_idx.size()); ++j) {
      TenantProfile& p = profiles[mobile_tenants + j % regular_tenants];
      p.kind = TenantKind::Regular;
      p.trace_ids.push_back(regular_idx[j]);
    }
  }
  return profiles;
}

std::vector<int> assign_workloads(int num_traces, int num_workloads, std::uint64_t seed) {
  if (num_traces < 0 || num_workloads <= 0) throw TraceError("bad assign_workloads arguments");
  // Zipf-ish popularity: workload j drawn with weight 1/(j+1).
  std::vector<double> cum(num_workloads);
  double acc = 0.0;
  for (int j = 0; j < num_workloads; ++j) {
    acc += 1.0 / static_cast<double>(j + 1);
    cum[j] = acc;
  }
  Rng rng(Rng(seed).split("workloads").next_u64());
  std::vector<int> out(num_traces);
  for (int i = 0; i < num_traces; ++i) {
    const double u = rng.next_double() * acc;
    out[i] = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (out[i] >= num_workloads) out[i] = num_workloads - 1;
  }
  return out;
}

std::vector<InvocationEvent> inject_min_invocation(std::vector<InvocationEvent> events, int tenant_id,
                                                   int workload_id, int trace_id,
                                                   std::int64_t window_start_ms,
                                                   std::int64_t window_end_ms, std::uint64_t seed) {
  if (window_end_ms <= window_start_ms) throw TraceError("empty injection window");
  for (const InvocationEvent& ev : events) {
    if (ev.tenant_id == tenant_id && ev.t_ms >= window_start_ms && ev.t_ms < window_end_ms)
      return events;
  }

  Rng rng(Rng(seed).split("inject", static_cast<std::uint64_t>(tenant_id)).next_u64());
  std::int64_t t = rng.uniform_in(window_start_ms, window_end_ms - 1);
  auto occupied = [&events](std::int64_t when) {
    return std::any_of(events.begin(), events.end(),
                       [when](const InvocationEvent& e) { return e.t_ms == when; });
  };
  std::int64_t probes = 0;
  const std::int64_t span = window_end_ms - window_start_ms;
  while (occupied(t)) {
    ++t;
    if (t >= window_end_ms) t = window_start_ms;
    if (++probes >= span) throw TraceError("injection window is fully occupied");
  }

  InvocationEvent ev;
  ev.t_ms = t;
  ev.tenant_id = tenant_id;
  ev.workload_id = workload_id;
  ev.trace_id = trace_id;
  events.push_back(ev);

  std::stable_sort(events.begin(), events.end(), [](const InvocationEvent& a, const InvocationEvent& b) {
    if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
    return a.trace_id < b.trace_id;
  });
  for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = static_cast<std::int64_t>(i);
  return events;
}

void write_event_stream(const std::filesystem::path& path, const std::vector<InvocationEvent>& events) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write " + path.string());
  for (const InvocationEvent& ev : events) {
    out << ev.t_ms << ',' << ev.tenant_id << ',' << ev.workload_id << ',' << ev.trace_id << '\n';
  }
  if (!out) throw TraceError("write failed for " + path.string());
}

std::vector<InvocationEvent> read_event_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open " + path.string());
  std::vector<InvocationEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) fail_line(path, line_no, "expected 4 columns");
    std::int64_t vals[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_i64(fields[i], vals[i])) fail_line(path, line_no, "non-numeric field");
    }
    InvocationEvent ev;
    ev.t_ms = vals[0];
    ev.tenant_id = static_cast<int>(vals[1]);
    ev.workload_id = static_cast<int>(vals[2]);
    ev.trace_id = static_cast<int>(vals[3]);
    ev.seq = static_cast<std::int64_t>(events.size());
    if (!events.empty() && ev.t_ms <= events.back().t_ms)
      fail_line(path, line_no, "t_ms must be strictly increasing");
    events.push_back(ev);
  }
  return events;
}

void write_spike_cdf_csv(const std::filesystem::path& path, const SpikeReport& report) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write " + path.string());
  out << "interval_minutes,cumulative_fraction\n";
  char buf[64];
  for (const auto& [interval, frac] : report.interval_cdf) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f\n", interval, frac);
    out << buf;
  }
  if (!out) throw TraceError("write failed for " + path.string());
}

}  // namespace faascamp::trace
