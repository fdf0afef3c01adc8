#include "faascamp/synth.hpp"

#include <algorithm>
#include <string>

#include "faascamp/rng.hpp"

namespace faascamp::trace {

namespace {

// Deterministic nudge into [lo, hi]: spreads surplus removals over the
// largest minutes and deficit additions over the busiest (or first) minutes.
void clamp_total(std::vector<std::int64_t>& counts, std::int64_t lo, std::int64_t hi) {
  std::int64_t total = 0;
  for (const std::int64_t c : counts) total += c;

  while (total < lo) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < counts.size(); ++m) {
      if (counts[m] > counts[best]) best = m;
    }
    ++counts[best];
    ++total;
  }
  while (total > hi) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < counts.size(); ++m) {
      if (counts[m] > counts[best]) best = m;
    }
    if (counts[best] == 0) break;
    --counts[best];
    --total;
  }
}

std::vector<std::int64_t> gen_regular(const SynthParams& p, Rng& rng) {
  // Later generation days stretch burst periods and heat up burst rates, so
  // corpora from different days are genuinely distribution-shifted.
  const int period_lo = std::min(p.min_period_min + 18 * p.day, 1200);
  const int period_hi = std::min(p.max_period_min + 30 * p.day, 1380);
  const double rate_scale = 1.0 + 0.25 * p.day;

  const int period = static_cast<int>(rng.uniform_in(period_lo, std::max(period_lo, period_hi)));
  const int burst_len =
      static_cast<int>(rng.uniform_in(p.min_burst_len_min, std::max(p.min_burst_len_min, p.max_burst_len_min)));
  const int phase = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(period)));
  const double burst_rate =
      rate_scale * (p.min_burst_rate + rng.next_double() * (p.max_burst_rate - p.min_burst_rate));

  std::vector<std::int64_t> counts(kMinutesPerDay, 0);
  for (int m = 0; m < kMinutesPerDay; ++m) {
    const bool in_burst = (m + period - phase) % period < burst_len;
    const double rate = in_burst ? burst_rate : p.quiet_rate_per_min;
    counts[m] = rng.poisson(rate);
  }
  return counts;
}

std::vector<std::int64_t> gen_mobile(const SynthParams& p, Rng& rng) {
  // Near-evenly spaced single invocations. Jitter stays under a quarter
  // stride, so even the shortest same-trace gap is half a stride; one
  // phone-style user alone almost never re-hits its own idle container.
  const double scale = 1.0 + 0.1 * p.day;
  const auto lo = static_cast<std::int64_t>(p.mobile_min_total);
  const auto hi = std::min<std::int64_t>(
      kMobileTotalCutoff - 1, static_cast<std::int64_t>(scale * p.mobile_max_total));
  const std::int64_t n = rng.uniform_in(lo, std::max(lo, hi));

  const double stride = static_cast<double>(kMinutesPerDay) / static_cast<double>(n);
  const double phase = rng.next_double() * stride;
  std::vector<std::int64_t> counts(kMinutesPerDay, 0);
  for (std::int64_t k = 0; k < n; ++k) {
    const double jitter = (rng.next_double() * 2.0 - 1.0) * 0.25 * stride;
    const auto m = static_cast<std::int64_t>(static_cast<double>(k) * stride + phase + jitter);
    const std::int64_t at = std::clamp<std::int64_t>(m, 0, kMinutesPerDay - 1);
    ++counts[at];
    // Occasional quick retry a couple of minutes later.
    if (rng.next_double() < p.mobile_retry_prob) {
      const std::int64_t again = at + rng.uniform_in(1, 3);
      if (again < kMinutesPerDay) ++counts[again];
    }
  }
  return counts;
}

}  // namespace

std::vector<AzureTraceRow> synth_traces(const SynthParams& params) {
  if (params.num_traces < 0) throw TraceError("num_traces must be non-negative");
  const int mobile_count =
      static_cast<int>(static_cast<double>(params.num_traces) * params.mobile_fraction);

  std::vector<AzureTraceRow> rows;
  rows.reserve(static_cast<std::size_t>(params.num_traces));
  const Rng base(params.seed);

  for (int i = 0; i < params.num_traces; ++i) {
    const bool mobile = i < mobile_count;
    Rng rng = base.split("trace", static_cast<std::uint64_t>(i))
                  .split("day", static_cast<std::uint64_t>(params.day));

    const std::int64_t lo = mobile ? kMinDailyTotal : kMobileTotalCutoff;
    const std::int64_t hi = mobile ? kMobileTotalCutoff - 1 : kMaxDailyTotal;

    std::vector<std::int64_t> counts;
    for (int attempt = 0; attempt < 30; ++attempt) {
      counts = mobile ? gen_mobile(params, rng) : gen_regular(params, rng);
      std::int64_t total = 0;
      for (const std::int64_t c : counts) total += c;
      if (total >= lo && total <= hi) break;
    }
    clamp_total(counts, lo, hi);

    AzureTraceRow row;
    row.function_key = "synth_d" + std::to_string(params.day) + "_" + std::to_string(i);
    row.per_minute_counts = std::move(counts);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace faascamp::trace
