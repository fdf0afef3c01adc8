#pragma once

#include <cstdint>

#include "faascamp/trace.hpp"

namespace faascamp::trace {

// Synthetic function-day generator. Regular-class traces are periodic burst
// processes: mostly-quiet minutes with recurring burst windows, which gives
// eviction policies real temporal structure to exploit. Mobile-class traces
// are sparse single invocations scattered over the day, so consecutive
// invocations of one trace usually sit further apart than any keep-alive.
struct SynthParams {
  int num_traces = 40;
  double mobile_fraction = 0.0;  // leading fraction of traces in the mobile class
  std::uint64_t seed = 1;
  // Generation day. Different days draw burst geometry from shifted ranges,
  // so day 0 and day 1 corpora are distribution-shifted relative to each other.
  int day = 0;

  // Regular-class shape knobs.
  double quiet_rate_per_min = 0.02;
  int min_period_min = 24;
  int max_period_min = 150;
  int min_burst_len_min = 2;
  int max_burst_len_min = 7;
  double min_burst_rate = 1.5;
  double max_burst_rate = 9.0;

  // Mobile-class shape knobs.
  int mobile_min_total = 20;
  int mobile_max_total = 60;
  double mobile_retry_prob = 0.15;  // chance an invocation repeats 1..3 min later
};

std::vector<AzureTraceRow> synth_traces(const SynthParams& params);

}  // namespace faascamp::trace
