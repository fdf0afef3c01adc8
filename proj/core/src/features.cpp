#include "faascamp/features.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace faascamp::features {

StateTracker::StateTracker(int num_workloads) : num_workloads_(num_workloads) {
  if (num_workloads <= 0) throw FeatureError("num_workloads must be positive");
  ring_.fill(kSentinel);
  marks_.resize(static_cast<std::size_t>(num_workloads));
}

void StateTracker::observe_arrival(const trace::InvocationEvent& event) {
  if (event.seq != arrivals_seen_)
    throw FeatureError("arrival seq " + std::to_string(event.seq) + " out of order, expected " +
                       std::to_string(arrivals_seen_));
  if (event.workload_id < 0 || event.workload_id >= num_workloads_)
    throw FeatureError("workload id out of range: " + std::to_string(event.workload_id));

  ring_[static_cast<std::size_t>(arrivals_seen_ % kHistoryLen)] = event.workload_id;
  ++arrivals_seen_;
  for (ContainerStats& c : containers_) {
    if (!c.live) continue;
    ++c.alive_count;
    ++c.warm_count;
  }
}

void StateTracker::observe_service(int container_id, const trace::InvocationEvent& event) {
  if (container_id < 0 || container_id >= static_cast<int>(containers_.size()) ||
      !containers_[static_cast<std::size_t>(container_id)].live)
    throw FeatureError("service on unknown container " + std::to_string(container_id));
  ContainerStats& c = containers_[static_cast<std::size_t>(container_id)];
  if (c.workload_id != event.workload_id)
    throw FeatureError("container " + std::to_string(container_id) + " serves workload " +
                       std::to_string(c.workload_id) + ", not " +
                       std::to_string(event.workload_id));

  ++c.frequency;
  c.warm_count = 0;

  // Marks are fulfilled-service counts, not arrival seqs, so dropped
  // requests never stretch the intervals.
  ++fulfilled_;
  WorkloadMarks& m = marks_[static_cast<std::size_t>(event.workload_id)];
  m.second_last_service_mark = m.last_service_mark;
  m.last_service_mark = fulfilled_;
}

void StateTracker::on_container_created(int container_id, int workload_id) {
  if (container_id < 0) throw FeatureError("negative container id");
  if (workload_id < 0 || workload_id >= num_workloads_)
    throw FeatureError("workload id out of range: " + std::to_string(workload_id));
  if (container_id >= static_cast<int>(containers_.size()))
    containers_.resize(static_cast<std::size_t>(container_id) + 1);
  ContainerStats& c = containers_[static_cast<std::size_t>(container_id)];
  if (c.live) throw FeatureError("container id reused: " + std::to_string(container_id));
  c = ContainerStats{};
  c.workload_id = workload_id;
  c.live = true;
}

void StateTracker::on_container_destroyed(int container_id) {
  if (container_id < 0 || container_id >= static_cast<int>(containers_.size()) ||
      !containers_[static_cast<std::size_t>(container_id)].live)
    throw FeatureError("destroy of unknown container " + std::to_string(container_id));
  containers_[static_cast<std::size_t>(container_id)].live = false;
}

void StateTracker::on_container_restored(int container_id) {
  if (container_id < 0 || container_id >= static_cast<int>(containers_.size()) ||
      !containers_[static_cast<std::size_t>(container_id)].live)
    throw FeatureError("restore of unknown container " + std::to_string(container_id));
  ContainerStats& c = containers_[static_cast<std::size_t>(container_id)];
  c.frequency = 0;
  c.alive_count = 0;
  c.warm_count = 0;
}

const StateTracker::ContainerStats& StateTracker::stats_of(int container_id) const {
  if (container_id < 0 || container_id >= static_cast<int>(containers_.size()))
    throw FeatureError("unknown container " + std::to_string(container_id));
  const ContainerStats& c = containers_[static_cast<std::size_t>(container_id)];
  if (!c.live) throw FeatureError("container " + std::to_string(container_id) + " is not live");
  return c;
}

SystemStateVector StateTracker::system_snapshot(const trace::InvocationEvent& current) const {
  if (current.seq != arrivals_seen_ - 1)
    throw FeatureError("snapshot must follow observe_arrival of the current event");

  SystemStateVector sys;
  sys.current_workload_id = current.workload_id;

  const WorkloadMarks& m = marks_[static_cast<std::size_t>(current.workload_id)];
  sys.pii1 = m.last_service_mark < 0 ? kSentinel : fulfilled_ - m.last_service_mark;
  sys.pii2 = m.second_last_service_mark < 0
                 ? kSentinel
                 : m.last_service_mark - m.second_last_service_mark - 1;

  for (int k = 0; k < kHistoryLen; ++k) {
    const std::int64_t pos = arrivals_seen_ - kHistoryLen + k;
    sys.history[static_cast<std::size_t>(k)] =
        pos < 0 ? kSentinel : ring_[static_cast<std::size_t>(pos % kHistoryLen)];
  }
  return sys;
}

std::vector<ContainerStateVector> StateTracker::container_snapshots(
    std::span<const IdleCandidateInfo> candidates) const {
  if (candidates.empty()) throw FeatureError("snapshot needs at least one candidate");
  const int n = static_cast<int>(candidates.size());
  std::vector<ContainerStateVector> out(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const IdleCandidateInfo& cand = candidates[static_cast<std::size_t>(i)];
    const ContainerStats& stats = stats_of(cand.container_id);
    if (stats.workload_id != cand.workload_id)
      throw FeatureError("candidate workload mismatch for container " +
                         std::to_string(cand.container_id));
    ContainerStateVector& v = out[static_cast<std::size_t>(i)];
    v.workload_id = stats.workload_id;
    v.frequency = stats.frequency;
    v.alive_count = stats.alive_count;
    v.warm_count = stats.warm_count;

    const std::int64_t seen = std::min<std::int64_t>(arrivals_seen_, kHistoryLen);
    for (std::int64_t back = 1; back <= seen; ++back) {
      const std::int64_t pos = arrivals_seen_ - back;
      if (ring_[static_cast<std::size_t>(pos % kHistoryLen)] == stats.workload_id) {
        if (back <= 10) ++v.past10;
        if (back <= 50) ++v.past50;
        if (back <= 100) ++v.past100;
      }
      if (back >= 100) break;
    }
  }

  // Ranks live inside the candidate set: idle_rank 0 is the longest-idle
  // container, freq_rank 0 the most frequently used one.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = candidates[static_cast<std::size_t>(a)];
    const auto& cb = candidates[static_cast<std::size_t>(b)];
    if (ca.idle_since_ms != cb.idle_since_ms) return ca.idle_since_ms < cb.idle_since_ms;
    return ca.container_id < cb.container_id;
  });
  for (int r = 0; r < n; ++r) out[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])].idle_rank = r;

  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& va = out[static_cast<std::size_t>(a)];
    const auto& vb = out[static_cast<std::size_t>(b)];
    if (va.frequency != vb.frequency) return va.frequency > vb.frequency;
    return candidates[static_cast<std::size_t>(a)].container_id <
           candidates[static_cast<std::size_t>(b)].container_id;
  });
  for (int r = 0; r < n; ++r) out[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])].freq_rank = r;

  return out;
}

void encode(const SystemStateVector& sys, const ContainerStateVector& cont, int num_workloads,
            int candidate_count, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(kFeatureDim))
    throw FeatureError("feature row must have " + std::to_string(kFeatureDim) + " slots");
  if (num_workloads <= 0 || candidate_count <= 0)
    throw FeatureError("bad encode scaling arguments");

  const double w = static_cast<double>(num_workloads);
  const double n = static_cast<double>(candidate_count);
  const double h = static_cast<double>(kHistoryLen);

  auto scaled_or_sentinel = [](std::int64_t v, double div) {
    return v < 0 ? -1.0 : static_cast<double>(v) / div;
  };

  std::size_t i = 0;
  out[i++] = static_cast<double>(sys.current_workload_id) / w;
  out[i++] = scaled_or_sentinel(sys.pii1, h);
  out[i++] = scaled_or_sentinel(sys.pii2, h);
  for (int k = 0; k < kHistoryLen; ++k)
    out[i++] = scaled_or_sentinel(sys.history[static_cast<std::size_t>(k)], w);

  out[i++] = static_cast<double>(cont.workload_id) / w;
  out[i++] = static_cast<double>(cont.idle_rank) / n;
  out[i++] = static_cast<double>(cont.frequency) / h;
  out[i++] = static_cast<double>(cont.freq_rank) / n;
  out[i++] = static_cast<double>(cont.alive_count) / h;
  out[i++] = static_cast<double>(cont.warm_count) / h;
  out[i++] = static_cast<double>(cont.past10) / 10.0;
  out[i++] = static_cast<double>(cont.past50) / 50.0;
  out[i++] = static_cast<double>(cont.past100) / 100.0;
}

}  // namespace faascamp::features
