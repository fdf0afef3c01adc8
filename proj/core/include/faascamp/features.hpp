#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "faascamp/trace.hpp"

namespace faascamp::features {

inline constexpr int kHistoryLen = 200;
inline constexpr int kSentinel = -1;
inline constexpr int kSystemVectorLen = 3 + kHistoryLen;
inline constexpr int kContainerVectorLen = 9;
inline constexpr int kFeatureDim = kSystemVectorLen + kContainerVectorLen;

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request-side view at a decision point. pii1 counts fulfilled requests since
// the current workload was last served, pii2 the fulfilled requests between
// its two previous services; kSentinel until enough history exists. history
// holds the workload ids of the last kHistoryLen arrivals, oldest first,
// kSentinel-padded at the front, current arrival included.
struct SystemStateVector {
  int current_workload_id = 0;
  std::int64_t pii1 = kSentinel;
  std::int64_t pii2 = kSentinel;
  std::array<int, kHistoryLen> history{};
};

// Candidate-side view. Ranks are computed within the candidate set only:
// idle_rank 0 is the longest-idle candidate, freq_rank 0 the most frequent.
// alive_count counts arrivals since the container was created, warm_count
// arrivals since it last served. past10/50/100 count arrivals of the
// container's workload among the last 10/50/100 arrivals.
struct ContainerStateVector {
  int workload_id = 0;
  int idle_rank = 0;
  std::int64_t frequency = 0;
  int freq_rank = 0;
  std::int64_t alive_count = 0;
  std::int64_t warm_count = 0;
  int past10 = 0;
  int past50 = 0;
  int past100 = 0;
};

struct IdleCandidateInfo {
  int container_id = 0;
  int workload_id = 0;
  std::int64_t idle_since_ms = 0;
};

// Incremental bookkeeping for the feature vectors. Arrivals must be observed
// once each, in seq order (0, 1, 2, ...); services follow in fulfillment
// order. Dropped requests therefore advance history and the per-container
// counters but never the PII markers.
class StateTracker {
 public:
  explicit StateTracker(int num_workloads);

  void observe_arrival(const trace::InvocationEvent& event);
  void observe_service(int container_id, const trace::InvocationEvent& event);

  void on_container_created(int container_id, int workload_id);
  void on_container_destroyed(int container_id);
  // Restore wipes the container's history: it re-enters as if fresh.
  void on_container_restored(int container_id);

  // Vectors for one decision point; call after observe_arrival(current) and
  // before observe_service. Container vectors parallel `candidates`.
  SystemStateVector system_snapshot(const trace::InvocationEvent& current) const;
  std::vector<ContainerStateVector> container_snapshots(
      std::span<const IdleCandidateInfo> candidates) const;

  int num_workloads() const { return num_workloads_; }
  std::int64_t arrivals_seen() const { return arrivals_seen_; }
  std::int64_t fulfilled() const { return fulfilled_; }

 private:
  struct WorkloadMarks {
    std::int64_t last_service_mark = -1;        // fulfilled count right after last service
    std::int64_t second_last_service_mark = -1;
  };
  struct ContainerStats {
    int workload_id = 0;
    std::int64_t frequency = 0;
    std::int64_t alive_count = 0;
    std::int64_t warm_count = 0;
    bool live = false;
  };

  const ContainerStats& stats_of(int container_id) const;

  int num_workloads_;
  std::int64_t arrivals_seen_ = 0;
  std::int64_t fulfilled_ = 0;
  std::array<int, kHistoryLen> ring_{};  // circular, index arrivals_seen_ % kHistoryLen
  std::vector<WorkloadMarks> marks_;
  std::vector<ContainerStats> containers_;  // indexed by container_id
};

// Scales one (system, container) pair into the model's input row:
// ids divided by num_workloads, PIIs and count features by kHistoryLen,
// ranks by the candidate count, pastN by N. Undefined PIIs and history
// padding stay at -1. out.size() must be kFeatureDim.
void encode(const SystemStateVector& sys, const ContainerStateVector& cont, int num_workloads,
            int candidate_count, std::span<double> out);

}  // namespace faascamp::features
