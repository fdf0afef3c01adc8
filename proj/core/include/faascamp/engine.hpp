#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "faascamp/features.hpp"
#include "faascamp/policies.hpp"
#include "faascamp/trace.hpp"

namespace faascamp::sim {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Starting and Checkpointing are instantaneous stages of provisioning (their
// latency is charged into the request's init time); Restoring is a real timed
// state occupying reclaim-pool capacity until its RestoreDone fires.
enum class ContainerState {
  Starting,
  Checkpointing,
  Busy,
  PausedWarm,
  Restoring,
  PausedReclaim,
  Destroyed,
};

const char* to_string(ContainerState s);

struct ContainerRecord {
  int container_id = 0;
  int workload_id = 0;
  int owner_tenant = policy::kSharedOwner;  // kSharedOwner while in the reclaim pool
  ContainerState state = ContainerState::Destroyed;
  std::int64_t created_seq = 0;
  std::int64_t last_used_seq = 0;
  std::int64_t last_used_t_ms = 0;
  std::int64_t idle_since_ms = 0;
  std::int64_t frequency = 0;
  std::int64_t busy_until_ms = 0;  // nonzero only while Busy
  std::uint64_t epoch = 0;         // bumped on every transition; stale timers check it
};

enum class SaturationMode { Drop, Buffer };

struct PoolConfig {
  int max_containers = 32;
  // Upper bound on Restoring + PausedReclaim. Zero (or reclaim_enabled =
  // false) reproduces a vanilla warm-pool-only node. The warm pool's idle
  // headroom is max_containers - reclaim_capacity.
  int reclaim_capacity = 0;
  bool reclaim_enabled = false;
  std::int64_t warm_keepalive_ms = 600'000;
  std::int64_t reclaim_keepalive_ms = 300'000;
  std::int64_t restore_cost_ms = 430;
  double eviction_decision_cost_ms = 0.0;  // added to the evicting request's wait
  SaturationMode on_saturation = SaturationMode::Buffer;
  // When false, a learned policy only drives reclaim-pool evictions and
  // warm-pool victims fall back to LRU.
  bool ml_warm_pool = true;
  bool audit = false;               // full pool-invariant sweep after every event
  bool record_transitions = false;  // keep a container FSM log in the result
};

enum class OutcomeKind { WarmFromWarmPool, WarmFromReclaim, ColdStart, DroppedAsCold };

const char* to_string(OutcomeKind k);
bool is_warm(OutcomeKind k);

struct RequestOutcome {
  trace::InvocationEvent event;
  OutcomeKind kind = OutcomeKind::ColdStart;
  double wait_ms = 0.0;  // buffering delay plus any eviction-decision cost
  double init_ms = 0.0;  // nonzero exactly for cold starts
  double exec_ms = 0.0;
  double response_ms = 0.0;  // wait + init + exec; dropped requests are all-zero
};

struct QueueSample {
  std::int64_t t_ms = 0;
  int depth = 0;
};

struct TransitionRecord {
  std::int64_t t_ms = 0;
  int container_id = 0;
  ContainerState from = ContainerState::Destroyed;
  ContainerState to = ContainerState::Destroyed;
};

struct RunResult {
  std::vector<RequestOutcome> outcomes;  // one per input event, seq order
  std::vector<QueueSample> queue_log;    // buffer depth at every change, t ascending
  std::vector<TransitionRecord> transitions;  // only when record_transitions
  std::int64_t sim_end_ms = 0;
  std::int64_t containers_created = 0;
  std::int64_t eviction_decisions = 0;  // provisioning evictions decided by the policy
  std::int64_t demotions = 0;           // warm -> restore handoffs
  std::int64_t restores_completed = 0;
  std::int64_t warm_expirations = 0;
  std::int64_t reclaim_expirations = 0;
};

// Capture hook for training-data generation: fires at each provisioning
// eviction with the feature snapshots, the decision context handed to the
// policy (lookahead included, so a capture can label with the clairvoyant
// choice even when another policy drives the rollout), and the choice made.
class DecisionObserver {
 public:
  virtual ~DecisionObserver() = default;
  virtual void on_eviction_decision(const features::SystemStateVector& sys,
                                    std::span<const features::ContainerStateVector> containers,
                                    std::span<const policy::EvictionCandidate> candidates,
                                    const policy::DecisionContext& ctx,
                                    int chosen_container_id) = 0;
};

void validate_config(const PoolConfig& cfg);

// Replays the stream through one node. events must be strictly increasing in
// t_ms with seq = 0, 1, 2, ...; the policy is consulted for every eviction
// (provisioning and warm-pool demotion). Deterministic: same inputs, same
// result, no hidden randomness.
RunResult run_simulation(std::span<const trace::InvocationEvent> events,
                         const std::vector<trace::Workload>& workloads, const PoolConfig& cfg,
                         policy::EvictionPolicy& policy, DecisionObserver* observer = nullptr);

}  // namespace faascamp::sim
