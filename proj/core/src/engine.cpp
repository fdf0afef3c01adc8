#include "faascamp/engine.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <string>
#include <tuple>

namespace faascamp::sim {

namespace {

enum class EventKind : int {
  // Numeric order is the tie-break at equal timestamps: a finishing
  // container is visible to everything else happening at that instant, and
  // expiries beat the arrivals that might have reused the container.
  Completion = 0,
  RestoreDone = 1,
  WarmExpiry = 2,
  ReclaimExpiry = 3,
  Arrival = 4,
};

struct QueuedEvent {
  std::int64_t t_ms;
  EventKind kind;
  std::uint64_t order;  // insertion counter, final tie-break
  int target;           // container id, or arrival index for Arrival
  std::uint64_t epoch;  // container epoch at scheduling time
};

struct QueuedEventAfter {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    return std::tuple(a.t_ms, static_cast<int>(a.kind), a.order) >
           std::tuple(b.t_ms, static_cast<int>(b.kind), b.order);
  }
};

enum class PoolKind { Warm, Reclaim };
enum class ServeAttempt { Served, Saturated };

class Simulation {
 public:
  Simulation(std::span<const trace::InvocationEvent> events,
             const std::vector<trace::Workload>& workloads, const PoolConfig& cfg,
             policy::EvictionPolicy& pol, DecisionObserver* observer)
      : events_(events),
        workloads_(workloads),
        cfg_(cfg),
        policy_(pol),
        observer_(observer),
        tracker_(static_cast<int>(workloads.size())),
        first_cold_done_(workloads.size(), false) {}

  RunResult run();

 private:
  ContainerRecord& rec(int cid) { return containers_[static_cast<std::size_t>(cid)]; }
  const trace::Workload& workload_of(const trace::InvocationEvent& ev) const {
    return workloads_[static_cast<std::size_t>(ev.workload_id)];
  }

  void schedule(std::int64_t t, EventKind kind, int target, std::uint64_t epoch) {
    queue_.push(QueuedEvent{t, kind, order_counter_++, target, epoch});
  }

  void set_state(int cid, ContainerState to);
  int create_container(const trace::InvocationEvent& ev);
  void destroy(int cid);

  int count_state(ContainerState s) const {
    int n = 0;
    for (const int cid : live_) {
      if (containers_[static_cast<std::size_t>(cid)].state == s) ++n;
    }
    return n;
  }

  int find_warm_match(const trace::InvocationEvent& ev) const;
  int find_reclaim_match(const trace::InvocationEvent& ev) const;
  std::vector<policy::EvictionCandidate> pool_candidates(PoolKind pool) const;
  int select_victim(PoolKind pool, bool provisioning);

  ServeAttempt try_serve(const trace::InvocationEvent& ev, double wait_ms);
  void serve_on(int cid, const trace::InvocationEvent& ev, OutcomeKind kind, double wait_ms,
                double init_ms);
  ServeAttempt provision(const trace::InvocationEvent& ev, double wait_ms);

  void handle_arrival(const trace::InvocationEvent& ev);
  void handle_completion(int cid);
  void begin_restore(int cid);
  void handle_restore_done(int cid);
  void handle_warm_expiry(int cid);
  void handle_reclaim_expiry(int cid);
  void drain_buffer();

  void record_outcome(const trace::InvocationEvent& ev, OutcomeKind kind, double wait_ms,
                      double init_ms, double exec_ms);
  void log_queue_depth();
  bool head_is_serveable() const;
  void audit() const;

  std::span<const trace::InvocationEvent> events_;
  const std::vector<trace::Workload>& workloads_;
  const PoolConfig& cfg_;
  policy::EvictionPolicy& policy_;
  DecisionObserver* observer_;

  std::vector<ContainerRecord> containers_;
  std::vector<int> live_;  // ascending container ids, non-destroyed
  std::deque<trace::InvocationEvent> buffer_;
  features::StateTracker tracker_;
  std::vector<policy::FutureRequest> future_;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, QueuedEventAfter> queue_;
  std::uint64_t order_counter_ = 0;
  std::int64_t now_ = 0;
  trace::InvocationEvent last_arrival_{};
  bool any_arrival_ = false;
  std::vector<bool> first_cold_done_;
  RunResult result_;
  std::vector<RequestOutcome> outcomes_by_seq_;
  std::vector<bool> outcome_set_;
};

void Simulation::set_state(int cid, ContainerState to) {
  ContainerRecord& r = rec(cid);
  const ContainerState from = r.state;
  static constexpr auto legal = [](ContainerState f, ContainerState t) {
    switch (f) {
      case ContainerState::Starting:
        return t == ContainerState::Checkpointing || t == ContainerState::Busy;
      case ContainerState::Checkpointing:
        return t == ContainerState::Busy;
      case ContainerState::Busy:
        return t == ContainerState::PausedWarm;
      case ContainerState::PausedWarm:
        return t == ContainerState::Busy || t == ContainerState::Restoring ||
               t == ContainerState::Destroyed;
      case ContainerState::Restoring:
        return t == ContainerState::PausedReclaim;
      case ContainerState::PausedReclaim:
        return t == ContainerState::Busy || t == ContainerState::Destroyed;
      case ContainerState::Destroyed:
        return false;
    }
    return false;
  };
  if (!legal(from, to))
    throw SimulationError(std::string("illegal container transition ") + to_string(from) + " -> " +
                          to_string(to));
  r.state = to;
  ++r.epoch;
  if (cfg_.record_transitions)
    result_.transitions.push_back(TransitionRecord{now_, cid, from, to});
}

int Simulation::create_container(const trace::InvocationEvent& ev) {
  const int cid = static_cast<int>(containers_.size());
  ContainerRecord r;
  r.container_id = cid;
  r.workload_id = ev.workload_id;
  r.owner_tenant = ev.tenant_id;
  r.state = ContainerState::Starting;
  r.created_seq = ev.seq;
  containers_.push_back(r);
  live_.push_back(cid);
  ++result_.containers_created;
  if (cfg_.record_transitions)
    result_.transitions.push_back(
        TransitionRecord{now_, cid, ContainerState::Destroyed, ContainerState::Starting});
  tracker_.on_container_created(cid, ev.workload_id);
  return cid;
}

void Simulation::destroy(int cid) {
  set_state(cid, ContainerState::Destroyed);
  live_.erase(std::find(live_.begin(), live_.end(), cid));
  tracker_.on_container_destroyed(cid);
}

int Simulation::find_warm_match(const trace::InvocationEvent& ev) const {
  // Most recently used matching container; older siblings stay visible to
  // the eviction policy.
  int best = -1;
  for (const int cid : live_) {
    const ContainerRecord& r = containers_[static_cast<std::size_t>(cid)];
    if (r.state != ContainerState::PausedWarm) continue;
    if (r.owner_tenant != ev.tenant_id || r.workload_id != ev.workload_id) continue;
    if (best < 0) {
      best = cid;
      continue;
    }
    const ContainerRecord& b = containers_[static_cast<std::size_t>(best)];
    if (r.last_used_t_ms > b.last_used_t_ms ||
        (r.last_used_t_ms == b.last_used_t_ms && cid < best)) {
      best = cid;
    }
  }
  return best;
}

int Simulation::find_reclaim_match(const trace::InvocationEvent& ev) const {
  // Most recently parked first: older reclaim residents are closer to expiry
  // anyway.
  int best = -1;
  for (const int cid : live_) {
    const ContainerRecord& r = containers_[static_cast<std::size_t>(cid)];
    if (r.state != ContainerState::PausedReclaim) continue;
    if (r.workload_id != ev.workload_id) continue;
    if (best < 0) {
      best = cid;
      continue;
    }
    const ContainerRecord& b = containers_[static_cast<std::size_t>(best)];
    if (r.idle_since_ms > b.idle_since_ms ||
        (r.idle_since_ms == b.idle_since_ms && cid < best)) {
      best = cid;
    }
  }
  return best;
}

std::vector<policy::EvictionCandidate> Simulation::pool_candidates(PoolKind pool) const {
  const ContainerState want =
      pool == PoolKind::Warm ? ContainerState::PausedWarm : ContainerState::PausedReclaim;
  std::vector<policy::EvictionCandidate> out;
  for (const int cid : live_) {  // live_ is id-ascending, so candidates are too
    const ContainerRecord& r = containers_[static_cast<std::size_t>(cid)];
    if (r.state != want) continue;
    policy::EvictionCandidate c;
    c.container_id = r.container_id;
    c.workload_id = r.workload_id;
    c.owner_tenant = pool == PoolKind::Warm ? r.owner_tenant : policy::kSharedOwner;
    c.last_used_seq = r.last_used_seq;
    c.last_used_t_ms = r.last_used_t_ms;
    c.frequency = r.frequency;
    c.memory_mb = workloads_[static_cast<std::size_t>(r.workload_id)].memory_mb;
    c.cold_start_ms = workloads_[static_cast<std::size_t>(r.workload_id)].cold_start_ms;
    out.push_back(c);
  }
  return out;
}

int Simulation::select_victim(PoolKind pool, bool provisioning) {
  const std::vector<policy::EvictionCandidate> candidates = pool_candidates(pool);
  if (candidates.empty()) throw SimulationError("victim selection with no candidates");
  if (cfg_.audit) {
    for (const policy::EvictionCandidate& c : candidates) {
      const ContainerState s = containers_[static_cast<std::size_t>(c.container_id)].state;
      if (s != ContainerState::PausedWarm && s != ContainerState::PausedReclaim)
        throw SimulationError("audit: non-idle container offered for eviction");
    }
  }

  policy::DecisionContext ctx;
  const std::int64_t cur = any_arrival_ ? last_arrival_.seq : -1;
  ctx.current_seq = cur;
  if (cur + 1 < static_cast<std::int64_t>(future_.size()))
    ctx.future = std::span<const policy::FutureRequest>(future_).subspan(
        static_cast<std::size_t>(cur + 1));

  const bool capture = provisioning && observer_ != nullptr;
  std::vector<std::vector<double>> rows;
  features::SystemStateVector sys;
  std::vector<features::ContainerStateVector> conts;
  if ((policy_.wants_features() || capture) && any_arrival_) {
    std::vector<features::IdleCandidateInfo> infos;
    infos.reserve(candidates.size());
    for (const policy::EvictionCandidate& c : candidates) {
      features::IdleCandidateInfo info;
      info.container_id = c.container_id;
      info.workload_id = c.workload_id;
      const ContainerRecord& r = containers_[static_cast<std::size_t>(c.container_id)];
      info.idle_since_ms = r.idle_since_ms;
      infos.push_back(info);
    }
    sys = tracker_.system_snapshot(last_arrival_);
    conts = tracker_.container_snapshots(infos);
    rows.resize(candidates.size(), std::vector<double>(features::kFeatureDim));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      features::encode(sys, conts[i], tracker_.num_workloads(),
                       static_cast<int>(candidates.size()), rows[i]);
    }
    ctx.state_vectors = rows;
  }

  int chosen;
  if (pool == PoolKind::Warm && !cfg_.ml_warm_pool && policy_.name() == "learned") {
    // Restricted mode: the model only rules the reclaim pool.
    chosen = policy::lru_select(candidates);
  } else {
    chosen = policy_.select(candidates, ctx);
  }

  const bool member = std::any_of(candidates.begin(), candidates.end(),
                                  [chosen](const auto& c) { return c.container_id == chosen; });
  if (!member)
    throw SimulationError("policy chose container " + std::to_string(chosen) +
                          " outside the candidate set");

  if (capture && !rows.empty())
    observer_->on_eviction_decision(sys, conts, candidates, ctx, chosen);
  return chosen;
}

void Simulation::serve_on(int cid, const trace::InvocationEvent& ev, OutcomeKind kind,
                          double wait_ms, double init_ms) {
  ContainerRecord& r = rec(cid);
  r.owner_tenant = ev.tenant_id;
  set_state(cid, ContainerState::Busy);
  const double exec = static_cast<double>(workload_of(ev).exec_ms);
  const std::int64_t hold = static_cast<std::int64_t>(init_ms) + workload_of(ev).exec_ms;
  r.busy_until_ms = now_ + hold;
  r.last_used_seq = ev.seq;
  r.last_used_t_ms = now_;
  r.idle_since_ms = 0;
  ++r.frequency;
  schedule(r.busy_until_ms, EventKind::Completion, cid, r.epoch);
  tracker_.observe_service(cid, ev);
  record_outcome(ev, kind, wait_ms, init_ms, exec);
}

ServeAttempt Simulation::try_serve(const trace::InvocationEvent& ev, double wait_ms) {
  const int warm = find_warm_match(ev);
  if (warm >= 0) {
    serve_on(warm, ev, OutcomeKind::WarmFromWarmPool, wait_ms, 0.0);
    return ServeAttempt::Served;
  }
  if (cfg_.reclaim_enabled) {
    const int reclaimed = find_reclaim_match(ev);
    if (reclaimed >= 0) {
      serve_on(reclaimed, ev, OutcomeKind::WarmFromReclaim, wait_ms, 0.0);
      return ServeAttempt::Served;
    }
  }
  return provision(ev, wait_ms);
}

ServeAttempt Simulation::provision(const trace::InvocationEvent& ev, double wait_ms) {
  const int busy = count_state(ContainerState::Busy);
  if (busy >= cfg_.max_containers) return ServeAttempt::Saturated;

  const int idle_warm = count_state(ContainerState::PausedWarm);
  const int idle_reclaim = count_state(ContainerState::PausedReclaim);
  const int restoring = count_state(ContainerState::Restoring);
  const int free = cfg_.max_containers - busy - idle_warm - idle_reclaim - restoring;

  if (free <= 0) {
    // Idle space must be evicted. Reclaim-pool residents go before warm ones;
    // when only in-flight restores hold the remaining slots there is nothing
    // legal to evict and the request waits the restore window out.
    PoolKind pool;
    if (idle_reclaim > 0) {
      pool = PoolKind::Reclaim;
    } else if (idle_warm > 0) {
      pool = PoolKind::Warm;
    } else {
      return ServeAttempt::Saturated;
    }
    const int victim = select_victim(pool, true);
    destroy(victim);
    ++result_.eviction_decisions;
    wait_ms += cfg_.eviction_decision_cost_ms;
  }

  const int cid = create_container(ev);
  const trace::Workload& w = workload_of(ev);
  double init = static_cast<double>(w.cold_start_ms);
  if (!first_cold_done_[static_cast<std::size_t>(ev.workload_id)]) {
    // First cold start of a workload also pays for seeding its checkpoint
    // image.
    if (w.checkpoint_extra_ms > 0) {
      set_state(cid, ContainerState::Checkpointing);
      init += static_cast<double>(w.checkpoint_extra_ms);
    }
    first_cold_done_[static_cast<std::size_t>(ev.workload_id)] = true;
  }
  serve_on(cid, ev, OutcomeKind::ColdStart, wait_ms, init);
  return ServeAttempt::Served;
}

void Simulation::handle_arrival(const trace::InvocationEvent& ev) {
  last_arrival_ = ev;
  any_arrival_ = true;
  tracker_.observe_arrival(ev);
  if (try_serve(ev, 0.0) == ServeAttempt::Served) return;

  if (cfg_.on_saturation == SaturationMode::Drop) {
    record_outcome(ev, OutcomeKind::DroppedAsCold, 0.0, 0.0, 0.0);
    return;
  }
  buffer_.push_back(ev);
  log_queue_depth();
}

void Simulation::handle_completion(int cid) {
  ContainerRecord& r = rec(cid);
  r.busy_until_ms = 0;
  r.idle_since_ms = now_;
  set_state(cid, ContainerState::PausedWarm);
  schedule(now_ + cfg_.warm_keepalive_ms, EventKind::WarmExpiry, cid, r.epoch);

  if (cfg_.reclaim_enabled) {
    const int warm_idle_limit = cfg_.max_containers - cfg_.reclaim_capacity;
    while (count_state(ContainerState::PausedWarm) > warm_idle_limit) {
      const int victim = select_victim(PoolKind::Warm, false);
      begin_restore(victim);
    }
  }
  drain_buffer();
}

void Simulation::begin_restore(int cid) {
  const int occupancy =
      count_state(ContainerState::Restoring) + count_state(ContainerState::PausedReclaim);
  if (!cfg_.reclaim_enabled || occupancy >= cfg_.reclaim_capacity) {
    destroy(cid);
    return;
  }
  ++result_.demotions;
  ContainerRecord& r = rec(cid);
  r.owner_tenant = policy::kSharedOwner;
  set_state(cid, ContainerState::Restoring);
  schedule(now_ + cfg_.restore_cost_ms, EventKind::RestoreDone, cid, r.epoch);
}

void Simulation::handle_restore_done(int cid) {
  ContainerRecord& r = rec(cid);
  set_state(cid, ContainerState::PausedReclaim);
  r.idle_since_ms = now_;
  r.last_used_t_ms = now_;
  r.last_used_seq = any_arrival_ ? last_arrival_.seq : 0;
  r.created_seq = r.last_used_seq;
  r.frequency = 0;
  tracker_.on_container_restored(cid);
  schedule(now_ + cfg_.reclaim_keepalive_ms, EventKind::ReclaimExpiry, cid, r.epoch);
  ++result_.restores_completed;
  drain_buffer();
}

void Simulation::handle_warm_expiry(int cid) {
  ++result_.warm_expirations;
  if (cfg_.reclaim_enabled) {
    // Keep-alive eviction parks the container in the reclaim pool instead of
    // killing it.
    begin_restore(cid);
  } else {
    destroy(cid);
  }
  drain_buffer();
}

void Simulation::handle_reclaim_expiry(int cid) {
  ++result_.reclaim_expirations;
  destroy(cid);
  drain_buffer();
}

void Simulation::drain_buffer() {
  while (!buffer_.empty()) {
    const trace::InvocationEvent ev = buffer_.front();
    if (try_serve(ev, static_cast<double>(now_ - ev.t_ms)) == ServeAttempt::Saturated) break;
    buffer_.pop_front();
    log_queue_depth();
  }
}

void Simulation::record_outcome(const trace::InvocationEvent& ev, OutcomeKind kind, double wait_ms,
                                double init_ms, double exec_ms) {
  RequestOutcome o;
  o.event = ev;
  o.kind = kind;
  o.wait_ms = wait_ms;
  o.init_ms = init_ms;
  o.exec_ms = exec_ms;
  o.response_ms = wait_ms + init_ms + exec_ms;
  const std::size_t idx = static_cast<std::size_t>(ev.seq);
  if (outcome_set_[idx]) throw SimulationError("request " + std::to_string(ev.seq) + " served twice");
  outcomes_by_seq_[idx] = o;
  outcome_set_[idx] = true;
}

void Simulation::log_queue_depth() {
  result_.queue_log.push_back(QueueSample{now_, static_cast<int>(buffer_.size())});
}

bool Simulation::head_is_serveable() const {
  const trace::InvocationEvent& ev = buffer_.front();
  if (find_warm_match(ev) >= 0) return true;
  if (cfg_.reclaim_enabled && find_reclaim_match(ev) >= 0) return true;
  const int busy = count_state(ContainerState::Busy);
  if (busy >= cfg_.max_containers) return false;
  const int idle_warm = count_state(ContainerState::PausedWarm);
  const int idle_reclaim = count_state(ContainerState::PausedReclaim);
  const int restoring = count_state(ContainerState::Restoring);
  if (cfg_.max_containers - busy - idle_warm - idle_reclaim - restoring > 0) return true;
  return idle_warm > 0 || idle_reclaim > 0;
}

void Simulation::audit() const {
  const int busy = count_state(ContainerState::Busy);
  const int idle_warm = count_state(ContainerState::PausedWarm);
  const int idle_reclaim = count_state(ContainerState::PausedReclaim);
  const int restoring = count_state(ContainerState::Restoring);

  if (static_cast<int>(live_.size()) != busy + idle_warm + idle_reclaim + restoring)
    throw SimulationError("audit: live container in unexpected state");
  if (static_cast<int>(live_.size()) > cfg_.max_containers)
    throw SimulationError("audit: container capacity exceeded");
  if (cfg_.reclaim_enabled) {
    if (idle_reclaim + restoring > cfg_.reclaim_capacity)
      throw SimulationError("audit: reclaim pool over capacity");
    if (idle_warm > cfg_.max_containers - cfg_.reclaim_capacity)
      throw SimulationError("audit: warm pool over its idle limit");
  } else if (idle_reclaim + restoring > 0) {
    throw SimulationError("audit: reclaim-pool state with reclaim disabled");
  }

  for (const int cid : live_) {
    const ContainerRecord& r = containers_[static_cast<std::size_t>(cid)];
    const bool shared =
        r.state == ContainerState::Restoring || r.state == ContainerState::PausedReclaim;
    if (shared != (r.owner_tenant == policy::kSharedOwner))
      throw SimulationError("audit: owner does not match pool membership");
    if (r.state == ContainerState::Busy) {
      if (r.busy_until_ms < now_) throw SimulationError("audit: busy past its completion time");
    } else if (r.busy_until_ms != 0) {
      throw SimulationError("audit: idle container with a busy window");
    }
  }

  if (!buffer_.empty()) {
    if (cfg_.on_saturation != SaturationMode::Buffer)
      throw SimulationError("audit: buffered requests while in drop mode");
    if (head_is_serveable())
      throw SimulationError("audit: serveable request left sitting in the buffer");
    for (std::size_t i = 1; i < buffer_.size(); ++i) {
      if (buffer_[i - 1].seq > buffer_[i].seq)
        throw SimulationError("audit: buffer is not FIFO by arrival");
    }
  }
}

RunResult Simulation::run() {
  validate_config(cfg_);
  trace::validate_workloads(workloads_);
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const trace::InvocationEvent& ev = events_[i];
    if (ev.seq != static_cast<std::int64_t>(i))
      throw SimulationError("event seq must equal stream position");
    if (ev.t_ms < 0) throw SimulationError("negative event time");
    if (i > 0 && ev.t_ms <= events_[i - 1].t_ms)
      throw SimulationError("event times must be strictly increasing");
    if (ev.workload_id < 0 || ev.workload_id >= static_cast<int>(workloads_.size()))
      throw SimulationError("event workload out of range");
    if (ev.tenant_id < 0) throw SimulationError("negative tenant id");
  }

  future_.resize(events_.size());
  for (std::size_t i = 0; i < events_.size(); ++i)
    future_[i] = policy::FutureRequest{events_[i].tenant_id, events_[i].workload_id};

  outcomes_by_seq_.resize(events_.size());
  outcome_set_.assign(events_.size(), false);
  result_.queue_log.push_back(QueueSample{0, 0});

  for (std::size_t i = 0; i < events_.size(); ++i)
    schedule(events_[i].t_ms, EventKind::Arrival, static_cast<int>(i), 0);

  while (!queue_.empty()) {
    const QueuedEvent qe = queue_.top();
    queue_.pop();
    now_ = qe.t_ms;

    if (qe.kind == EventKind::Arrival) {
      handle_arrival(events_[static_cast<std::size_t>(qe.target)]);
    } else {
      const ContainerRecord& r = containers_[static_cast<std::size_t>(qe.target)];
      if (r.epoch != qe.epoch) {
        // Keep-alive timers outlive reuse and demotion; anything else stale
        // means the state machine broke.
        if (qe.kind == EventKind::Completion || qe.kind == EventKind::RestoreDone)
          throw SimulationError("stale completion or restore event");
        continue;
      }
      switch (qe.kind) {
        case EventKind::Completion:
          handle_completion(qe.target);
          break;
        case EventKind::RestoreDone:
          handle_restore_done(qe.target);
          break;
        case EventKind::WarmExpiry:
          handle_warm_expiry(qe.target);
          break;
        case EventKind::ReclaimExpiry:
          handle_reclaim_expiry(qe.target);
          break;
        case EventKind::Arrival:
          break;
      }
    }
    if (cfg_.audit) audit();
  }

  if (!buffer_.empty())
    throw SimulationError("simulation drained with requests still buffered");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (!outcome_set_[i])
      throw SimulationError("request " + std::to_string(i) + " has no outcome");
  }

  result_.outcomes = std::move(outcomes_by_seq_);
  result_.sim_end_ms = now_;
  return std::move(result_);
}

}  // namespace

const char* to_string(ContainerState s) {
  switch (s) {
    case ContainerState::Starting: return "Starting";
    case ContainerState::Checkpointing: return "Checkpointing";
    case ContainerState::Busy: return "Busy";
    case ContainerState::PausedWarm: return "PausedWarm";
    case ContainerState::Restoring: return "Restoring";
    case ContainerState::PausedReclaim: return "PausedReclaim";
    case ContainerState::Destroyed: return "Destroyed";
  }
  return "?";
}

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::WarmFromWarmPool: return "warm_pool";
    case OutcomeKind::WarmFromReclaim: return "reclaim";
    case OutcomeKind::ColdStart: return "cold";
    case OutcomeKind::DroppedAsCold: return "dropped";
  }
  return "?";
}

bool is_warm(OutcomeKind k) {
  return k == OutcomeKind::WarmFromWarmPool || k == OutcomeKind::WarmFromReclaim;
}

void validate_config(const PoolConfig& cfg) {
  if (cfg.max_containers <= 0) throw SimulationError("max_containers must be positive");
  if (cfg.warm_keepalive_ms <= 0) throw SimulationError("warm_keepalive_ms must be positive");
  if (cfg.eviction_decision_cost_ms < 0)
    throw SimulationError("eviction_decision_cost_ms must be non-negative");
  if (cfg.reclaim_enabled) {
    if (cfg.reclaim_capacity <= 0 || cfg.reclaim_capacity > cfg.max_containers)
      throw SimulationError("reclaim_capacity must be in [1, max_containers]");
    if (cfg.reclaim_keepalive_ms <= 0)
      throw SimulationError("reclaim_keepalive_ms must be positive");
    if (cfg.restore_cost_ms < 0) throw SimulationError("restore_cost_ms must be non-negative");
  } else if (cfg.reclaim_capacity != 0) {
    throw SimulationError("reclaim_capacity must be 0 when the reclaim pool is disabled");
  }
}

RunResult run_simulation(std::span<const trace::InvocationEvent> events,
                         const std::vector<trace::Workload>& workloads, const PoolConfig& cfg,
                         policy::EvictionPolicy& policy, DecisionObserver* observer) {
  Simulation sim(events, workloads, cfg, policy, observer);
  return sim.run();
}

}  // namespace faascamp::sim
