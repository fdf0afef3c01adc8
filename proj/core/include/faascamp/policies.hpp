#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faascamp/model.hpp"

namespace faascamp::policy {

// owner_tenant of containers parked in the shared pool.
inline constexpr int kSharedOwner = -1;

struct EvictionCandidate {
  int container_id = 0;
  int workload_id = 0;
  int owner_tenant = kSharedOwner;
  std::int64_t last_used_seq = 0;
  std::int64_t last_used_t_ms = 0;
  std::int64_t frequency = 0;
  int memory_mb = 0;
  std::int64_t cold_start_ms = 0;
};

struct FutureRequest {
  int tenant_id = 0;
  int workload_id = 0;
};

// Lookahead handed to the clairvoyant policy: the next requests strictly
// after the one being decided, possibly shorter than the window near the
// end of a trace.
struct OracleContext {
  std::span<const FutureRequest> future;
  std::int64_t current_seq = 0;
};

// Everything a policy may consult at a decision point. future covers the
// whole remaining stream (policies truncate to their own window);
// state_vectors[i] is the encoded feature row for candidates[i] and is only
// populated when the active policy asks for features.
struct DecisionContext {
  std::span<const FutureRequest> future;
  std::int64_t current_seq = 0;
  std::span<const std::vector<double>> state_vectors;
};

// All selectors require a non-empty candidate list and return the
// container_id of exactly one candidate. Ties break toward the lower
// container id unless stated otherwise.

// Least recently used: smallest last_used_t_ms.
int lru_select(std::span<const EvictionCandidate> candidates);

// Least frequently used: smallest frequency; ties by older last_used_t_ms.
int lfu_select(std::span<const EvictionCandidate> candidates);

// Greedy-dual-size-frequency. priority = clock + frequency * cold_start_ms /
// memory_mb; evicts the smallest priority and returns the advanced clock
// (the evicted priority, never decreasing).
std::pair<int, double> gdsf_select(std::span<const EvictionCandidate> candidates, double clock);

// Clairvoyant: reuse distance of a candidate is the 1-based position of the
// first in-window request it could serve (same workload, and same tenant
// unless the candidate is shared). No match puts it in the infinity class
// (distance = window + 1). Evicts the largest distance; ties fall back to
// LRU order, then lower id.
int belady_select(std::span<const EvictionCandidate> candidates, const OracleContext& ctx,
                  int window);

// Scores each candidate's eviction probability with the model and evicts the
// argmax. state_vectors must parallel candidates.
int learned_select(std::span<const EvictionCandidate> candidates,
                   std::span<const std::vector<double>> state_vectors,
                   const learn::MlpModel& model);

class EvictionPolicy {
 public:
  virtual ~EvictionPolicy() = default;
  virtual std::string_view name() const = 0;
  virtual int select(std::span<const EvictionCandidate> candidates, const DecisionContext& ctx) = 0;
  // True when select() reads ctx.state_vectors, so the engine only builds
  // feature rows for policies that use them.
  virtual bool wants_features() const { return false; }
};

class LruPolicy final : public EvictionPolicy {
 public:
  std::string_view name() const override { return "lru"; }
  int select(std::span<const EvictionCandidate> c, const DecisionContext&) override {
    return lru_select(c);
  }
};

class LfuPolicy final : public EvictionPolicy {
 public:
  std::string_view name() const override { return "lfu"; }
  int select(std::span<const EvictionCandidate> c, const DecisionContext&) override {
    return lfu_select(c);
  }
};

class GdsfPolicy final : public EvictionPolicy {
 public:
  std::string_view name() const override { return "gdsf"; }
  int select(std::span<const EvictionCandidate> c, const DecisionContext&) override {
    auto [id, clock] = gdsf_select(c, clock_);
    clock_ = clock;
    return id;
  }
  double clock() const { return clock_; }

 private:
  double clock_ = 0.0;  // inflation clock, survives across decisions in a run
};

class BeladyPolicy final : public EvictionPolicy {
 public:
  explicit BeladyPolicy(int window) : window_(window) {}
  std::string_view name() const override { return "belady"; }
  int select(std::span<const EvictionCandidate> c, const DecisionContext& ctx) override {
    return belady_select(c, OracleContext{ctx.future, ctx.current_seq}, window_);
  }
  int window() const { return window_; }

 private:
  int window_;
};

class LearnedPolicy final : public EvictionPolicy {
 public:
  explicit LearnedPolicy(learn::MlpModel model) : model_(std::move(model)) {}
  std::string_view name() const override { return "learned"; }
  bool wants_features() const override { return true; }
  int select(std::span<const EvictionCandidate> c, const DecisionContext& ctx) override {
    return learned_select(c, ctx.state_vectors, model_);
  }
  const learn::MlpModel& model() const { return model_; }

 private:
  learn::MlpModel model_;
};

struct PolicyParams {
  int belady_window = 30;
  std::string model_path;  // required by "learned"
};

// Names: lru, lfu, gdsf, belady, learned. Unknown name throws.
std::unique_ptr<EvictionPolicy> make_policy(std::string_view name, const PolicyParams& params);

}  // namespace faascamp::policy
