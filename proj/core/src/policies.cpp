#include "faascamp/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace faascamp::policy {

namespace {

void require_nonempty(std::span<const EvictionCandidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("eviction candidate set is empty");
}

}  // namespace

int lru_select(std::span<const EvictionCandidate> candidates) {
  require_nonempty(candidates);
  const EvictionCandidate* best = &candidates[0];
  for (const EvictionCandidate& c : candidates.subspan(1)) {
    if (c.last_used_t_ms < best->last_used_t_ms ||
        (c.last_used_t_ms == best->last_used_t_ms && c.container_id < best->container_id)) {
      best = &c;
    }
  }
  return best->container_id;
}

int lfu_select(std::span<const EvictionCandidate> candidates) {
  require_nonempty(candidates);
  const EvictionCandidate* best = &candidates[0];
  for (const EvictionCandidate& c : candidates.subspan(1)) {
    const auto key = std::tuple(c.frequency, c.last_used_t_ms, c.container_id);
    const auto best_key = std::tuple(best->frequency, best->last_used_t_ms, best->container_id);
    if (key < best_key) best = &c;
  }
  return best->container_id;
}

std::pair<int, double> gdsf_select(std::span<const EvictionCandidate> candidates, double clock) {
  require_nonempty(candidates);
  auto priority = [clock](const EvictionCandidate& c) {
    return clock + static_cast<double>(c.frequency) * static_cast<double>(c.cold_start_ms) /
                       static_cast<double>(c.memory_mb);
  };
  const EvictionCandidate* best = &candidates[0];
  double best_p = priority(*best);
  for (const EvictionCandidate& c : candidates.subspan(1)) {
    const double p = priority(c);
    if (p < best_p || (p == best_p && c.container_id < best->container_id)) {
      best = &c;
      best_p = p;
    }
  }
  // The clock inflates to the evicted priority and never moves backwards.
  return {best->container_id, std::max(clock, best_p)};
}

int belady_select(std::span<const EvictionCandidate> candidates, const OracleContext& ctx,
                  int window) {
  require_nonempty(candidates);
  if (window <= 0) throw std::invalid_argument("oracle window must be positive");

  const std::size_t horizon = std::min(ctx.future.size(), static_cast<std::size_t>(window));
  const std::int64_t infinity = static_cast<std::int64_t>(window) + 1;

  auto reuse_distance = [&](const EvictionCandidate& c) -> std::int64_t {
    for (std::size_t i = 0; i < horizon; ++i) {
      const FutureRequest& fr = ctx.future[i];
      if (fr.workload_id != c.workload_id) continue;
      if (c.owner_tenant != kSharedOwner && fr.tenant_id != c.owner_tenant) continue;
      return static_cast<std::int64_t>(i) + 1;
    }
    return infinity;
  };

  const EvictionCandidate* best = &candidates[0];
  std::int64_t best_d = reuse_distance(*best);
  for (const EvictionCandidate& c : candidates.subspan(1)) {
    const std::int64_t d = reuse_distance(c);
    // Farthest reuse goes first; equal distances (the whole infinity class
    // included) fall back to LRU order, then the lower id.
    const auto key = std::tuple(-d, c.last_used_t_ms, c.container_id);
    const auto best_key = std::tuple(-best_d, best->last_used_t_ms, best->container_id);
    if (key < best_key) {
      best = &c;
      best_d = d;
    }
  }
  return best->container_id;
}

int learned_select(std::span<const EvictionCandidate> candidates,
                   std::span<const std::vector<double>> state_vectors,
                   const learn::MlpModel& model) {
  require_nonempty(candidates);
  if (state_vectors.size() != candidates.size())
    throw std::invalid_argument("state vector count does not match candidate count");

  int best_id = candidates[0].container_id;
  double best_score = forward(model, state_vectors[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double score = forward(model, state_vectors[i]);
    if (score > best_score ||
        (score == best_score && candidates[i].container_id < best_id)) {
      best_id = candidates[i].container_id;
      best_score = score;
    }
  }
  return best_id;
}

std::unique_ptr<EvictionPolicy> make_policy(std::string_view name, const PolicyParams& params) {
  if (name == "lru") return std::make_unique<LruPolicy>();
  if (name == "lfu") return std::make_unique<LfuPolicy>();
  if (name == "gdsf") return std::make_unique<GdsfPolicy>();
  if (name == "belady") return std::make_unique<BeladyPolicy>(params.belady_window);
  if (name == "learned") {
    if (params.model_path.empty())
      throw std::invalid_argument("learned policy needs a model path");
    return std::make_unique<LearnedPolicy>(learn::load_model(params.model_path));
  }
  throw std::invalid_argument("unknown eviction policy: " + std::string(name));
}

}  // namespace faascamp::policy
