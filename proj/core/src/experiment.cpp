#include "faascamp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "faascamp/rng.hpp"

namespace faascamp::experiment {

namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const char* const kPolicyNames[] = {"lru", "lfu", "gdsf", "belady", "learned"};

bool known_policy(std::string_view name) {
  return std::any_of(std::begin(kPolicyNames), std::end(kPolicyNames),
                     [name](const char* p) { return name == p; });
}

}  // namespace

SystemSpec parse_system_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    if (colon == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, colon - start));
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 4)
    throw ExperimentError("system spec must be LABEL:POLICY[:WARM_MS[:RECLAIM_MS]]: " + text);

  SystemSpec spec;
  spec.label = parts[0];
  spec.policy = parts[1];
  if (!known_policy(spec.policy))
    throw ExperimentError("unknown policy '" + spec.policy + "' in system spec " + text);

  // Pool sizes ride in the label's "<warm>-<reclaim>" suffix.
  const std::size_t dash2 = spec.label.rfind('-');
  const std::size_t dash1 = dash2 == std::string::npos ? std::string::npos
                                                       : spec.label.rfind('-', dash2 - 1);
  std::int64_t warm_slots = -1, reclaim_slots = -1;
  if (dash1 == std::string::npos || dash2 + 1 >= spec.label.size() ||
      !parse_int(std::string_view(spec.label).substr(dash1 + 1, dash2 - dash1 - 1), warm_slots) ||
      !parse_int(std::string_view(spec.label).substr(dash2 + 1), reclaim_slots) ||
      warm_slots <= 0 || reclaim_slots < 0) {
    throw ExperimentError("system label must end in <warm>-<reclaim> pool sizes: " + spec.label);
  }

  spec.pool.max_containers = static_cast<int>(warm_slots + reclaim_slots);
  spec.pool.reclaim_capacity = static_cast<int>(reclaim_slots);
  spec.pool.reclaim_enabled = reclaim_slots > 0;
  if (spec.pool.reclaim_enabled) {
    spec.pool.warm_keepalive_ms = 300'000;
    spec.pool.reclaim_keepalive_ms = 300'000;
  } else {
    spec.pool.warm_keepalive_ms = 600'000;
  }

  if (parts.size() >= 3) {
    std::int64_t v = 0;
    if (!parse_int(parts[2], v) || v <= 0)
      throw ExperimentError("bad warm keepalive in system spec: " + text);
    spec.pool.warm_keepalive_ms = v;
  }
  if (parts.size() == 4) {
    std::int64_t v = 0;
    if (!parse_int(parts[3], v) || v <= 0)
      throw ExperimentError("bad reclaim keepalive in system spec: " + text);
    if (!spec.pool.reclaim_enabled)
      throw ExperimentError("reclaim keepalive given but the label has no reclaim slots: " + text);
    spec.pool.reclaim_keepalive_ms = v;
  }
  return spec;
}

const char* scenario_name(trace::Scenario s) {
  switch (s) {
    case trace::Scenario::RegularOnly: return "regular";
    case trace::Scenario::MobileOnly: return "mobile";
    case trace::Scenario::Mixed: return "mixed";
  }
  return "?";
}

trace::Scenario parse_scenario(const std::string& name) {
  if (name == "regular") return trace::Scenario::RegularOnly;
  if (name == "mobile") return trace::Scenario::MobileOnly;
  if (name == "mixed") return trace::Scenario::Mixed;
  throw ExperimentError("unknown scenario: " + name + " (want regular, mobile, or mixed)");
}

ScenarioStream build_scenarios_stream_impl(const std::vector<trace::AzureTraceRow>& filtered,
                                           trace::Scenario scenario,
                                           const trace::ScenarioParams& params, int num_workloads,
                                           int window_minutes, std::uint64_t seed) {
  if (window_minutes <= 0 || window_minutes > trace::kMinutesPerDay)
    throw ExperimentError("window_minutes out of range");

  ScenarioStream out;
  out.profiles = trace::assign_tenants(filtered, scenario, params, seed);
  out.workload_of_trace =
      trace::assign_workloads(static_cast<int>(filtered.size()), num_workloads, seed);

  Rng wrng = Rng(seed).split("window");
  const std::int64_t start_min =
      wrng.uniform_in(0, static_cast<std::int64_t>(trace::kMinutesPerDay - window_minutes));
  out.window_start_ms = start_min * trace::kMsPerMinute;
  out.window_len_ms = static_cast<std::int64_t>(window_minutes) * trace::kMsPerMinute;

  std::vector<std::vector<trace::InvocationEvent>> tenant_streams;
  tenant_streams.reserve(out.profiles.size());
  for (const trace::TenantProfile& prof : out.profiles) {
    std::vector<trace::InvocationEvent> stream;
    for (const int tid : prof.trace_ids) {
      const std::vector<trace::InvocationEvent> full = trace::expand_trace(
          filtered[static_cast<std::size_t>(tid)], tid, prof.tenant_id,
          out.workload_of_trace[static_cast<std::size_t>(tid)]);
      for (const trace::InvocationEvent& ev : full) {
        if (ev.t_ms < out.window_start_ms || ev.t_ms >= out.window_start_ms + out.window_len_ms)
          continue;
        trace::InvocationEvent shifted = ev;
        shifted.t_ms -= out.window_start_ms;
        stream.push_back(shifted);
      }
    }
    // Every tenant shows up at least once per window.
    const int anchor_trace = prof.trace_ids.front();
    stream = trace::inject_min_invocation(
        std::move(stream), prof.tenant_id,
        out.workload_of_trace[static_cast<std::size_t>(anchor_trace)], anchor_trace, 0,
        out.window_len_ms, seed);
    tenant_streams.push_back(std::move(stream));
  }
  out.events = trace::merge_streams(tenant_streams);
  return out;
}

ScenarioStream build_scenario_stream(const std::vector<trace::AzureTraceRow>& rows,
                                     trace::Scenario scenario, const trace::ScenarioParams& params,
                                     int num_workloads, int window_minutes, std::uint64_t seed) {
  return build_scenarios_stream_impl(trace::filter_outliers(rows), scenario, params, num_workloads,
                                     window_minutes, seed);
}

std::vector<trace::InvocationEvent> build_flat_stream(const std::vector<trace::AzureTraceRow>& rows,
                                                      int num_workloads, std::uint64_t seed) {
  const std::vector<trace::AzureTraceRow> filtered = trace::filter_outliers(rows);
  const std::vector<int> workload_of =
      trace::assign_workloads(static_cast<int>(filtered.size()), num_workloads, seed);
  std::vector<std::vector<trace::InvocationEvent>> streams;
  streams.reserve(filtered.size());
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    streams.push_back(trace::expand_trace(filtered[i], static_cast<int>(i), 0,
                                          workload_of[i]));
  }
  return trace::merge_streams(streams);
}

report::RunRecord run_system_on_stream(const ScenarioStream& stream, const SystemSpec& system,
                                       const std::vector<trace::Workload>& workloads,
                                       const std::string& scenario_label, std::uint64_t seed) {
  policy::PolicyParams pp;
  pp.belady_window = system.belady_window;
  pp.model_path = system.model_path;
  const std::unique_ptr<policy::EvictionPolicy> pol = policy::make_policy(system.policy, pp);
  const sim::RunResult result = sim::run_simulation(stream.events, workloads, system.pool, *pol);

  report::RunRecord rec;
  rec.system = system.label;
  rec.scenario = scenario_label;
  rec.seed = seed;
  rec.report = report::summarize(result);
  return rec;
}

ExperimentResult run_experiment(const std::vector<trace::AzureTraceRow>& rows,
                                const ExperimentSpec& spec) {
  if (spec.systems.empty()) throw ExperimentError("no systems to run");
  if (spec.repetitions <= 0) throw ExperimentError("repetitions must be positive");

  const std::vector<trace::AzureTraceRow> filtered = trace::filter_outliers(rows);
  const std::vector<trace::Workload> workloads = trace::default_workloads();

  ExperimentResult result;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(rep);
    const ScenarioStream stream = build_scenarios_stream_impl(
        filtered, spec.scenario, spec.params, static_cast<int>(workloads.size()),
        spec.window_minutes, seed);
    for (const SystemSpec& system : spec.systems) {
      result.runs.push_back(
          run_system_on_stream(stream, system, workloads, scenario_name(spec.scenario), seed));
    }
  }
  result.table = report::compare(result.runs);
  return result;
}

SimJobConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExperimentError("cannot open " + path.string());

  SimJobConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;

    const std::size_t eq = stripped.find('=');
    if (eq == std::string_view::npos)
      throw ExperimentError(path.string() + ":" + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key(trim(stripped.substr(0, eq)));
    const std::string value(trim(stripped.substr(eq + 1)));
    if (key.empty() || value.empty())
      throw ExperimentError(path.string() + ":" + std::to_string(line_no) + ": empty key or value");

    auto as_int = [&](const std::string& v) {
      std::int64_t out = 0;
      if (!parse_int(v, out))
        throw ExperimentError(path.string() + ":" + std::to_string(line_no) +
                              ": expected integer for " + key);
      return out;
    };
    auto as_bool = [&](const std::string& v) {
      if (v == "true" || v == "1") return true;
      if (v == "false" || v == "0") return false;
      throw ExperimentError(path.string() + ":" + std::to_string(line_no) +
                            ": expected true/false for " + key);
    };

    if (key == "max_containers") cfg.pool.max_containers = static_cast<int>(as_int(value));
    else if (key == "reclaim_capacity") cfg.pool.reclaim_capacity = static_cast<int>(as_int(value));
    else if (key == "reclaim_enabled") cfg.pool.reclaim_enabled = as_bool(value);
    else if (key == "warm_keepalive_ms") cfg.pool.warm_keepalive_ms = as_int(value);
    else if (key == "reclaim_keepalive_ms") cfg.pool.reclaim_keepalive_ms = as_int(value);
    else if (key == "restore_cost_ms") cfg.pool.restore_cost_ms = as_int(value);
    else if (key == "eviction_decision_cost_ms")
      cfg.pool.eviction_decision_cost_ms = static_cast<double>(as_int(value));
    else if (key == "on_saturation") {
      if (value == "drop") cfg.pool.on_saturation = sim::SaturationMode::Drop;
      else if (value == "buffer") cfg.pool.on_saturation = sim::SaturationMode::Buffer;
      else
        throw ExperimentError(path.string() + ":" + std::to_string(line_no) +
                              ": on_saturation must be drop or buffer");
    } else if (key == "ml_warm_pool") cfg.pool.ml_warm_pool = as_bool(value);
    else if (key == "audit") cfg.pool.audit = as_bool(value);
    else if (key == "policy") {
      if (!known_policy(value))
        throw ExperimentError(path.string() + ":" + std::to_string(line_no) +
                              ": unknown policy " + value);
      cfg.policy = value;
    } else if (key == "model") cfg.model_path = value;
    else if (key == "belady_window") cfg.belady_window = static_cast<int>(as_int(value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(value));
    else
      throw ExperimentError(path.string() + ":" + std::to_string(line_no) + ": unknown key " + key);
  }
  return cfg;
}

}  // namespace faascamp::experiment
