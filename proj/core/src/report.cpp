#include "faascamp/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace faascamp::report {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

SimulationReport summarize(const sim::RunResult& result, std::int64_t window_ms) {
  if (window_ms <= 0) throw ReportError("window_ms must be positive");

  SimulationReport rep;
  rep.window_ms = window_ms;
  rep.total_requests = static_cast<std::int64_t>(result.outcomes.size());

  std::int64_t last_arrival_ms = 0;
  double response_sum = 0.0;
  double wait_sum = 0.0;
  std::int64_t served = 0;

  for (const sim::RequestOutcome& o : result.outcomes) {
    last_arrival_ms = std::max(last_arrival_ms, o.event.t_ms);
    switch (o.kind) {
      case sim::OutcomeKind::WarmFromWarmPool: ++rep.warm_from_warm; break;
      case sim::OutcomeKind::WarmFromReclaim: ++rep.warm_from_reclaim; break;
      case sim::OutcomeKind::ColdStart: ++rep.cold_starts; break;
      case sim::OutcomeKind::DroppedAsCold: ++rep.dropped; break;
    }
    if (o.kind != sim::OutcomeKind::DroppedAsCold) {
      response_sum += o.response_ms;
      wait_sum += o.wait_ms;
      ++served;
    }
  }

  if (rep.total_requests > 0) {
    rep.warm_rate_pct = 100.0 * static_cast<double>(rep.warm_from_warm + rep.warm_from_reclaim) /
                        static_cast<double>(rep.total_requests);
    rep.cold_per_window.assign(static_cast<std::size_t>(last_arrival_ms / window_ms) + 1, 0);
    for (const sim::RequestOutcome& o : result.outcomes) {
      if (o.kind == sim::OutcomeKind::ColdStart || o.kind == sim::OutcomeKind::DroppedAsCold)
        ++rep.cold_per_window[static_cast<std::size_t>(o.event.t_ms / window_ms)];
    }
  }
  if (served > 0) {
    rep.mean_response_ms = response_sum / static_cast<double>(served);
    rep.mean_wait_ms = wait_sum / static_cast<double>(served);
  }

  // Time-weighted mean of the buffer depth step function over [0, sim_end].
  if (result.sim_end_ms > 0 && !result.queue_log.empty()) {
    double area = 0.0;
    for (std::size_t i = 0; i < result.queue_log.size(); ++i) {
      const std::int64_t t0 = result.queue_log[i].t_ms;
      const std::int64_t t1 =
          i + 1 < result.queue_log.size() ? result.queue_log[i + 1].t_ms : result.sim_end_ms;
      area += static_cast<double>(result.queue_log[i].depth) * static_cast<double>(t1 - t0);
      rep.max_queue_depth = std::max(rep.max_queue_depth, result.queue_log[i].depth);
    }
    rep.mean_queue_depth = area / static_cast<double>(result.sim_end_ms);
  } else {
    for (const sim::QueueSample& s : result.queue_log)
      rep.max_queue_depth = std::max(rep.max_queue_depth, s.depth);
  }
  return rep;
}

void write_report_csv(const std::filesystem::path& path, const SimulationReport& rep,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
  std::ofstream out(path);
  if (!out) throw ReportError("cannot write " + path.string());
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
  out << "metric,value\n";
  out << "total_requests," << rep.total_requests << '\n';
  out << "warm_from_warm_pool," << rep.warm_from_warm << '\n';
  out << "warm_from_reclaim," << rep.warm_from_reclaim << '\n';
  out << "cold_starts," << rep.cold_starts << '\n';
  out << "dropped," << rep.dropped << '\n';
  out << "warm_rate_pct," << fmt("%.4f", rep.warm_rate_pct) << '\n';
  out << "mean_response_ms," << fmt("%.4f", rep.mean_response_ms) << '\n';
  out << "mean_wait_ms," << fmt("%.4f", rep.mean_wait_ms) << '\n';
  out << "mean_queue_depth," << fmt("%.6f", rep.mean_queue_depth) << '\n';
  out << "max_queue_depth," << rep.max_queue_depth << '\n';
  out << "cold_window_ms," << rep.window_ms << '\n';
  for (std::size_t i = 0; i < rep.cold_per_window.size(); ++i)
    out << "cold_window_" << i << ',' << rep.cold_per_window[i] << '\n';
  if (!out) throw ReportError("write failed for " + path.string());
}

std::string format_report_text(const SimulationReport& rep) {
  std::string s;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-22s %12lld\n", "total requests",
                static_cast<long long>(rep.total_requests));
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12lld\n", "warm (warm pool)",
                static_cast<long long>(rep.warm_from_warm));
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12lld\n", "warm (reclaim pool)",
                static_cast<long long>(rep.warm_from_reclaim));
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12lld\n", "cold starts",
                static_cast<long long>(rep.cold_starts));
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12lld\n", "dropped",
                static_cast<long long>(rep.dropped));
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12.2f\n", "warm rate %", rep.warm_rate_pct);
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12.2f\n", "mean response ms", rep.mean_response_ms);
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12.2f\n", "mean wait ms", rep.mean_wait_ms);
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12.3f\n", "mean queue depth", rep.mean_queue_depth);
  s += buf;
  std::snprintf(buf, sizeof(buf), "%-22s %12d\n", "max queue depth", rep.max_queue_depth);
  s += buf;
  s += "cold starts per window:";
  for (const std::int64_t c : rep.cold_per_window) {
    std::snprintf(buf, sizeof(buf), " %lld", static_cast<long long>(c));
    s += buf;
  }
  s += '\n';
  return s;
}

std::vector<ComparisonRow> compare(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw ReportError("nothing to compare");

  // Scenario and system orderings follow first appearance in the input.
  std::vector<std::string> scenarios;
  std::vector<std::string> systems;
  for (const RunRecord& r : runs) {
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end())
      scenarios.push_back(r.scenario);
    if (std::find(systems.begin(), systems.end(), r.system) == systems.end())
      systems.push_back(r.system);
  }

  std::vector<ComparisonRow> rows;
  for (const std::string& scen : scenarios) {
    // Every system must have covered the identical seed set.
    std::map<std::string, std::multiset<std::uint64_t>> seed_sets;
    for (const RunRecord& r : runs) {
      if (r.scenario == scen) seed_sets[r.system].insert(r.seed);
    }
    const std::multiset<std::uint64_t>* reference = nullptr;
    for (const std::string& sys : systems) {
      const auto it = seed_sets.find(sys);
      if (it == seed_sets.end())
        throw ReportError("system " + sys + " has no runs for scenario " + scen);
      if (reference == nullptr) {
        reference = &it->second;
      } else if (it->second != *reference) {
        throw ReportError("seed sets differ between systems for scenario " + scen);
      }
    }

    std::map<std::string, int> wins;
    std::set<std::uint64_t> distinct_seeds;
    for (const RunRecord& r : runs) {
      if (r.scenario == scen) distinct_seeds.insert(r.seed);
    }
    for (const std::uint64_t seed : distinct_seeds) {
      double best = -1.0;
      std::string winner;
      bool unique = false;
      for (const RunRecord& r : runs) {
        if (r.scenario != scen || r.seed != seed) continue;
        if (r.report.warm_rate_pct > best) {
          best = r.report.warm_rate_pct;
          winner = r.system;
          unique = true;
        } else if (r.report.warm_rate_pct == best) {
          unique = false;
        }
      }
      if (unique) ++wins[winner];
    }

    for (const std::string& sys : systems) {
      ComparisonRow row;
      row.system = sys;
      row.scenario = scen;
      double warm_sum = 0.0, resp_sum = 0.0, queue_sum = 0.0;
      for (const RunRecord& r : runs) {
        if (r.scenario != scen || r.system != sys) continue;
        ++row.runs;
        warm_sum += r.report.warm_rate_pct;
        resp_sum += r.report.mean_response_ms;
        queue_sum += r.report.mean_queue_depth;
      }
      row.mean_warm_rate_pct = warm_sum / row.runs;
      row.mean_response_ms = resp_sum / row.runs;
      row.mean_queue_depth = queue_sum / row.runs;
      row.wins = wins[sys];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ReportError("cannot write " + path.string());
  out << "system,scenario,runs,mean_warm_rate_pct,wins,mean_response_ms,mean_queue_depth\n";
  for (const ComparisonRow& r : rows) {
    out << r.system << ',' << r.scenario << ',' << r.runs << ','
        << fmt("%.4f", r.mean_warm_rate_pct) << ',' << r.wins << ','
        << fmt("%.4f", r.mean_response_ms) << ',' << fmt("%.6f", r.mean_queue_depth) << '\n';
  }
  if (!out) throw ReportError("write failed for " + path.string());
}

std::string format_comparison_text(const std::vector<ComparisonRow>& rows) {
  std::string s;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-18s %-10s %5s %10s %6s %14s %12s\n", "system", "scenario",
                "runs", "warm%", "wins", "response ms", "queue");
  s += buf;
  for (const ComparisonRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-18s %-10s %5d %10.2f %6d %14.2f %12.3f\n", r.system.c_str(),
                  r.scenario.c_str(), r.runs, r.mean_warm_rate_pct, r.wins, r.mean_response_ms,
                  r.mean_queue_depth);
    s += buf;
  }
  return s;
}

}  // namespace faascamp::report
