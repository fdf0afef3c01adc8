// Command-line front end: trace preparation, single simulations, model
// training, and multi-system comparisons.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faascamp/engine.hpp"
#include "faascamp/experiment.hpp"
#include "faascamp/learn.hpp"
#include "faascamp/model.hpp"
#include "faascamp/report.hpp"
#include "faascamp/rng.hpp"
#include "faascamp/synth.hpp"
#include "faascamp/trace.hpp"

namespace {

namespace fs = std::filesystem;
using namespace faascamp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitSimulation = 4;

struct SourceOpts {
  std::string azure_csv;
  int synth_traces = 0;
  double synth_mobile_fraction = 0.0;
  int synth_day = 0;
};

void add_source_opts(CLI::App* cmd, SourceOpts& src) {
  cmd->add_option("--azure", src.azure_csv, "Azure-style per-minute CSV to read traces from");
  cmd->add_option("--synth-traces", src.synth_traces,
                  "generate this many synthetic traces instead of reading a CSV");
  cmd->add_option("--synth-mobile-fraction", src.synth_mobile_fraction,
                  "fraction of synthetic traces in the mobile class")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--synth-day", src.synth_day, "generation day for synthetic traces");
}

std::vector<trace::AzureTraceRow> load_rows(const SourceOpts& src, std::uint64_t seed) {
  const bool have_azure = !src.azure_csv.empty();
  const bool have_synth = src.synth_traces > 0;
  if (have_azure == have_synth)
    throw experiment::ExperimentError("give exactly one of --azure or --synth-traces");
  if (have_azure) return trace::load_azure_csv(src.azure_csv);

  trace::SynthParams p;
  p.num_traces = src.synth_traces;
  p.mobile_fraction = src.synth_mobile_fraction;
  p.day = src.synth_day;
  p.seed = seed;
  return trace::synth_traces(p);
}

fs::path resolve_out_dir(std::string flag_value) {
  if (flag_value.empty()) {
    if (const char* env = std::getenv("FAASCAMP_OUTPUT_DIR"); env != nullptr && *env != '\0')
      flag_value = env;
    else
      flag_value = ".";
  }
  fs::path dir(flag_value);
  fs::create_directories(dir);
  return dir;
}

void write_outcome_log(const fs::path& path, const sim::RunResult& result) {
  std::ofstream out(path);
  if (!out) throw report::ReportError("cannot write " + path.string());
  out << "seq,t_ms,tenant,workload,kind,wait_ms,init_ms,exec_ms\n";
  char buf[64];
  for (const sim::RequestOutcome& o : result.outcomes) {
    out << o.event.seq << ',' << o.event.t_ms << ',' << o.event.tenant_id << ','
        << o.event.workload_id << ',' << to_string(o.kind);
    std::snprintf(buf, sizeof(buf), ",%.3f,%.3f,%.3f\n", o.wait_ms, o.init_ms, o.exec_ms);
    out << buf;
  }
  if (!out) throw report::ReportError("write failed for " + path.string());
}

struct TracesExpandOpts {
  SourceOpts src;
  std::string out;
  std::uint64_t seed = 1;
  bool no_filter = false;
};

int run_traces_expand(const TracesExpandOpts& o) {
  std::vector<trace::AzureTraceRow> rows = load_rows(o.src, o.seed);
  if (!o.no_filter) rows = trace::filter_outliers(rows);

  const std::vector<trace::Workload> workloads = trace::default_workloads();
  const std::vector<int> workload_of =
      trace::assign_workloads(static_cast<int>(rows.size()), static_cast<int>(workloads.size()),
                              o.seed);
  std::vector<std::vector<trace::InvocationEvent>> streams;
  streams.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    streams.push_back(trace::expand_trace(rows[i], static_cast<int>(i), 0, workload_of[i]));
  const std::vector<trace::InvocationEvent> merged = trace::merge_streams(streams);
  trace::write_event_stream(o.out, merged);
  std::cout << "wrote " << merged.size() << " events from " << rows.size() << " traces to "
            << o.out << "\n";
  return kExitOk;
}

struct TracesSynthOpts {
  trace::SynthParams params;
  std::string out;
};

int run_traces_synth(const TracesSynthOpts& o) {
  const std::vector<trace::AzureTraceRow> rows = trace::synth_traces(o.params);
  trace::save_azure_csv(o.out, rows);
  std::cout << "wrote " << rows.size() << " synthetic traces to " << o.out << "\n";
  return kExitOk;
}

struct TracesSpikesOpts {
  SourceOpts src;
  std::string out;
  std::uint64_t seed = 1;
  int index = -1;  // <0 means aggregate over all usable rows
};

int run_traces_spikes(const TracesSpikesOpts& o) {
  const std::vector<trace::AzureTraceRow> rows =
      trace::filter_outliers(load_rows(o.src, o.seed));
  if (rows.empty()) throw trace::TraceError("no traces left after outlier filtering");

  if (o.index >= 0) {
    if (o.index >= static_cast<int>(rows.size()))
      throw trace::TraceError("trace index out of range, have " + std::to_string(rows.size()));
    const trace::SpikeReport rep = trace::detect_spikes(rows[static_cast<std::size_t>(o.index)]);
    trace::write_spike_cdf_csv(o.out, rep);
    std::cout << rows[static_cast<std::size_t>(o.index)].function_key << ": "
              << rep.spike_minutes.size() << " spikes, mean interval " << rep.mean_interval_min
              << " min\n";
    return kExitOk;
  }

  const auto cdf = trace::mean_spike_interval_cdf(rows);
  std::ofstream out(o.out);
  if (!out) throw trace::TraceError("cannot write " + o.out);
  out << "interval_minutes,cumulative_fraction\n";
  char buf[64];
  for (const auto& [interval, frac] : cdf) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.6f\n", interval, frac);
    out << buf;
  }
  if (!out) throw trace::TraceError("write failed for " + o.out);
  std::cout << "wrote aggregate spike-interval cdf over " << cdf.size() << " distinct values to "
            << o.out << "\n";
  return kExitOk;
}

struct SimulateOpts {
  SourceOpts src;
  std::string events_file;
  std::string config_file;
  std::string out_dir;
  std::string label = "node";
  std::string outcome_log;

  experiment::SimJobConfig job;
  std::string scenario;  // empty = flat single-tenant stream
  int tenants = 20;
  int window_minutes = 15;
  int mobile_ratio = 1;
  int regular_ratio = 1;
};

int run_simulate(SimulateOpts o, const CLI::App* cmd) {
  if (!o.config_file.empty()) {
    // Flags given alongside --config override the file.
    experiment::SimJobConfig file_cfg = experiment::load_sim_config(o.config_file);
    const experiment::SimJobConfig flag_cfg = o.job;
    o.job = file_cfg;
    if (cmd->count("--policy") > 0) o.job.policy = flag_cfg.policy;
    if (cmd->count("--model") > 0) o.job.model_path = flag_cfg.model_path;
    if (cmd->count("--seed") > 0) o.job.seed = flag_cfg.seed;
    if (cmd->count("--max-containers") > 0) o.job.pool.max_containers = flag_cfg.pool.max_containers;
    if (cmd->count("--reclaim") > 0) {
      o.job.pool.reclaim_capacity = flag_cfg.pool.reclaim_capacity;
      o.job.pool.reclaim_enabled = flag_cfg.pool.reclaim_enabled;
    }
    if (cmd->count("--warm-keepalive-ms") > 0)
      o.job.pool.warm_keepalive_ms = flag_cfg.pool.warm_keepalive_ms;
    if (cmd->count("--reclaim-keepalive-ms") > 0)
      o.job.pool.reclaim_keepalive_ms = flag_cfg.pool.reclaim_keepalive_ms;
    if (cmd->count("--restore-cost-ms") > 0)
      o.job.pool.restore_cost_ms = flag_cfg.pool.restore_cost_ms;
    if (cmd->count("--eviction-cost-ms") > 0)
      o.job.pool.eviction_decision_cost_ms = flag_cfg.pool.eviction_decision_cost_ms;
    if (cmd->count("--saturation") > 0) o.job.pool.on_saturation = flag_cfg.pool.on_saturation;
    if (cmd->count("--belady-window") > 0) o.job.belady_window = flag_cfg.belady_window;
    if (cmd->count("--audit") > 0) o.job.pool.audit = flag_cfg.pool.audit;
  }

  const std::vector<trace::Workload> workloads = trace::default_workloads();
  std::vector<trace::InvocationEvent> events;
  std::string source_desc;
  if (!o.events_file.empty()) {
    events = trace::read_event_stream(o.events_file);
    source_desc = "events:" + o.events_file;
  } else {
    const std::vector<trace::AzureTraceRow> rows = load_rows(o.src, o.job.seed);
    if (o.scenario.empty()) {
      events = experiment::build_flat_stream(rows, static_cast<int>(workloads.size()), o.job.seed);
      source_desc = "flat";
    } else {
      trace::ScenarioParams params;
      params.tenant_count = o.tenants;
      params.mobile_ratio = o.mobile_ratio;
      params.regular_ratio = o.regular_ratio;
      const experiment::ScenarioStream stream = experiment::build_scenario_stream(
          rows, experiment::parse_scenario(o.scenario), params,
          static_cast<int>(workloads.size()), o.window_minutes, o.job.seed);
      events = stream.events;
      source_desc = o.scenario;
    }
  }

  policy::PolicyParams pp;
  pp.belady_window = o.job.belady_window;
  pp.model_path = o.job.model_path;
  const auto pol = policy::make_policy(o.job.policy, pp);

  const sim::RunResult result = sim::run_simulation(events, workloads, o.job.pool, *pol);
  const report::SimulationReport rep = report::summarize(result);

  const fs::path dir = resolve_out_dir(o.out_dir);
  const std::vector<std::pair<std::string, std::string>> meta = {
      {"label", o.label},
      {"policy", o.job.policy},
      {"source", source_desc},
      {"seed", std::to_string(o.job.seed)},
  };
  report::write_report_csv(dir / "report.csv", rep, meta);
  std::ofstream txt(dir / "report.txt");
  txt << report::format_report_text(rep);
  if (!o.outcome_log.empty()) write_outcome_log(dir / o.outcome_log, result);

  std::cout << report::format_report_text(rep);
  return kExitOk;
}

struct TrainOpts {
  SourceOpts src;  // per-set source template; azure input uses one fixed set
  std::string samples_csv;
  std::string out_model;
  std::string save_samples;
  int sets = 50;
  int traces_per_set = 40;
  int cap_per_set = 60;
  int capture_stride = 1;
  std::string rollouts = "belady,lru";
  int pool_size = 8;
  std::uint64_t seed = 1;
  learn::TrainConfig train_cfg;
};

int run_train(const TrainOpts& o) {
  std::vector<learn::TrainingSample> samples;

  if (!o.samples_csv.empty()) {
    samples = learn::load_samples_csv(o.samples_csv);
  } else {
    learn::DataGenConfig gen;
    gen.workloads = trace::default_workloads();
    gen.pool.max_containers = o.pool_size;
    gen.pool.reclaim_enabled = false;
    gen.pool.reclaim_capacity = 0;
    gen.pool.warm_keepalive_ms = 600'000;
    gen.pool.on_saturation = sim::SaturationMode::Drop;
    gen.max_decisions_per_stream = o.cap_per_set;
    gen.capture_stride = o.capture_stride;
    gen.rollout_policies.clear();
    std::string rest = o.rollouts;
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      gen.rollout_policies.push_back(rest.substr(0, comma));
      rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    }

    std::vector<std::vector<trace::InvocationEvent>> streams;
    const Rng base(o.seed);
    for (int s = 0; s < o.sets; ++s) {
      const std::uint64_t set_seed = base.split("set", static_cast<std::uint64_t>(s)).next_u64();
      SourceOpts src = o.src;
      if (src.azure_csv.empty() && src.synth_traces == 0) src.synth_traces = o.traces_per_set;
      const std::vector<trace::AzureTraceRow> rows = load_rows(src, set_seed);
      streams.push_back(
          experiment::build_flat_stream(rows, static_cast<int>(gen.workloads.size()), set_seed));
    }
    samples = learn::generate_training_data(streams, gen);
  }

  if (!o.save_samples.empty()) learn::save_samples_csv(o.save_samples, samples);

  learn::TrainStats stats;
  const learn::MlpModel model =
      learn::train(samples, o.train_cfg, learn::default_layer_dims(), &stats);
  learn::save_model(model, o.out_model);

  std::cout << "trained on " << samples.size() << " samples\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "loss %.6f -> %.6f\n", stats.initial_loss, stats.final_loss);
  std::cout << buf;
  if (stats.best_epoch >= 0) {
    std::snprintf(buf, sizeof(buf), "best epoch %d (val score %.6f)\n", stats.best_epoch,
                  stats.val_score[static_cast<std::size_t>(stats.best_epoch)]);
    std::cout << buf;
  }
  bool grouped = false;
  for (const learn::TrainingSample& s : samples) {
    if (s.group_id >= 0) {
      grouped = true;
      break;
    }
  }
  if (grouped) {
    std::snprintf(buf, sizeof(buf), "decision accuracy %.4f\n",
                  learn::group_accuracy(model, samples));
    std::cout << buf;
  }
  std::cout << "model written to " << o.out_model << "\n";
  return kExitOk;
}

struct CompareOpts {
  SourceOpts src;
  std::vector<std::string> systems;
  std::string scenario = "mobile";
  std::string model_path;
  std::string out_dir;
  int tenants = 20;
  int window_minutes = 15;
  int mobile_ratio = 1;
  int regular_ratio = 1;
  int reps = 5;
  std::uint64_t seed = 1;
  int belady_window = 30;
};

int run_compare(const CompareOpts& o) {
  experiment::ExperimentSpec spec;
  spec.scenario = experiment::parse_scenario(o.scenario);
  spec.params.tenant_count = o.tenants;
  spec.params.mobile_ratio = o.mobile_ratio;
  spec.params.regular_ratio = o.regular_ratio;
  spec.repetitions = o.reps;
  spec.base_seed = o.seed;
  spec.window_minutes = o.window_minutes;
  for (const std::string& text : o.systems) {
    experiment::SystemSpec sys = experiment::parse_system_spec(text);
    sys.model_path = o.model_path;
    sys.belady_window = o.belady_window;
    spec.systems.push_back(std::move(sys));
  }

  const std::vector<trace::AzureTraceRow> rows = load_rows(o.src, o.seed);
  const experiment::ExperimentResult result = experiment::run_experiment(rows, spec);

  const fs::path dir = resolve_out_dir(o.out_dir);
  report::write_comparison_csv(dir / "comparison.csv", result.table);
  std::ofstream txt(dir / "comparison.txt");
  txt << report::format_comparison_text(result.table);
  std::cout << report::format_comparison_text(result.table);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-tenant serverless node simulator"};
  app.require_subcommand(1);

  // traces
  CLI::App* traces = app.add_subcommand("traces", "trace preparation and analysis");
  traces->require_subcommand(1);

  TracesExpandOpts expand_opts;
  CLI::App* expand = traces->add_subcommand("expand", "expand per-minute traces into an event stream");
  add_source_opts(expand, expand_opts.src);
  expand->add_option("--out", expand_opts.out, "event stream output file")->required();
  expand->add_option("--seed", expand_opts.seed, "workload assignment seed");
  expand->add_flag("--no-filter", expand_opts.no_filter, "keep outlier traces");

  TracesSynthOpts synth_opts;
  CLI::App* synth = traces->add_subcommand("synth", "generate synthetic traces");
  synth->add_option("--out", synth_opts.out, "CSV output file")->required();
  synth->add_option("--traces", synth_opts.params.num_traces, "number of traces");
  synth->add_option("--mobile-fraction", synth_opts.params.mobile_fraction,
                    "fraction of mobile-class traces")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--day", synth_opts.params.day, "generation day");
  synth->add_option("--seed", synth_opts.params.seed, "generator seed");

  TracesSpikesOpts spikes_opts;
  CLI::App* spikes = traces->add_subcommand("spikes", "spike interval analysis");
  add_source_opts(spikes, spikes_opts.src);
  spikes->add_option("--out", spikes_opts.out, "CDF csv output")->required();
  spikes->add_option("--index", spikes_opts.index, "report a single trace instead of the aggregate");
  spikes->add_option("--seed", spikes_opts.seed, "source seed (synthetic input)");

  // simulate
  SimulateOpts sim_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "run one node simulation");
  add_source_opts(simulate, sim_opts.src);
  simulate->add_option("--events", sim_opts.events_file, "replay a prepared event stream");
  simulate->add_option("--config", sim_opts.config_file, "key = value settings file");
  simulate->add_option("--policy", sim_opts.job.policy, "lru, lfu, gdsf, belady, or learned");
  simulate->add_option("--model", sim_opts.job.model_path, "model file for the learned policy");
  simulate->add_option("--seed", sim_opts.job.seed, "stream generation seed");
  simulate->add_option("--max-containers", sim_opts.job.pool.max_containers, "node capacity");
  int reclaim_slots = -1;
  simulate->add_option("--reclaim", reclaim_slots, "reclaim pool slots (0 disables)");
  simulate->add_option("--warm-keepalive-ms", sim_opts.job.pool.warm_keepalive_ms, "");
  simulate->add_option("--reclaim-keepalive-ms", sim_opts.job.pool.reclaim_keepalive_ms, "");
  simulate->add_option("--restore-cost-ms", sim_opts.job.pool.restore_cost_ms, "");
  simulate->add_option("--eviction-cost-ms", sim_opts.job.pool.eviction_decision_cost_ms,
                       "per-eviction decision latency added to the evicting request's wait");
  std::string saturation = "buffer";
  simulate->add_option("--saturation", saturation, "drop or buffer")
      ->check(CLI::IsMember({"drop", "buffer"}));
  simulate->add_option("--belady-window", sim_opts.job.belady_window, "oracle lookahead");
  bool audit_flag = false;
  simulate->add_flag("--audit", audit_flag, "run invariant checks after every event");
  simulate->add_option("--scenario", sim_opts.scenario, "regular, mobile, or mixed tenant mix");
  simulate->add_option("--tenants", sim_opts.tenants, "tenant count (scenario mode)");
  simulate->add_option("--window-minutes", sim_opts.window_minutes, "window length (scenario mode)");
  simulate->add_option("--mobile-ratio", sim_opts.mobile_ratio, "mixed scenario mobile share");
  simulate->add_option("--regular-ratio", sim_opts.regular_ratio, "mixed scenario regular share");
  simulate->add_option("--out-dir", sim_opts.out_dir,
                       "output directory (default $FAASCAMP_OUTPUT_DIR or .)");
  simulate->add_option("--label", sim_opts.label, "label recorded in the report");
  simulate->add_option("--log", sim_opts.outcome_log, "also write a per-request outcome log");

  // train
  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "train the eviction model");
  add_source_opts(train_cmd, train_opts.src);
  train_cmd->add_option("--samples", train_opts.samples_csv, "train from a sample CSV instead");
  train_cmd->add_option("--out", train_opts.out_model, "model output file")->required();
  train_cmd->add_option("--save-samples", train_opts.save_samples, "dump generated samples as CSV");
  train_cmd->add_option("--sets", train_opts.sets, "number of generated trace sets");
  train_cmd->add_option("--traces-per-set", train_opts.traces_per_set, "traces per generated set");
  train_cmd->add_option("--cap-per-set", train_opts.cap_per_set,
                        "max captured decisions per set (0 = all)");
  train_cmd->add_option("--capture-stride", train_opts.capture_stride,
                        "keep every k-th decision when capturing");
  train_cmd->add_option("--rollouts", train_opts.rollouts,
                        "comma-separated policies driving data-generation rollouts");
  train_cmd->add_option("--pool-size", train_opts.pool_size, "node capacity during data generation");
  train_cmd->add_option("--seed", train_opts.seed, "data generation seed");
  train_cmd->add_option("--epochs", train_opts.train_cfg.epochs, "");
  train_cmd->add_option("--batch-size", train_opts.train_cfg.batch_size, "");
  train_cmd->add_option("--lr", train_opts.train_cfg.learning_rate, "");
  train_cmd->add_option("--train-seed", train_opts.train_cfg.seed, "init and shuffle seed");
  train_cmd->add_option("--val-fraction", train_opts.train_cfg.validation_fraction,
                        "held-out group fraction; returns the best epoch's model")
      ->check(CLI::Range(0.0, 0.99));
  train_cmd->add_option("--patience", train_opts.train_cfg.patience,
                        "stop after this many epochs without validation improvement");

  // compare
  CompareOpts cmp_opts;
  CLI::App* compare_cmd = app.add_subcommand("compare", "run several systems over seeded scenarios");
  add_source_opts(compare_cmd, cmp_opts.src);
  compare_cmd
      ->add_option("--system", cmp_opts.systems,
                   "system spec LABEL:POLICY[:WARM_MS[:RECLAIM_MS]] (repeatable)")
      ->required();
  compare_cmd->add_option("--scenario", cmp_opts.scenario, "regular, mobile, or mixed");
  compare_cmd->add_option("--model", cmp_opts.model_path, "model for learned systems");
  compare_cmd->add_option("--tenants", cmp_opts.tenants, "");
  compare_cmd->add_option("--window-minutes", cmp_opts.window_minutes, "");
  compare_cmd->add_option("--mobile-ratio", cmp_opts.mobile_ratio, "");
  compare_cmd->add_option("--regular-ratio", cmp_opts.regular_ratio, "");
  compare_cmd->add_option("--reps", cmp_opts.reps, "seeded repetitions");
  compare_cmd->add_option("--seed", cmp_opts.seed, "base seed");
  compare_cmd->add_option("--belady-window", cmp_opts.belady_window, "");
  compare_cmd->add_option("--out-dir", cmp_opts.out_dir, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (expand->parsed()) return run_traces_expand(expand_opts);
    if (synth->parsed()) return run_traces_synth(synth_opts);
    if (spikes->parsed()) return run_traces_spikes(spikes_opts);
    if (simulate->parsed()) {
      sim_opts.job.pool.on_saturation =
          saturation == "drop" ? sim::SaturationMode::Drop : sim::SaturationMode::Buffer;
      sim_opts.job.pool.audit = audit_flag;
      if (reclaim_slots >= 0) {
        sim_opts.job.pool.reclaim_capacity = reclaim_slots;
        sim_opts.job.pool.reclaim_enabled = reclaim_slots > 0;
      }
      return run_simulate(sim_opts, simulate);
    }
    if (train_cmd->parsed()) return run_train(train_opts);
    if (compare_cmd->parsed()) return run_compare(cmp_opts);
  } catch (const sim::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
