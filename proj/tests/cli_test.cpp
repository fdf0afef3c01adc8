#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "faascamp/learn.hpp"
#include "faascamp/model.hpp"
#include "faascamp/trace.hpp"

#ifndef FAASCAMP_CLI_PATH
#error "FAASCAMP_CLI_PATH must point at the faascamp binary"
#endif

using namespace faascamp;

namespace {

namespace fs = std::filesystem;

const fs::path kWorkDir = fs::temp_directory_path() / "faascamp_cli_test";

std::string cli() { return std::string(FAASCAMP_CLI_PATH); }

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

int run_capture(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = cli() + " " + args + " > " + stdout_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = kWorkDir / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("synth_traces_are_byte_identical_per_seed") {
  const fs::path dir = fresh_dir("synth");
  const fs::path a = dir / "a.csv";
  const fs::path b = dir / "b.csv";
  const fs::path c = dir / "c.csv";

  CHECK(run("traces synth --out " + a.string() + " --traces 10 --seed 5") == 0);
  CHECK(run("traces synth --out " + b.string() + " --traces 10 --seed 5") == 0);
  CHECK(run("traces synth --out " + c.string() + " --traces 10 --seed 6") == 0);

  const std::string bytes_a = read_file(a);
  REQUIRE_FALSE(bytes_a.empty());
  CHECK(bytes_a == read_file(b));
  CHECK(bytes_a != read_file(c));

  CHECK(trace::load_azure_csv(a).size() == 10);
}

TEST_CASE("expand_writes_a_strictly_increasing_single_tenant_event_stream") {
  const fs::path dir = fresh_dir("expand");
  const fs::path csv = dir / "traces.csv";
  const fs::path events = dir / "events.csv";

  REQUIRE(run("traces synth --out " + csv.string() + " --traces 8 --seed 2") == 0);
  CHECK(run("traces expand --azure " + csv.string() + " --out " + events.string() + " --seed 2") ==
        0);

  const std::vector<trace::InvocationEvent> stream = trace::read_event_stream(events);
  REQUIRE_FALSE(stream.empty());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    CHECK(stream[i].tenant_id == 0);
    CHECK(stream[i].seq == static_cast<std::int64_t>(i));
    if (i > 0) CHECK(stream[i].t_ms > stream[i - 1].t_ms);
  }
}

TEST_CASE("simulate_writes_report_files_and_reruns_are_byte_identical") {
  const fs::path dir1 = fresh_dir("sim1");
  const fs::path dir2 = fresh_dir("sim2");
  const std::string flags =
      " --synth-traces 12 --seed 3 --policy lru --max-containers 8 --out-dir ";

  CHECK(run("simulate" + flags + dir1.string()) == 0);
  CHECK(run("simulate" + flags + dir2.string()) == 0);

  const std::string report = read_file(dir1 / "report.csv");
  REQUIRE_FALSE(report.empty());
  CHECK(report.rfind("# label: node\n", 0) == 0);
  CHECK(report.find("# policy: lru\n") != std::string::npos);
  CHECK(report.find("# source: flat\n") != std::string::npos);
  CHECK(report.find("# seed: 3\n") != std::string::npos);
  CHECK(report.find("warm_rate_pct,") != std::string::npos);

  CHECK(report == read_file(dir2 / "report.csv"));
  CHECK_FALSE(read_file(dir1 / "report.txt").empty());
}

TEST_CASE("simulate_honors_the_output_dir_environment_fallback") {
  const fs::path dir = fresh_dir("sim_env");
  const std::string cmd = "FAASCAMP_OUTPUT_DIR=" + dir.string() + " " + cli() +
                          " simulate --synth-traces 8 --seed 1 --max-containers 4 > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(fs::exists(dir / "report.txt"));
}

TEST_CASE("simulate_replays_a_prepared_event_stream") {
  const fs::path dir = fresh_dir("sim_events");
  const fs::path csv = dir / "traces.csv";
  const fs::path events = dir / "events.csv";
  REQUIRE(run("traces synth --out " + csv.string() + " --traces 8 --seed 4") == 0);
  REQUIRE(run("traces expand --azure " + csv.string() + " --out " + events.string()) == 0);

  CHECK(run("simulate --events " + events.string() + " --max-containers 6 --out-dir " +
            dir.string()) == 0);
  const std::string report = read_file(dir / "report.csv");
  CHECK(report.find("# source: events:" + events.string() + "\n") != std::string::npos);
}

TEST_CASE("simulate_config_file_sets_the_job_and_flags_override_it") {
  const fs::path dir = fresh_dir("sim_config");
  const fs::path conf = dir / "job.conf";
  {
    std::ofstream out(conf);
    out << "policy = lfu\nmax_containers = 6\nseed = 9\n";
  }

  const std::string base = "simulate --synth-traces 8 --config " + conf.string() + " --out-dir ";
  CHECK(run(base + dir.string()) == 0);
  std::string report = read_file(dir / "report.csv");
  CHECK(report.find("# policy: lfu\n") != std::string::npos);
  CHECK(report.find("# seed: 9\n") != std::string::npos);

  CHECK(run(base + dir.string() + " --policy gdsf") == 0);
  report = read_file(dir / "report.csv");
  CHECK(report.find("# policy: gdsf\n") != std::string::npos);
}

TEST_CASE("exit_codes_distinguish_usage_input_and_simulation_errors") {
  const fs::path dir = fresh_dir("exits");

  CHECK(run("") == 2);                       // a subcommand is required
  CHECK(run("simulate --bogus-flag 1") == 2);
  CHECK(run("traces synth --traces 4") == 2);  // --out is required

  CHECK(run("simulate --events " + (dir / "missing.csv").string()) == 3);
  CHECK(run("train --samples " + (dir / "missing.csv").string() + " --out " +
            (dir / "m.bin").string()) == 3);
  CHECK(run("simulate --synth-traces 6 --policy fifo") == 3);
  CHECK(run("simulate --synth-traces 6 --azure x.csv") == 3);  // both sources given

  CHECK(run("simulate --synth-traces 6 --max-containers 0 --out-dir " + dir.string()) == 4);
}

TEST_CASE("train_produces_a_model_the_learned_policy_can_load") {
  const fs::path dir = fresh_dir("train");
  const fs::path model = dir / "model.bin";
  const fs::path samples = dir / "samples.csv";
  const fs::path log = dir / "train.log";

  const int rc = run_capture(
      "train --sets 2 --traces-per-set 8 --cap-per-set 10 --pool-size 4 --rollouts lru"
      " --epochs 2 --seed 11 --out " +
          model.string() + " --save-samples " + samples.string(),
      log);
  REQUIRE(rc == 0);

  const std::string output = read_file(log);
  CHECK(output.find("trained on ") != std::string::npos);
  CHECK(output.find("loss ") != std::string::npos);
  CHECK(output.find("decision accuracy ") != std::string::npos);
  CHECK(output.find("model written to " + model.string()) != std::string::npos);

  const learn::MlpModel loaded = learn::load_model(model);
  CHECK(loaded.layer_dims == learn::default_layer_dims());

  const std::vector<learn::TrainingSample> dumped = learn::load_samples_csv(samples);
  REQUIRE_FALSE(dumped.empty());
  CHECK(dumped.front().features.size() == static_cast<std::size_t>(learn::default_layer_dims().front()));

  CHECK(run("simulate --synth-traces 10 --seed 4 --policy learned --model " + model.string() +
            " --max-containers 4 --out-dir " + dir.string()) == 0);
  CHECK(read_file(dir / "report.csv").find("# policy: learned\n") != std::string::npos);
}

TEST_CASE("compare_writes_the_comparison_table") {
  const fs::path dir = fresh_dir("compare");
  const int rc = run(
      "compare --synth-traces 12 --synth-mobile-fraction 1.0 --scenario mobile --tenants 3"
      " --window-minutes 20 --reps 2 --seed 2 --system camp-2-1:lru --system vanilla-3-0:lru"
      " --out-dir " +
      dir.string());
  REQUIRE(rc == 0);

  const std::string csv = read_file(dir / "comparison.csv");
  REQUIRE_FALSE(csv.empty());
  CHECK(csv.rfind("system,scenario,runs,mean_warm_rate_pct,wins,mean_response_ms,mean_queue_depth\n",
                  0) == 0);
  CHECK(csv.find("camp-2-1,mobile,2,") != std::string::npos);
  CHECK(csv.find("vanilla-3-0,mobile,2,") != std::string::npos);
  CHECK_FALSE(read_file(dir / "comparison.txt").empty());
}
