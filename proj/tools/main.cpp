#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "imdrive/benchmark_plant.hpp"
#include "imdrive/errors.hpp"
#include "imdrive/sim/config.hpp"
#include "imdrive/sim/runner.hpp"
#include "imdrive/sim/serialize.hpp"

namespace fs = std::filesystem;
using imdrive::RunResult;
using imdrive::ScenarioConfig;

namespace {

void print_metrics(const imdrive::Metrics& m) {
  std::printf("  speed_rms_error      %.6g rad/s\n", m.speed_rms_error);
  std::printf("  speed_max_error      %.6g rad/s\n", m.speed_max_error);
  std::printf("  convergence_time     %.6g s\n", m.convergence_time);
  std::printf("  flux_rms_error       %.6g Wb\n", m.flux_rms_error);
  std::printf("  Rr_final_error       %.6g ohm\n", m.Rr_final_error);
  std::printf("  stability            %s\n",
              imdrive::to_string(m.stability_classification));
}

int write_outputs(const RunResult& res, const std::string& out_dir) {
  fs::create_directories(out_dir);
  imdrive::write_file(out_dir + "/run.csv", imdrive::records_to_csv(res.records));
  imdrive::write_file(out_dir + "/metrics.json", imdrive::metrics_to_json(res.metrics));
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const ScenarioConfig cfg = imdrive::load_config(config_path);
  const RunResult res = imdrive::run_scenario(cfg);
  write_outputs(res, out_dir);
  std::printf("simulate: %zu records -> %s\n", res.records.size(), out_dir.c_str());
  print_metrics(res.metrics);
  if (res.aborted) {
    std::fprintf(stderr, "FAIL: scenario aborted: %s\n", res.abort_reason.c_str());
    return 1;
  }
  std::printf("PASS: scenario completed\n");
  return 0;
}

int cmd_testplant(int mode, const std::string& out_dir) {
  const auto demo = imdrive::run_demo(static_cast<imdrive::DemoMode>(mode), 10.0, 1e-4);
  fs::create_directories(out_dir);
  std::string csv = "t,x1,x2,u\n";
  char buf[128];
  for (std::size_t k = 0; k < demo.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", demo.t[k],
                  demo.x[k][0], demo.x[k][1], demo.u[k]);
    csv += buf;
  }
  imdrive::write_file(out_dir + "/trajectory.csv", csv);
  std::printf("%s: %s\n", demo.pass ? "PASS" : "FAIL", demo.verdict.c_str());
  return demo.pass ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values, const std::string& out_dir) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw imdrive::ConfigError("config: cannot open " + config_path);
  nlohmann::json base;
  try {
    base = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw imdrive::ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }

  std::vector<std::string> keys;
  {
    std::stringstream ss(param);
    std::string piece;
    while (std::getline(ss, piece, '.')) {
      if (piece.empty()) throw imdrive::ConfigError("sweep: empty segment in --param");
      keys.push_back(piece);
    }
  }
  if (keys.empty()) throw imdrive::ConfigError("sweep: --param must name a config key");

  std::vector<std::string> vals;
  {
    std::stringstream ss(values);
    std::string piece;
    while (std::getline(ss, piece, ',')) vals.push_back(piece);
  }
  if (vals.empty()) throw imdrive::ConfigError("sweep: --values must be non-empty");

  // Patch, parse, and validate every variant up front so a bad value
  // fails the whole sweep before any run starts.
  std::vector<ScenarioConfig> cfgs;
  for (const auto& v : vals) {
    nlohmann::json j = base;
    nlohmann::json* slot = &j;
    for (const auto& key : keys) slot = &(*slot)[key];
    try {
      const nlohmann::json parsed = nlohmann::json::parse(v);
      *slot = parsed;
    } catch (const nlohmann::json::parse_error&) {
      *slot = v;  // not a JSON literal: treat as a string (e.g. mode names)
    }
    cfgs.push_back(imdrive::parse_config(j.dump()));
  }

  std::vector<std::future<RunResult>> futs;
  futs.reserve(cfgs.size());
  for (const auto& c : cfgs) {
    futs.push_back(std::async(std::launch::async, [c] { return imdrive::run_scenario(c); }));
  }

  int rc = 0;
  for (std::size_t i = 0; i < futs.size(); ++i) {
    const RunResult res = futs[i].get();
    const std::string dir = out_dir + "/sweep_" + std::to_string(i);
    write_outputs(res, dir);
    std::printf("%s %s=%s speed_rms=%.6g flux_rms=%.6g conv=%.6g %s\n",
                res.aborted ? "FAIL" : "PASS", param.c_str(), vals[i].c_str(),
                res.metrics.speed_rms_error, res.metrics.flux_rms_error,
                res.metrics.convergence_time,
                imdrive::to_string(res.metrics.stability_classification));
    if (res.aborted) {
      std::fprintf(stderr, "  aborted: %s\n", res.abort_reason.c_str());
      rc = 1;
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-step induction motor drive simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", param, values;
  int mode = 1;

  auto* sim = app.add_subcommand("simulate", "run one scenario from a JSON config");
  sim->add_option("--config", config_path, "scenario config path")->required();
  sim->add_option("--out", out_dir, "output directory (run.csv, metrics.json)");

  auto* tp = app.add_subcommand("testplant", "second-order benchmark demonstration");
  tp->add_option("--mode", mode, "1 = state feedback, 2 = disturbed, 3 = with SMC")
      ->check(CLI::Range(1, 3))
      ->required();
  tp->add_option("--out", out_dir, "output directory (trajectory.csv)");

  auto* sw = app.add_subcommand("sweep", "run a scenario once per parameter value");
  sw->add_option("--config", config_path, "scenario config path")->required();
  sw->add_option("--param", param, "dotted config path, e.g. observer.k_R")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--out", out_dir, "output root (sweep_<i>/...)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir);
    if (tp->parsed()) return cmd_testplant(mode, out_dir);
    return cmd_sweep(config_path, param, values, out_dir);
  } catch (const imdrive::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
