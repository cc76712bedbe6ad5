// uavsim command-line front end: mission ensembles, performance tables and
// synthetic dataset generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavsim/detector.hpp"
#include "uavsim/errors.hpp"
#include "uavsim/performance.hpp"
#include "uavsim/runner.hpp"

namespace fs = std::filesystem;
using namespace uavsim;

namespace {

run::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return run::ExperimentConfig{};
  return run::ExperimentConfig::from_json_file(path);
}

std::vector<double> parse_throttles(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

int cmd_simulate(const std::string& config_path, const std::string& mode,
                 int seeds, long long base_seed, const std::string& out_dir,
                 bool dump_frames, bool trajectories, int threads) {
  run::ExperimentConfig cfg = load_config(config_path);
  if (seeds > 0) cfg.seed_count = seeds;
  if (base_seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(base_seed);
  fs::create_directories(out_dir);

  auto run_one_mode = [&](nav::MissionMode m) {
    std::vector<run::MissionResult> results;
    if (trajectories || dump_frames) {
      // Per-run artifacts wanted: run sequentially so each run gets its
      // own recorder and files.
      for (int i = 0; i < cfg.seed_count; ++i) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
        run::RunRecorder rec;
        rec.record_trajectory = trajectories;
        rec.record_events = trajectories;
        if (dump_frames) {
          rec.frame_dump_dir =
              (fs::path(out_dir) / ("frames_" + std::string(nav::mode_name(m)) +
                                    "_" + std::to_string(seed))).string();
          fs::create_directories(rec.frame_dump_dir);
        }
        results.push_back(run::run_mission(cfg, seed, m, &rec));
        if (trajectories) {
          const std::string stem = std::string(nav::mode_name(m)) + "_" +
                                   std::to_string(seed);
          std::ofstream tcsv(fs::path(out_dir) / ("trajectory_" + stem + ".csv"));
          run::write_trajectory_csv(rec, tcsv);
          std::ofstream ejson(fs::path(out_dir) / ("events_" + stem + ".jsonl"));
          run::write_events_jsonl(rec, ejson);
        }
      }
    } else {
      results = run::run_batch(cfg, m, threads);
    }
    return results;
  };

  std::vector<run::MissionResult> all;
  if (mode == "compare") {
    auto gps = run_one_mode(nav::MissionMode::GpsOnly);
    auto vis = run_one_mode(nav::MissionMode::VisionAssisted);
    run::ComparisonReport report;
    report.gps_only = run::aggregate(gps);
    report.vision = run::aggregate(vis);
    report.n_runs = cfg.seed_count;
    if (report.vision.mean_error_m <= 0.0) {
      throw Error("compare: vision mean error is zero; ratio undefined");
    }
    report.improvement_ratio =
        report.gps_only.mean_error_m / report.vision.mean_error_m;
    std::ofstream summary(fs::path(out_dir) / "summary.json");
    summary << run::comparison_report_json(report) << '\n';
    std::printf("gps_only:        mean %.3f m, median %.3f m, p95 %.3f m, aborts %.1f%%\n",
                report.gps_only.mean_error_m, report.gps_only.median_error_m,
                report.gps_only.p95_error_m, 100.0 * report.gps_only.abort_rate);
    std::printf("vision_assisted: mean %.3f m, median %.3f m, p95 %.3f m, aborts %.1f%%\n",
                report.vision.mean_error_m, report.vision.median_error_m,
                report.vision.p95_error_m, 100.0 * report.vision.abort_rate);
    std::printf("improvement_ratio: %.2f\n", report.improvement_ratio);
    all = std::move(gps);
    all.insert(all.end(), vis.begin(), vis.end());
  } else {
    const auto m = mode == "gps-only" ? nav::MissionMode::GpsOnly
                                      : nav::MissionMode::VisionAssisted;
    all = run_one_mode(m);
    const auto stats = run::aggregate(all);
    std::printf("%s: mean %.3f m, median %.3f m, p95 %.3f m, aborts %.1f%%\n",
                nav::mode_name(m), stats.mean_error_m, stats.median_error_m,
                stats.p95_error_m, 100.0 * stats.abort_rate);
  }
  std::ofstream runs_csv(fs::path(out_dir) / "runs.csv");
  run::write_results_csv(all, runs_csv);
  std::printf("wrote %s\n", (fs::path(out_dir) / "runs.csv").c_str());
  return 0;
}

int cmd_perf(const std::string& curve_path, const std::string& config_path,
             const std::string& throttle_list, const std::string& out_path) {
  const auto curve = perf::MotorPropCurve::from_csv_file(curve_path);
  perf::AirframeConfig airframe;
  if (!config_path.empty()) {
    airframe = run::ExperimentConfig::from_json_file(config_path).airframe;
  }
  std::vector<double> throttles;
  if (!throttle_list.empty()) {
    throttles = parse_throttles(throttle_list);
  } else {
    for (const auto& s : curve.samples) throttles.push_back(s.throttle);
  }
  const auto table = perf::table_report(curve, airframe, throttles);
  if (out_path.empty()) {
    perf::write_table_csv(table, std::cout);
  } else {
    std::ofstream out(out_path);
    perf::write_table_csv(table, out);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_dataset(const std::string& config_path, int frames,
                double target_fraction, const std::string& out_dir,
                bool self_eval) {
  run::ExperimentConfig cfg = load_config(config_path);
  sense::DatasetConfig dcfg;
  dcfg.frame_count = frames;
  dcfg.target_fraction = target_fraction;
  sense::TargetSpec target = cfg.target;  // centered under the sweep poses
  RandomStream stream = derive_stream(cfg.base_seed, 0xDA7A);
  const auto items =
      sense::generate_dataset(cfg.camera, target, cfg.scene, dcfg, stream);
  sense::write_dataset(items, out_dir);
  std::printf("wrote %d frames and manifest.json to %s\n", frames,
              out_dir.c_str());
  if (self_eval) {
    const auto report = det::evaluate(items, cfg.detector);
    std::ofstream out(fs::path(out_dir) / "eval_report.json");
    out << det::eval_report_json(report) << '\n';
    std::printf("reference detector: recall %.4f, precision %.4f, FP %d\n",
                report.recall, report.precision, report.false_positives);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavsim: two-stage precision payload delivery simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", mode = "compare";
  int seeds = 0, threads = 0;
  long long base_seed = -1;
  bool dump_frames = false, trajectories = false;

  auto* simulate = app.add_subcommand("simulate", "run mission ensembles");
  simulate->add_option("--config", config_path, "JSON config file");
  simulate->add_option("--mode", mode, "gps-only | vision | compare")
      ->check(CLI::IsMember({"gps-only", "vision", "compare"}));
  simulate->add_option("--seeds", seeds, "number of seeds (overrides config)");
  simulate->add_option("--base-seed", base_seed, "first seed (overrides config)");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--dump-frames", dump_frames, "dump rendered frames (PPM + sidecar)");
  simulate->add_flag("--trajectories", trajectories,
                     "write per-run trajectory CSV and event log");
  simulate->add_option("--threads", threads, "worker threads (0 = auto)");

  std::string curve_path, throttle_list, perf_out;
  auto* perf_cmd = app.add_subcommand("perf", "propulsion performance table");
  perf_cmd->add_option("--curve", curve_path, "motor curve CSV")->required();
  perf_cmd->add_option("--config", config_path, "JSON config (airframe section)");
  perf_cmd->add_option("--throttles", throttle_list,
                       "comma-separated throttle fractions (default: curve samples)");
  perf_cmd->add_option("--out", perf_out, "output CSV (default: stdout)");

  int frames = 1500;
  double target_fraction = 0.6;
  bool self_eval = false;
  auto* dataset = app.add_subcommand("dataset", "generate a synthetic eval set");
  dataset->add_option("--config", config_path, "JSON config file");
  dataset->add_option("--frames", frames, "number of frames");
  dataset->add_option("--target-fraction", target_fraction,
                      "fraction of frames containing the target");
  dataset->add_option("--out", out_dir, "output directory")->required();
  dataset->add_flag("--eval", self_eval,
                    "run the reference detector and write eval_report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(config_path, mode, seeds, base_seed, out_dir,
                          dump_frames, trajectories, threads);
    }
    if (perf_cmd->parsed()) {
      return cmd_perf(curve_path, config_path, throttle_list, perf_out);
    }
    if (dataset->parsed()) {
      return cmd_dataset(config_path, frames, target_fraction, out_dir,
                         self_eval);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
