#include "uavsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "uavsim/errors.hpp"

namespace uavsim::run {

namespace {

// Substream salts; fixed so realizations pair across modes.
constexpr std::uint64_t kWorldSalt = 0x1;
constexpr std::uint64_t kGpsSalt = 0x2;
constexpr std::uint64_t kCameraSalt = 0x3;

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double idx = p * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

}  // namespace

void ExperimentConfig::validate() const {
  world.validate();
  gps.validate();
  camera.validate();
  target.validate();
  scene.validate();
  detector.validate();
  plan.validate();
  gains.nav_horizontal.validate();
  gains.altitude.validate();
  gains.align_horizontal.validate();
  airframe.validate();
  if (seed_count < 1) {
    throw ValidationError("ExperimentConfig: seed_count must be >= 1");
  }
  if (mission_time_limit_s <= 0.0) {
    throw ValidationError("ExperimentConfig: mission_time_limit_s must be > 0");
  }
}

MissionResult run_mission(const ExperimentConfig& config, std::uint64_t seed,
                          nav::MissionMode mode, RunRecorder* recorder) {
  config.validate();

  const std::uint64_t mixed_seed = seed ^ config.world.rng_seed;
  RandomStream world_stream = derive_stream(mixed_seed, kWorldSalt);
  RandomStream gps_stream = derive_stream(mixed_seed, kGpsSalt);
  RandomStream camera_stream = derive_stream(mixed_seed, kCameraSalt);

  // The target sits at the configured drop location; the coordinate handed
  // to navigation optionally carries the as-surveyed GPS error of that
  // coordinate (drawn first so both modes share it).
  nav::MissionPlan plan = config.plan;
  plan.mode = mode;
  geo::EnuPoint target_enu =
      geo::to_enu(config.plan.origin, config.plan.drop_location);
  target_enu.up_m = 0.0;
  sense::TargetSpec target = config.target;
  target.center = target_enu;
  {
    geo::EnuPoint drop = target_enu;
    drop.up_m = geo::to_enu(config.plan.origin, config.plan.drop_location).up_m;
    const double se = config.gps.bias_std_m * gps_stream.gaussian() +
                      config.gps.white_noise_std_m * gps_stream.gaussian();
    const double sn = config.gps.bias_std_m * gps_stream.gaussian() +
                      config.gps.white_noise_std_m * gps_stream.gaussian();
    if (config.surveyed_drop_coordinate) {
      drop.east_m += se;
      drop.north_m += sn;
    }
    plan.drop_location = geo::from_enu(config.plan.origin, drop);
  }

  sense::GpsModel gps_model = config.gps;
  sim::UavState state;  // at the ENU origin, on the ground
  nav::MissionState mission;
  std::vector<nav::MissionEvent> events;
  sense::Frame frame;  // render buffer, reused
  MissionResult result;
  result.seed = seed;
  result.mode = mode;

  const double dt = config.world.timestep_s;
  const int gps_every = std::max(
      1, static_cast<int>(std::lround(1.0 / (config.gps.fix_rate_hz * dt))));
  const double frame_interval = 1.0 / config.camera.frame_rate_hz;
  double next_frame_time = 0.0;
  int frame_counter = 0;

  sense::GpsFix fix;
  bool have_fix = false;

  const long max_steps =
      static_cast<long>(std::lround(config.mission_time_limit_s / dt));
  for (long step = 0; step < max_steps; ++step) {
    const double t = state.time_s;
    if (step % gps_every == 0) {
      fix = sense::sample_gps(state, gps_model, gps_stream);
      have_fix = true;
    }
    if (!have_fix) continue;

    const sense::Frame* frame_ptr = nullptr;
    std::optional<det::Detection> detection;
    if (t >= next_frame_time - 1e-9) {
      next_frame_time += frame_interval;
      const bool vision_phase = mission.phase == nav::Phase::VisionSearch ||
                                mission.phase == nav::Phase::Aligning;
      if (mode == nav::MissionMode::VisionAssisted && vision_phase) {
        sense::render_frame(config.camera, state, target, config.scene,
                            camera_stream, frame);
        detection = det::detect(frame, config.detector);
        frame_ptr = &frame;
        ++result.frames_processed;
        if (detection) ++result.detections;
        if (recorder && !recorder->frame_dump_dir.empty()) {
          char name[64];
          std::snprintf(name, sizeof(name), "frame_%06d", frame_counter);
          sense::dump_frame(frame,
                            (std::filesystem::path(recorder->frame_dump_dir) /
                             name).string());
        }
        ++frame_counter;
      }
    }

    events.clear();
    const sim::VelocityCommand cmd =
        nav::mission_step(mission, plan, config.gains, fix, frame_ptr,
                          detection, config.camera, state.yaw_rad, t, events);
    for (const auto& ev : events) {
      if (ev.kind == nav::MissionEvent::Kind::PayloadRelease) {
        result.release_time_s = ev.time_s;
        result.landing_error_m =
            std::hypot(state.position.east_m - target_enu.east_m,
                       state.position.north_m - target_enu.north_m);
      }
      if (recorder && recorder->record_events) {
        recorder->events.push_back(ev);
      }
    }
    if (recorder && recorder->record_trajectory) {
      recorder->trajectory.push_back({t, state.position.east_m,
                                      state.position.north_m,
                                      state.position.up_m, state.vel_east_ms,
                                      state.vel_north_ms, state.vel_up_ms,
                                      mission.phase});
    }

    if (mission.phase == nav::Phase::Landed) {
      return result;
    }
    if (mission.phase == nav::Phase::Aborted) {
      result.aborted = true;
      result.abort_reason = mission.abort_reason;
      return result;
    }
    state = sim::step(state, cmd, config.world, world_stream);
  }
  result.aborted = true;
  result.abort_reason = "mission time limit exceeded";
  return result;
}

std::vector<MissionResult> run_batch(const ExperimentConfig& config,
                                     nav::MissionMode mode, int threads) {
  config.validate();
  const int n = config.seed_count;
  std::vector<MissionResult> results(static_cast<std::size_t>(n));
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, n);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      results[static_cast<std::size_t>(i)] =
          run_mission(config, config.base_seed + static_cast<std::uint64_t>(i),
                      mode);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

ModeStats aggregate(const std::vector<MissionResult>& results) {
  ModeStats s;
  s.n_runs = static_cast<int>(results.size());
  std::vector<double> errors;
  int aborted = 0;
  for (const auto& r : results) {
    if (r.aborted) {
      ++aborted;
    } else if (r.landing_error_m) {
      errors.push_back(*r.landing_error_m);
    }
  }
  s.abort_rate = results.empty()
                     ? 0.0
                     : static_cast<double>(aborted) / results.size();
  if (!errors.empty()) {
    double sum = 0.0;
    for (double e : errors) sum += e;
    s.mean_error_m = sum / static_cast<double>(errors.size());
    s.median_error_m = percentile(errors, 0.5);
    s.p95_error_m = percentile(errors, 0.95);
  }
  return s;
}

ComparisonReport run_comparison(const ExperimentConfig& config, int threads) {
  const auto gps_results = run_batch(config, nav::MissionMode::GpsOnly, threads);
  const auto vis_results =
      run_batch(config, nav::MissionMode::VisionAssisted, threads);
  ComparisonReport report;
  report.gps_only = aggregate(gps_results);
  report.vision = aggregate(vis_results);
  report.n_runs = config.seed_count;
  if (report.gps_only.abort_rate >= 1.0 || report.vision.abort_rate >= 1.0) {
    throw Error("run_comparison: a mode aborted every run; nothing to compare");
  }
  if (report.vision.mean_error_m <= 0.0) {
    throw Error("run_comparison: vision mean error is zero; ratio undefined");
  }
  report.improvement_ratio =
      report.gps_only.mean_error_m / report.vision.mean_error_m;
  return report;
}

void write_results_csv(const std::vector<MissionResult>& results,
                       std::ostream& out) {
  out << "seed,mode,landing_error_m,release_time_s,aborted,frames,detections\n";
  for (const auto& r : results) {
    out << r.seed << ',' << nav::mode_name(r.mode) << ',';
    if (r.landing_error_m) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", *r.landing_error_m);
      out << buf;
    }
    out << ',';
    if (r.release_time_s) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", *r.release_time_s);
      out << buf;
    }
    out << ',' << (r.aborted ? 1 : 0) << ',' << r.frames_processed << ','
        << r.detections << '\n';
  }
}

std::vector<MissionResult> read_results_csv(std::istream& in) {
  std::vector<MissionResult> results;
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("results CSV: empty input");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    MissionResult r;
    std::getline(ss, field, ',');
    r.seed = std::stoull(field);
    std::getline(ss, field, ',');
    r.mode = field == "gps_only" ? nav::MissionMode::GpsOnly
                                 : nav::MissionMode::VisionAssisted;
    std::getline(ss, field, ',');
    if (!field.empty()) r.landing_error_m = std::stod(field);
    std::getline(ss, field, ',');
    if (!field.empty()) r.release_time_s = std::stod(field);
    std::getline(ss, field, ',');
    r.aborted = field == "1";
    std::getline(ss, field, ',');
    r.frames_processed = std::stoi(field);
    std::getline(ss, field, ',');
    r.detections = std::stoi(field);
    results.push_back(std::move(r));
  }
  return results;
}

std::string comparison_report_json(const ComparisonReport& report) {
  auto mode_json = [](const ModeStats& s) {
    return nlohmann::json{{"mean_error_m", s.mean_error_m},
                          {"median_error_m", s.median_error_m},
                          {"p95_error_m", s.p95_error_m},
                          {"abort_rate", s.abort_rate},
                          {"n_runs", s.n_runs}};
  };
  nlohmann::json j;
  j["n_runs"] = report.n_runs;
  j["modes"]["gps_only"] = mode_json(report.gps_only);
  j["modes"]["vision_assisted"] = mode_json(report.vision);
  j["improvement_ratio"] = report.improvement_ratio;
  return j.dump(2);
}

void write_trajectory_csv(const RunRecorder& recorder, std::ostream& out) {
  out << "time,east,north,up,ve,vn,vu,mode\n";
  char buf[256];
  for (const auto& row : recorder.trajectory) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%s\n",
                  row.time_s, row.east_m, row.north_m, row.up_m, row.ve_ms,
                  row.vn_ms, row.vu_ms, nav::phase_name(row.phase));
    out << buf;
  }
}

void write_events_jsonl(const RunRecorder& recorder, std::ostream& out) {
  for (const auto& ev : recorder.events) {
    nlohmann::json j;
    j["time"] = ev.time_s;
    j["phase"] = nav::phase_name(ev.to);
    j["event"] = ev.kind == nav::MissionEvent::Kind::PayloadRelease
                     ? "payload_release"
                     : "phase_change";
    j["detail"] = ev.detail.empty()
                      ? nlohmann::json(nullptr)
                      : nlohmann::json(ev.detail);
    out << j.dump() << '\n';
  }
}

}  // namespace uavsim::run
