#include <fstream>
#include <sstream>

#include "json.hpp"
#include "uavsim/errors.hpp"
#include "uavsim/runner.hpp"

namespace uavsim::run {

namespace {

using nlohmann::json;

// Every getter falls back to the compiled-in default, so a config file
// only needs the keys it overrides.
template <typename T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json color_json(const sense::ColorRgb& c) {
  return json::array({c.r, c.g, c.b});
}

sense::ColorRgb color_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError("config: color must be an [r, g, b] array");
  }
  return {j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(),
          j[2].get<std::uint8_t>()};
}

geo::GeoPoint geopoint_from(const json& j) {
  geo::GeoPoint p;
  get(j, "latitude_deg", p.latitude_deg);
  get(j, "longitude_deg", p.longitude_deg);
  get(j, "altitude_m", p.altitude_m);
  return p;
}

json geopoint_json(const geo::GeoPoint& p) {
  return {{"latitude_deg", p.latitude_deg},
          {"longitude_deg", p.longitude_deg},
          {"altitude_m", p.altitude_m}};
}

nav::PidGains gains_from(const json& j, const nav::PidGains& defaults) {
  nav::PidGains g = defaults;
  get(j, "kp", g.kp);
  get(j, "ki", g.ki);
  get(j, "kd", g.kd);
  get(j, "integrator_limit", g.integrator_limit);
  get(j, "output_limit", g.output_limit);
  return g;
}

json gains_json(const nav::PidGains& g) {
  return {{"kp", g.kp},
          {"ki", g.ki},
          {"kd", g.kd},
          {"integrator_limit", g.integrator_limit},
          {"output_limit", g.output_limit}};
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  plan.origin = {13.3500, 74.7900, 0.0};
  plan.waypoints = {geo::from_enu(plan.origin, {60.0, 40.0, 0.0})};
  plan.drop_location = geo::from_enu(plan.origin, {120.0, 80.0, 0.0});
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: JSON parse error: ") + e.what());
  }

  ExperimentConfig c;
  if (j.contains("world")) {
    const auto& w = j["world"];
    get(w, "timestep_s", c.world.timestep_s);
    get(w, "max_horizontal_speed_ms", c.world.max_horizontal_speed_ms);
    get(w, "max_vertical_speed_ms", c.world.max_vertical_speed_ms);
    get(w, "velocity_time_constant_s", c.world.velocity_time_constant_s);
    get(w, "wind_mean_east_ms", c.world.wind.mean_east_ms);
    get(w, "wind_mean_north_ms", c.world.wind.mean_north_ms);
    get(w, "wind_gust_std_ms", c.world.wind.gust_std_ms);
    get(w, "rng_seed", c.world.rng_seed);
  }
  if (j.contains("gps")) {
    const auto& g = j["gps"];
    get(g, "bias_time_constant_s", c.gps.bias_time_constant_s);
    get(g, "bias_std_m", c.gps.bias_std_m);
    get(g, "white_noise_std_m", c.gps.white_noise_std_m);
    get(g, "satellite_count", c.gps.satellite_count);
    get(g, "min_satellites_for_auto", c.gps.min_satellites_for_auto);
    get(g, "fix_rate_hz", c.gps.fix_rate_hz);
  }
  if (j.contains("camera")) {
    const auto& cam = j["camera"];
    get(cam, "width_px", c.camera.width_px);
    get(cam, "height_px", c.camera.height_px);
    get(cam, "horizontal_fov_deg", c.camera.horizontal_fov_deg);
    get(cam, "frame_rate_hz", c.camera.frame_rate_hz);
  }
  if (j.contains("target")) {
    const auto& t = j["target"];
    get(t, "outer_size_m", c.target.outer_size_m);
    if (t.contains("rings")) {
      c.target.rings.clear();
      for (const auto& r : t["rings"]) {
        c.target.rings.push_back(
            {r.at("radius_fraction").get<double>(), color_from(r.at("color"))});
      }
    }
    if (t.contains("primary_color")) {
      c.target.primary_color = color_from(t["primary_color"]);
    }
  }
  if (j.contains("scene")) {
    const auto& s = j["scene"];
    if (s.contains("base_color")) c.scene.base_color = color_from(s["base_color"]);
    get(s, "clutter_count", c.scene.clutter_count);
    get(s, "clutter_min_px", c.scene.clutter_min_px);
    get(s, "clutter_max_px", c.scene.clutter_max_px);
    if (s.contains("clutter_palette")) {
      c.scene.clutter_palette.clear();
      for (const auto& col : s["clutter_palette"]) {
        c.scene.clutter_palette.push_back(color_from(col));
      }
    }
    get(s, "brightness_scale", c.scene.brightness_scale);
    get(s, "noise_std", c.scene.noise_std);
    get(s, "target_hidden", c.scene.target_hidden);
  }
  if (j.contains("detector")) {
    const auto& d = j["detector"];
    auto bounds = [&](const char* key, det::ChannelBounds& b) {
      if (d.contains("color_window") && d["color_window"].contains(key)) {
        const auto& arr = d["color_window"][key];
        b.lo = arr[0].get<std::uint8_t>();
        b.hi = arr[1].get<std::uint8_t>();
      }
    };
    bounds("r", c.detector.color_window.r);
    bounds("g", c.detector.color_window.g);
    bounds("b", c.detector.color_window.b);
    get(d, "min_blob_px", c.detector.min_blob_px);
    get(d, "fill_ratio_lo", c.detector.fill_ratio_lo);
    get(d, "fill_ratio_hi", c.detector.fill_ratio_hi);
    get(d, "aspect_ratio_lo", c.detector.aspect_ratio_lo);
    get(d, "aspect_ratio_hi", c.detector.aspect_ratio_hi);
    get(d, "verification_fraction", c.detector.verification_fraction);
  }
  if (j.contains("plan")) {
    const auto& p = j["plan"];
    if (p.contains("origin")) c.plan.origin = geopoint_from(p["origin"]);
    if (p.contains("waypoints")) {
      c.plan.waypoints.clear();
      for (const auto& w : p["waypoints"]) {
        c.plan.waypoints.push_back(geopoint_from(w));
      }
    }
    if (p.contains("drop_location")) {
      c.plan.drop_location = geopoint_from(p["drop_location"]);
    }
    get(p, "cruise_altitude_m", c.plan.cruise_altitude_m);
    get(p, "waypoint_radius_m", c.plan.waypoint_radius_m);
    get(p, "handoff_threshold_m", c.plan.handoff_threshold_m);
    get(p, "align_tolerance_px", c.plan.align_tolerance_px);
    get(p, "align_hold_frames", c.plan.align_hold_frames);
    get(p, "search_timeout_s", c.plan.search_timeout_s);
    get(p, "preflight_timeout_s", c.plan.preflight_timeout_s);
    get(p, "gps_loss_timeout_s", c.plan.gps_loss_timeout_s);
    get(p, "search_speed_ms", c.plan.search_speed_ms);
    if (p.contains("mode")) {
      const std::string m = p["mode"].get<std::string>();
      if (m == "gps_only") {
        c.plan.mode = nav::MissionMode::GpsOnly;
      } else if (m == "vision_assisted") {
        c.plan.mode = nav::MissionMode::VisionAssisted;
      } else {
        throw ValidationError("config: plan.mode must be gps_only or vision_assisted");
      }
    }
  }
  if (j.contains("gains")) {
    const auto& g = j["gains"];
    if (g.contains("nav_horizontal")) {
      c.gains.nav_horizontal = gains_from(g["nav_horizontal"], c.gains.nav_horizontal);
    }
    if (g.contains("altitude")) {
      c.gains.altitude = gains_from(g["altitude"], c.gains.altitude);
    }
    if (g.contains("align_horizontal")) {
      c.gains.align_horizontal =
          gains_from(g["align_horizontal"], c.gains.align_horizontal);
    }
  }
  if (j.contains("airframe")) {
    const auto& a = j["airframe"];
    get(a, "total_mass_g", c.airframe.total_mass_g);
    get(a, "motor_count", c.airframe.motor_count);
    get(a, "prop_diameter_m", c.airframe.prop_diameter_m);
    get(a, "battery_capacity_ah", c.airframe.battery_capacity_ah);
    get(a, "avionics_current_a", c.airframe.avionics_current_a);
    get(a, "avionics_power_w", c.airframe.avionics_power_w);
    get(a, "air_density_kgm3", c.airframe.air_density_kgm3);
  }
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    get(s, "base_seed", c.base_seed);
    get(s, "count", c.seed_count);
  }
  get(j, "mission_time_limit_s", c.mission_time_limit_s);
  get(j, "surveyed_drop_coordinate", c.surveyed_drop_coordinate);

  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("config: cannot open '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["world"] = {{"timestep_s", world.timestep_s},
                {"max_horizontal_speed_ms", world.max_horizontal_speed_ms},
                {"max_vertical_speed_ms", world.max_vertical_speed_ms},
                {"velocity_time_constant_s", world.velocity_time_constant_s},
                {"wind_mean_east_ms", world.wind.mean_east_ms},
                {"wind_mean_north_ms", world.wind.mean_north_ms},
                {"wind_gust_std_ms", world.wind.gust_std_ms},
                {"rng_seed", world.rng_seed}};
  j["gps"] = {{"bias_time_constant_s", gps.bias_time_constant_s},
              {"bias_std_m", gps.bias_std_m},
              {"white_noise_std_m", gps.white_noise_std_m},
              {"satellite_count", gps.satellite_count},
              {"min_satellites_for_auto", gps.min_satellites_for_auto},
              {"fix_rate_hz", gps.fix_rate_hz}};
  j["camera"] = {{"width_px", camera.width_px},
                 {"height_px", camera.height_px},
                 {"horizontal_fov_deg", camera.horizontal_fov_deg},
                 {"frame_rate_hz", camera.frame_rate_hz}};
  json rings = json::array();
  for (const auto& r : target.rings) {
    rings.push_back(
        {{"radius_fraction", r.radius_fraction}, {"color", color_json(r.color)}});
  }
  j["target"] = {{"outer_size_m", target.outer_size_m},
                 {"rings", rings},
                 {"primary_color", color_json(target.primary_color)}};
  json palette = json::array();
  for (const auto& col : scene.clutter_palette) palette.push_back(color_json(col));
  j["scene"] = {{"base_color", color_json(scene.base_color)},
                {"clutter_count", scene.clutter_count},
                {"clutter_min_px", scene.clutter_min_px},
                {"clutter_max_px", scene.clutter_max_px},
                {"clutter_palette", palette},
                {"brightness_scale", scene.brightness_scale},
                {"noise_std", scene.noise_std},
                {"target_hidden", scene.target_hidden}};
  j["detector"] = {
      {"color_window",
       {{"r", {detector.color_window.r.lo, detector.color_window.r.hi}},
        {"g", {detector.color_window.g.lo, detector.color_window.g.hi}},
        {"b", {detector.color_window.b.lo, detector.color_window.b.hi}}}},
      {"min_blob_px", detector.min_blob_px},
      {"fill_ratio_lo", detector.fill_ratio_lo},
      {"fill_ratio_hi", detector.fill_ratio_hi},
      {"aspect_ratio_lo", detector.aspect_ratio_lo},
      {"aspect_ratio_hi", detector.aspect_ratio_hi},
      {"verification_fraction", detector.verification_fraction}};
  json waypoints = json::array();
  for (const auto& w : plan.waypoints) waypoints.push_back(geopoint_json(w));
  j["plan"] = {{"origin", geopoint_json(plan.origin)},
               {"waypoints", waypoints},
               {"drop_location", geopoint_json(plan.drop_location)},
               {"cruise_altitude_m", plan.cruise_altitude_m},
               {"waypoint_radius_m", plan.waypoint_radius_m},
               {"handoff_threshold_m", plan.handoff_threshold_m},
               {"align_tolerance_px", plan.align_tolerance_px},
               {"align_hold_frames", plan.align_hold_frames},
               {"search_timeout_s", plan.search_timeout_s},
               {"preflight_timeout_s", plan.preflight_timeout_s},
               {"gps_loss_timeout_s", plan.gps_loss_timeout_s},
               {"search_speed_ms", plan.search_speed_ms},
               {"mode", nav::mode_name(plan.mode)}};
  j["gains"] = {{"nav_horizontal", gains_json(gains.nav_horizontal)},
                {"altitude", gains_json(gains.altitude)},
                {"align_horizontal", gains_json(gains.align_horizontal)}};
  j["airframe"] = {{"total_mass_g", airframe.total_mass_g},
                   {"motor_count", airframe.motor_count},
                   {"prop_diameter_m", airframe.prop_diameter_m},
                   {"battery_capacity_ah", airframe.battery_capacity_ah},
                   {"avionics_current_a", airframe.avionics_current_a},
                   {"avionics_power_w", airframe.avionics_power_w},
                   {"air_density_kgm3", airframe.air_density_kgm3}};
  j["seeds"] = {{"base_seed", base_seed}, {"count", seed_count}};
  j["mission_time_limit_s"] = mission_time_limit_s;
  j["surveyed_drop_coordinate"] = surveyed_drop_coordinate;
  return j.dump(2);
}

}  // namespace uavsim::run
