#include "uavsim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "uavsim/errors.hpp"

namespace uavsim::sense {

void GpsModel::validate() const {
  if (bias_std_m < 0.0 || white_noise_std_m < 0.0) {
    throw ValidationError("GpsModel: noise stds must be >= 0");
  }
  if (bias_time_constant_s <= 0.0) {
    throw ValidationError("GpsModel: bias_time_constant_s must be > 0");
  }
  if (satellite_count < 0) {
    throw ValidationError("GpsModel: satellite_count must be >= 0");
  }
  if (min_satellites_for_auto < 4) {
    throw ValidationError("GpsModel: min_satellites_for_auto must be >= 4");
  }
  if (fix_rate_hz <= 0.0) {
    throw ValidationError("GpsModel: fix_rate_hz must be > 0");
  }
}

GpsFix sample_gps(const sim::UavState& true_state, GpsModel& model,
                  RandomStream& noise) {
  model.validate();
  const double t = true_state.time_s;

  if (!model.bias_initialized) {
    model.bias_east_m = model.bias_std_m * noise.gaussian();
    model.bias_north_m = model.bias_std_m * noise.gaussian();
    model.bias_initialized = true;
  } else {
    const double dt = t - model.last_fix_time_s;
    if (dt > 0.0) {
      const double a = std::exp(-dt / model.bias_time_constant_s);
      const double drive = model.bias_std_m * std::sqrt(1.0 - a * a);
      model.bias_east_m = model.bias_east_m * a + drive * noise.gaussian();
      model.bias_north_m = model.bias_north_m * a + drive * noise.gaussian();
    } else {
      // keep stream alignment: one draw per axis either way
      noise.gaussian();
      noise.gaussian();
    }
  }
  model.last_fix_time_s = t;

  GpsFix fix;
  fix.estimated_position.east_m = true_state.position.east_m +
                                  model.bias_east_m +
                                  model.white_noise_std_m * noise.gaussian();
  fix.estimated_position.north_m = true_state.position.north_m +
                                   model.bias_north_m +
                                   model.white_noise_std_m * noise.gaussian();
  fix.estimated_position.up_m =
      true_state.position.up_m + model.white_noise_std_m * noise.gaussian();
  fix.satellite_count = model.satellite_count;
  fix.valid_for_auto = model.satellite_count >= model.min_satellites_for_auto;
  fix.time_s = t;
  return fix;
}

void CameraModel::validate() const {
  if (width_px <= 0 || height_px <= 0) {
    throw ValidationError("CameraModel: dimensions must be > 0");
  }
  if (!(horizontal_fov_deg > 10.0 && horizontal_fov_deg < 170.0)) {
    throw ValidationError("CameraModel: fov outside (10, 170) deg");
  }
  if (frame_rate_hz <= 0.0) {
    throw ValidationError("CameraModel: frame_rate_hz must be > 0");
  }
}

double CameraModel::focal_px() const {
  return (width_px / 2.0) /
         std::tan(horizontal_fov_deg / 2.0 * M_PI / 180.0);
}

void TargetSpec::validate() const {
  if (outer_size_m <= 0.0) {
    throw ValidationError("TargetSpec: outer_size_m must be > 0");
  }
  if (rings.empty()) {
    throw ValidationError("TargetSpec: needs at least one ring");
  }
  if (rings.front().radius_fraction != 1.0) {
    throw ValidationError("TargetSpec: first ring fraction must be 1.0");
  }
  for (std::size_t i = 1; i < rings.size(); ++i) {
    if (rings[i].radius_fraction >= rings[i - 1].radius_fraction ||
        rings[i].radius_fraction <= 0.0) {
      throw ValidationError(
          "TargetSpec: ring fractions must be strictly decreasing in (0, 1]");
    }
  }
}

void SceneConfig::validate() const {
  if (clutter_count < 0) {
    throw ValidationError("SceneConfig: clutter_count must be >= 0");
  }
  if (clutter_count > 0 &&
      (clutter_palette.empty() || clutter_min_px <= 0 ||
       clutter_max_px < clutter_min_px)) {
    throw ValidationError("SceneConfig: bad clutter configuration");
  }
  if (brightness_scale <= 0.0) {
    throw ValidationError("SceneConfig: brightness_scale must be > 0");
  }
  if (noise_std < 0.0) {
    throw ValidationError("SceneConfig: noise_std must be >= 0");
  }
}

std::optional<TargetProjection> project_target(const CameraModel& camera,
                                               const sim::UavState& state,
                                               const TargetSpec& target) {
  camera.validate();
  target.validate();
  const double alt = state.position.up_m;
  if (alt <= 0.1) {
    throw ValidationError("project_target: degenerate view, altitude <= 0.1 m");
  }

  const double off_e = target.center.east_m - state.position.east_m;
  const double off_n = target.center.north_m - state.position.north_m;
  const double c = std::cos(state.yaw_rad);
  const double s = std::sin(state.yaw_rad);
  // Camera x = starboard, camera y = aft; yaw measured clockwise from north.
  const double x_cam = off_e * c - off_n * s;
  const double y_cam = -(off_e * s + off_n * c);

  const double f = camera.focal_px();
  TargetProjection proj;
  proj.center_x_px = camera.principal_x() + f * x_cam / alt;
  proj.center_y_px = camera.principal_y() + f * y_cam / alt;
  proj.apparent_size_px = f * target.outer_size_m / alt;
  if (proj.center_x_px < 0.0 || proj.center_x_px >= camera.width_px ||
      proj.center_y_px < 0.0 || proj.center_y_px >= camera.height_px) {
    return std::nullopt;
  }
  return proj;
}

namespace {

ColorRgb scale_color(const ColorRgb& c, double k) {
  auto s = [k](std::uint8_t v) {
    return static_cast<std::uint8_t>(
        std::clamp(std::lround(v * k), 0L, 255L));
  };
  return {s(c.r), s(c.g), s(c.b)};
}

void fill_rect(Frame& f, int x0, int y0, int x1, int y1, ColorRgb c) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, f.width - 1);
  y1 = std::min(y1, f.height - 1);
  for (int y = y0; y <= y1; ++y) {
    std::uint8_t* row = f.pixels.data() + 3 * (static_cast<std::size_t>(y) * f.width + x0);
    for (int x = x0; x <= x1; ++x) {
      *row++ = c.r;
      *row++ = c.g;
      *row++ = c.b;
    }
  }
}

// Lightweight per-frame index generator for noise-table lookups.
struct NoiseIndexer {
  std::uint64_t s;
  explicit NoiseIndexer(std::uint64_t seed) : s(seed | 1) {}
  std::uint32_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<std::uint32_t>(s);
  }
};

}  // namespace

void render_frame(const CameraModel& camera, const sim::UavState& state,
                  const TargetSpec& target, const SceneConfig& scene,
                  RandomStream& noise, Frame& out) {
  camera.validate();
  scene.validate();

  out.width = camera.width_px;
  out.height = camera.height_px;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  out.capture_time_s = state.time_s;
  out.target_annotation.reset();

  const double k = scene.brightness_scale;
  fill_rect(out, 0, 0, out.width - 1, out.height - 1,
            scale_color(scene.base_color, k));

  for (int i = 0; i < scene.clutter_count; ++i) {
    const int w = scene.clutter_min_px +
                  static_cast<int>(noise.uniform_index(static_cast<std::uint32_t>(
                      scene.clutter_max_px - scene.clutter_min_px + 1)));
    const int h = scene.clutter_min_px +
                  static_cast<int>(noise.uniform_index(static_cast<std::uint32_t>(
                      scene.clutter_max_px - scene.clutter_min_px + 1)));
    const int cx = static_cast<int>(noise.uniform_index(out.width));
    const int cy = static_cast<int>(noise.uniform_index(out.height));
    const ColorRgb c = scale_color(
        scene.clutter_palette[noise.uniform_index(
            static_cast<std::uint32_t>(scene.clutter_palette.size()))],
        k);
    fill_rect(out, cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2, c);
  }

  if (!scene.target_hidden) {
    const auto proj = project_target(camera, state, target);
    if (proj) {
      // Concentric square rings, painted per pixel by Chebyshev distance;
      // the innermost ring containing the pixel wins.
      const double half = proj->apparent_size_px / 2.0;
      const int x0 = static_cast<int>(std::floor(proj->center_x_px - half));
      const int x1 = static_cast<int>(std::ceil(proj->center_x_px + half));
      const int y0 = static_cast<int>(std::floor(proj->center_y_px - half));
      const int y1 = static_cast<int>(std::ceil(proj->center_y_px + half));
      std::vector<ColorRgb> ring_colors(target.rings.size());
      for (std::size_t i = 0; i < target.rings.size(); ++i) {
        ring_colors[i] = scale_color(target.rings[i].color, k);
      }
      for (int y = std::max(y0, 0); y <= std::min(y1, out.height - 1); ++y) {
        for (int x = std::max(x0, 0); x <= std::min(x1, out.width - 1); ++x) {
          const double d = std::max(std::abs(x + 0.5 - proj->center_x_px),
                                    std::abs(y + 0.5 - proj->center_y_px));
          int hit = -1;
          for (std::size_t i = 0; i < target.rings.size(); ++i) {
            if (d <= target.rings[i].radius_fraction * half) {
              hit = static_cast<int>(i);
            } else {
              break;
            }
          }
          if (hit >= 0) {
            std::uint8_t* px = out.pixels.data() +
                               3 * (static_cast<std::size_t>(y) * out.width + x);
            px[0] = ring_colors[hit].r;
            px[1] = ring_colors[hit].g;
            px[2] = ring_colors[hit].b;
          }
        }
      }
      out.target_annotation = FrameAnnotation{
          proj->center_x_px, proj->center_y_px, proj->apparent_size_px};
    }
  }

  if (scene.noise_std > 0.0) {
    const auto& table = gaussian_table();
    NoiseIndexer idx(noise.next_u64());
    const float std_f = static_cast<float>(scene.noise_std);
    std::uint8_t* p = out.pixels.data();
    const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
    for (std::size_t i = 0; i < n; ++i) {
      const float nval = table[idx.next() & 0xFFFF] * std_f;
      const int d = static_cast<int>(std::lround(nval));
      for (int ch = 0; ch < 3; ++ch) {
        const int v = static_cast<int>(p[ch]) + d;
        p[ch] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      }
      p += 3;
    }
  }
}

Frame render_frame(const CameraModel& camera, const sim::UavState& state,
                   const TargetSpec& target, const SceneConfig& scene,
                   RandomStream& noise) {
  Frame f;
  render_frame(camera, state, target, scene, noise, f);
  return f;
}

void DatasetConfig::validate() const {
  if (frame_count <= 0) {
    throw ValidationError("DatasetConfig: frame_count must be > 0");
  }
  if (target_fraction < 0.0 || target_fraction > 1.0) {
    throw ValidationError("DatasetConfig: target_fraction outside [0, 1]");
  }
  if (altitude_min_m <= 0.1 || altitude_max_m < altitude_min_m) {
    throw ValidationError("DatasetConfig: bad altitude range");
  }
  if (brightness_min <= 0.0 || brightness_max < brightness_min) {
    throw ValidationError("DatasetConfig: bad brightness range");
  }
  if (center_margin_frac <= 0.0 || center_margin_frac > 1.0) {
    throw ValidationError("DatasetConfig: center_margin_frac outside (0, 1]");
  }
}

std::vector<DatasetItem> generate_dataset(const CameraModel& camera,
                                          const TargetSpec& target,
                                          const SceneConfig& scene,
                                          const DatasetConfig& cfg,
                                          RandomStream& stream) {
  camera.validate();
  target.validate();
  scene.validate();
  cfg.validate();

  const int with_target =
      static_cast<int>(std::lround(cfg.frame_count * cfg.target_fraction));
  std::vector<DatasetItem> items;
  items.reserve(cfg.frame_count);

  const double f = camera.focal_px();
  for (int i = 0; i < cfg.frame_count; ++i) {
    const bool has_target = i < with_target;
    const double alt = stream.uniform(cfg.altitude_min_m, cfg.altitude_max_m);

    sim::UavState pose;
    pose.position.up_m = alt;
    pose.yaw_rad = stream.uniform(0.0, 2.0 * M_PI);
    pose.time_s = static_cast<double>(i);

    // Place the camera so the target center lands inside the frustum
    // margin; the offset is expressed in camera axes then rotated out.
    const double half_e = cfg.center_margin_frac * camera.principal_x() / f * alt;
    const double half_n = cfg.center_margin_frac * camera.principal_y() / f * alt;
    const double x_cam = stream.uniform(-half_e, half_e);
    const double y_cam = stream.uniform(-half_n, half_n);
    const double c = std::cos(pose.yaw_rad);
    const double s = std::sin(pose.yaw_rad);
    const double off_e = x_cam * c - y_cam * s;
    const double off_n = -x_cam * s - y_cam * c;
    pose.position.east_m = target.center.east_m - off_e;
    pose.position.north_m = target.center.north_m - off_n;

    SceneConfig frame_scene = scene;
    frame_scene.brightness_scale =
        stream.uniform(cfg.brightness_min, cfg.brightness_max);
    frame_scene.target_hidden = !has_target;

    DatasetItem item;
    render_frame(camera, pose, target, frame_scene, stream, item.frame);
    if (item.frame.target_annotation) {
      const auto& a = *item.frame.target_annotation;
      item.truth_bbox = PixelBox{a.center_x_px - a.size_px / 2.0,
                                 a.center_y_px - a.size_px / 2.0, a.size_px,
                                 a.size_px};
    }
    items.push_back(std::move(item));
  }
  return items;
}

void write_ppm(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("write_ppm: cannot open '" + path + "'");
  }
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
}

void dump_frame(const Frame& frame, const std::string& path_without_ext) {
  write_ppm(frame, path_without_ext + ".ppm");
  nlohmann::json j;
  j["capture_time_s"] = frame.capture_time_s;
  if (frame.target_annotation) {
    const auto& a = *frame.target_annotation;
    j["annotation"] = {{"center_x_px", a.center_x_px},
                       {"center_y_px", a.center_y_px},
                       {"size_px", a.size_px}};
  } else {
    j["annotation"] = nullptr;
  }
  std::ofstream side(path_without_ext + ".json");
  side << j.dump(2) << '\n';
}

void write_dataset(const std::vector<DatasetItem>& items,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "images");
  nlohmann::json manifest = nlohmann::json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "images/%05zu.ppm", i);
    write_ppm(items[i].frame, (fs::path(dir) / name).string());
    nlohmann::json entry;
    entry["image"] = name;
    if (items[i].truth_bbox) {
      const auto& b = *items[i].truth_bbox;
      entry["bbox"] = {b.x, b.y, b.width, b.height};
    } else {
      entry["bbox"] = nullptr;
    }
    manifest.push_back(entry);
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace uavsim::sense
