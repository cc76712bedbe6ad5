#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/geo.hpp"
#include "uavsim/random.hpp"
#include "uavsim/worldsim.hpp"

namespace uavsim::sense {

/// GPS receiver error model: a slowly wandering first-order Gauss-Markov
/// horizontal bias plus white noise on every axis. The bias state lives in
/// the model and is propagated fix to fix; it initializes from the
/// stationary distribution on the first sample.
struct GpsModel {
  double bias_east_m = 0.0;
  double bias_north_m = 0.0;
  double bias_time_constant_s = 60.0;
  double bias_std_m = 1.8;
  double white_noise_std_m = 0.6;
  int satellite_count = 12;
  int min_satellites_for_auto = 8;  // autopilot gate for autonomous flight
  double fix_rate_hz = 5.0;
  bool bias_initialized = false;
  double last_fix_time_s = 0.0;

  void validate() const;
};

struct GpsFix {
  geo::EnuPoint estimated_position;
  int satellite_count = 0;
  bool valid_for_auto = false;
  double time_s = 0.0;
};

/// Samples one fix from the true state, advancing the model's bias state.
/// Draw count per call is fixed, so substreams stay aligned across runs.
GpsFix sample_gps(const sim::UavState& true_state, GpsModel& model,
                  RandomStream& noise);

/// Straight-down camera rigidly aligned with vehicle yaw.
struct CameraModel {
  int width_px = 1920;
  int height_px = 1080;
  double horizontal_fov_deg = 62.2;
  double frame_rate_hz = 30.0;

  void validate() const;
  double focal_px() const;
  double principal_x() const { return width_px / 2.0; }
  double principal_y() const { return height_px / 2.0; }
};

struct ColorRgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct TargetRing {
  double radius_fraction = 1.0;  // of outer_size/2
  ColorRgb color;
};

/// Ground target: concentric square rings on a flat board, largest ring
/// first. primary_color is what the detector's color verification keys on.
struct TargetSpec {
  geo::EnuPoint center{0.0, 0.0, 0.0};
  double outer_size_m = 1.0;
  std::vector<TargetRing> rings = {
      {1.00, {205, 35, 40}},   // outer red band
      {0.65, {235, 235, 235}}, // white band
      {0.32, {205, 35, 40}},   // red bull
  };
  ColorRgb primary_color{205, 35, 40};

  void validate() const;
};

/// Background/lighting/noise knobs for the synthetic ground scene.
struct SceneConfig {
  ColorRgb base_color{95, 125, 70};
  int clutter_count = 12;
  int clutter_min_px = 24;
  int clutter_max_px = 240;
  std::vector<ColorRgb> clutter_palette = {
      {60, 110, 55},    // dark green
      {150, 150, 150},  // gray
      {160, 150, 90},   // dry grass
      {90, 105, 130},   // blue-gray
      {130, 95, 60},    // brown
  };
  double brightness_scale = 1.0;  // global lighting multiplier, applied pre-noise
  double noise_std = 2.0;         // per-pixel gaussian sensor noise (0 disables)
  bool target_hidden = false;

  void validate() const;
};

struct TargetProjection {
  double center_x_px = 0.0;
  double center_y_px = 0.0;
  double apparent_size_px = 0.0;  // projected outer_size
};

/// Pinhole projection of the target center into the image. Returns absent
/// when the center falls outside the raster. Throws on a degenerate view
/// (altitude <= 0.1 m).
std::optional<TargetProjection> project_target(const CameraModel& camera,
                                               const sim::UavState& state,
                                               const TargetSpec& target);

struct FrameAnnotation {
  double center_x_px = 0.0;
  double center_y_px = 0.0;
  double size_px = 0.0;
};

/// One rendered camera frame, row-major RGB.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width*height*3
  double capture_time_s = 0.0;
  std::optional<FrameAnnotation> target_annotation;

  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

/// Paints the ground scene into `out` (buffer reused between calls):
/// background, clutter, target rings when visible, then sensor noise.
void render_frame(const CameraModel& camera, const sim::UavState& state,
                  const TargetSpec& target, const SceneConfig& scene,
                  RandomStream& noise, Frame& out);

Frame render_frame(const CameraModel& camera, const sim::UavState& state,
                   const TargetSpec& target, const SceneConfig& scene,
                   RandomStream& noise);

// ---- evaluation dataset ----

/// Axis-aligned pixel box, also the detector's bounding-box type.
struct PixelBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct DatasetItem {
  Frame frame;
  std::optional<PixelBox> truth_bbox;
};

/// Pose/lighting ranges for synthetic evaluation sets. Frames with the
/// target place its center uniformly inside the stated frustum fraction;
/// the rest hide the target so the set exercises true negatives.
struct DatasetConfig {
  int frame_count = 1500;
  double target_fraction = 0.6;
  double altitude_min_m = 20.0;
  double altitude_max_m = 30.0;
  double center_margin_frac = 0.92;  // of the half-frustum, keeps target on-frame
  double brightness_min = 0.62;
  double brightness_max = 1.15;

  void validate() const;
};

std::vector<DatasetItem> generate_dataset(const CameraModel& camera,
                                          const TargetSpec& target,
                                          const SceneConfig& scene,
                                          const DatasetConfig& cfg,
                                          RandomStream& stream);

// ---- frame/manifest output ----

/// Binary PPM (P6) image dump.
void write_ppm(const Frame& frame, const std::string& path);

/// PPM + JSON sidecar ({capture_time_s, annotation|null}).
void dump_frame(const Frame& frame, const std::string& path_without_ext);

/// Writes dataset images and the JSON manifest
/// ([{"image": path, "bbox": [x,y,w,h]|null}, ...]) into a directory.
void write_dataset(const std::vector<DatasetItem>& items,
                   const std::string& dir);

}  // namespace uavsim::sense
