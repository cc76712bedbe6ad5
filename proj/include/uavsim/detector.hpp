#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "uavsim/sensors.hpp"

namespace uavsim::det {

/// Detector output contract: bounding box plus its center pixel.
struct Detection {
  sense::PixelBox bbox;
  double center_x_px = 0.0;  // always the bbox geometric center
  double center_y_px = 0.0;
  double confidence = 0.0;   // in-window color fraction of the verified ROI
};

struct ChannelBounds {
  std::uint8_t lo = 0;
  std::uint8_t hi = 255;
};

/// Inclusive per-channel RGB bounds for the target's primary color.
struct ColorWindow {
  ChannelBounds r{110, 255};
  ChannelBounds g{0, 80};
  ChannelBounds b{0, 80};

  bool contains(std::uint8_t cr, std::uint8_t cg, std::uint8_t cb) const {
    return cr >= r.lo && cr <= r.hi && cg >= g.lo && cg <= g.hi &&
           cb >= b.lo && cb <= b.hi;
  }
};

struct DetectorConfig {
  ColorWindow color_window;
  int min_blob_px = 60;
  double fill_ratio_lo = 0.20;
  double fill_ratio_hi = 0.95;
  double aspect_ratio_lo = 0.5;
  double aspect_ratio_hi = 2.0;
  double verification_fraction = 0.20;

  void validate() const;
};

/// Reference color/shape target detector. Pipeline: color mask,
/// 4-connected components, size filter, largest-component bounding box,
/// aspect/fill shape gate, then ROI color verification. Emits at most one
/// Detection; absence is a valid result. Pure function of (frame, config).
std::optional<Detection> detect(const sense::Frame& frame,
                                const DetectorConfig& config);

/// Second verification step of the pipeline: true iff the fraction of
/// bbox pixels inside the color window reaches verification_fraction.
/// Throws on a degenerate (zero-area) box.
bool verify_roi(const sense::Frame& frame, const sense::PixelBox& bbox,
                const DetectorConfig& config);

/// Intersection-over-union of two pixel boxes.
double iou(const sense::PixelBox& a, const sense::PixelBox& b);

struct EvalReport {
  int frames_total = 0;
  int frames_with_target = 0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double recall = 0.0;
  double precision = 0.0;
};

/// Runs the detector over an annotated dataset. A detection on an
/// annotated frame is a true positive iff IoU with the truth box reaches
/// iou_threshold; any other detection counts as a false positive.
EvalReport evaluate(std::span<const sense::DatasetItem> dataset,
                    const DetectorConfig& config, double iou_threshold = 0.5);

/// EvalReport as a JSON string (all fields).
std::string eval_report_json(const EvalReport& report);

}  // namespace uavsim::det
