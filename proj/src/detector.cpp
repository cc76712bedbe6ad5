#include "uavsim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "json.hpp"
#include "uavsim/errors.hpp"

namespace uavsim::det {

void DetectorConfig::validate() const {
  if (color_window.r.lo > color_window.r.hi ||
      color_window.g.lo > color_window.g.hi ||
      color_window.b.lo > color_window.b.hi) {
    throw ValidationError("DetectorConfig: color window bounds not ordered");
  }
  if (min_blob_px < 1) {
    throw ValidationError("DetectorConfig: min_blob_px must be >= 1");
  }
  if (fill_ratio_lo > fill_ratio_hi || aspect_ratio_lo > aspect_ratio_hi) {
    throw ValidationError("DetectorConfig: ratio bounds not ordered");
  }
  if (!(verification_fraction > 0.0 && verification_fraction < 1.0)) {
    throw ValidationError(
        "DetectorConfig: verification_fraction outside (0, 1)");
  }
}

namespace {

struct Component {
  int count = 0;
  int min_x = 0, max_x = 0, min_y = 0, max_y = 0;
};

}  // namespace

std::optional<Detection> detect(const sense::Frame& frame,
                                const DetectorConfig& config) {
  config.validate();
  const int w = frame.width;
  const int h = frame.height;
  if (w <= 0 || h <= 0 ||
      frame.pixels.size() != static_cast<std::size_t>(w) * h * 3) {
    throw ValidationError("detect: frame raster does not match dimensions");
  }

  // 1. binary mask of pixels inside the color window
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h);
  {
    const std::uint8_t* p = frame.pixels.data();
    for (std::size_t i = 0; i < mask.size(); ++i, p += 3) {
      mask[i] = config.color_window.contains(p[0], p[1], p[2]) ? 1 : 0;
    }
  }

  // 2-4. 4-connected components over the mask; keep the largest one that
  // passes the size filter.
  std::vector<std::int32_t> stack;
  Component best;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start]) continue;
    Component comp;
    comp.min_x = comp.max_x = static_cast<int>(start % w);
    comp.min_y = comp.max_y = static_cast<int>(start / w);
    stack.clear();
    stack.push_back(static_cast<std::int32_t>(start));
    mask[start] = 0;
    while (!stack.empty()) {
      const std::int32_t i = stack.back();
      stack.pop_back();
      const int x = i % w;
      const int y = i / w;
      ++comp.count;
      comp.min_x = std::min(comp.min_x, x);
      comp.max_x = std::max(comp.max_x, x);
      comp.min_y = std::min(comp.min_y, y);
      comp.max_y = std::max(comp.max_y, y);
      if (x > 0 && mask[i - 1]) { mask[i - 1] = 0; stack.push_back(i - 1); }
      if (x < w - 1 && mask[i + 1]) { mask[i + 1] = 0; stack.push_back(i + 1); }
      if (y > 0 && mask[i - w]) { mask[i - w] = 0; stack.push_back(i - w); }
      if (y < h - 1 && mask[i + w]) { mask[i + w] = 0; stack.push_back(i + w); }
    }
    if (comp.count >= config.min_blob_px && comp.count > best.count) {
      best = comp;
    }
  }
  if (best.count == 0) return std::nullopt;

  sense::PixelBox box{static_cast<double>(best.min_x),
                      static_cast<double>(best.min_y),
                      static_cast<double>(best.max_x - best.min_x + 1),
                      static_cast<double>(best.max_y - best.min_y + 1)};

  // 5. shape gate
  const double aspect = box.width / box.height;
  if (aspect < config.aspect_ratio_lo || aspect > config.aspect_ratio_hi) {
    return std::nullopt;
  }
  const double fill = best.count / (box.width * box.height);
  if (fill < config.fill_ratio_lo || fill > config.fill_ratio_hi) {
    return std::nullopt;
  }

  // 6. two-step verification over the ROI
  if (!verify_roi(frame, box, config)) {
    return std::nullopt;
  }

  Detection d;
  d.bbox = box;
  d.center_x_px = box.x + box.width / 2.0;
  d.center_y_px = box.y + box.height / 2.0;
  // confidence: in-window fraction of the verified ROI
  {
    int in_window = 0;
    const int x0 = static_cast<int>(box.x);
    const int y0 = static_cast<int>(box.y);
    const int x1 = x0 + static_cast<int>(box.width) - 1;
    const int y1 = y0 + static_cast<int>(box.height) - 1;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::uint8_t* p = frame.at(x, y);
        if (config.color_window.contains(p[0], p[1], p[2])) ++in_window;
      }
    }
    d.confidence = in_window / (box.width * box.height);
  }
  return d;
}

bool verify_roi(const sense::Frame& frame, const sense::PixelBox& bbox,
                const DetectorConfig& config) {
  config.validate();
  const int x0 = static_cast<int>(std::floor(bbox.x));
  const int y0 = static_cast<int>(std::floor(bbox.y));
  const int x1 = static_cast<int>(std::ceil(bbox.x + bbox.width)) - 1;
  const int y1 = static_cast<int>(std::ceil(bbox.y + bbox.height)) - 1;
  if (bbox.width <= 0.0 || bbox.height <= 0.0) {
    throw ValidationError("verify_roi: degenerate bbox");
  }
  if (x0 < 0 || y0 < 0 || x1 >= frame.width || y1 >= frame.height) {
    throw ValidationError("verify_roi: bbox outside frame");
  }
  long total = 0;
  long in_window = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const std::uint8_t* p = frame.at(x, y);
      ++total;
      if (config.color_window.contains(p[0], p[1], p[2])) ++in_window;
    }
  }
  return static_cast<double>(in_window) / static_cast<double>(total) >=
         config.verification_fraction;
}

double iou(const sense::PixelBox& a, const sense::PixelBox& b) {
  const double ix0 = std::max(a.x, b.x);
  const double iy0 = std::max(a.y, b.y);
  const double ix1 = std::min(a.x + a.width, b.x + b.width);
  const double iy1 = std::min(a.y + a.height, b.y + b.height);
  const double iw = std::max(0.0, ix1 - ix0);
  const double ih = std::max(0.0, iy1 - iy0);
  const double inter = iw * ih;
  const double uni = a.width * a.height + b.width * b.height - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

EvalReport evaluate(std::span<const sense::DatasetItem> dataset,
                    const DetectorConfig& config, double iou_threshold) {
  if (dataset.empty()) {
    throw ValidationError("evaluate: dataset is empty");
  }
  EvalReport r;
  r.frames_total = static_cast<int>(dataset.size());
  for (const auto& item : dataset) {
    const auto detection = detect(item.frame, config);
    if (item.truth_bbox) {
      ++r.frames_with_target;
      if (detection && iou(detection->bbox, *item.truth_bbox) >= iou_threshold) {
        ++r.true_positives;
      } else {
        ++r.false_negatives;
        if (detection) ++r.false_positives;  // fired, but in the wrong place
      }
    } else if (detection) {
      ++r.false_positives;
    }
  }
  r.recall = r.frames_with_target > 0
                 ? static_cast<double>(r.true_positives) / r.frames_with_target
                 : 0.0;
  const int fired = r.true_positives + r.false_positives;
  r.precision =
      fired > 0 ? static_cast<double>(r.true_positives) / fired : 1.0;
  return r;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::json j;
  j["frames_total"] = report.frames_total;
  j["frames_with_target"] = report.frames_with_target;
  j["true_positives"] = report.true_positives;
  j["false_positives"] = report.false_positives;
  j["false_negatives"] = report.false_negatives;
  j["recall"] = report.recall;
  j["precision"] = report.precision;
  return j.dump(2);
}

}  // namespace uavsim::det
