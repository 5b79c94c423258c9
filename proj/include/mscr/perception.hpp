#pragma once
// Marker geometry from detections, detector evaluation, and a synthetic
// detector that stands in for the vision model inside the simulator.

#include <mscr/common.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace mscr::perception {

enum class MarkerClass { marker1 = 0, marker2 = 1, papilla = 2 };

inline constexpr std::array<MarkerClass, 3> kAllClasses{MarkerClass::marker1, MarkerClass::marker2,
                                                       MarkerClass::papilla};

inline std::string_view class_name(MarkerClass c) {
  switch (c) {
    case MarkerClass::marker1: return "marker1";
    case MarkerClass::marker2: return "marker2";
    case MarkerClass::papilla: return "papilla";
  }
  return "unknown";
}

inline MarkerClass class_from_name(std::string_view s) {
  for (auto c : kAllClasses)
    if (class_name(c) == s) return c;
  throw DomainError("unknown marker class '" + std::string(s) + "'");
}

struct BoundingBox {
  std::array<Vec2, 4> corners{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  MarkerClass cls = MarkerClass::marker1;
  double confidence = 1.0;

  static BoundingBox axis_aligned(Vec2 center, double width, double height, MarkerClass c,
                                  double confidence = 1.0) {
    const Vec2 h(0.5 * width, 0.5 * height);
    BoundingBox b;
    b.corners = {center - h, Vec2(center.x() + h.x(), center.y() - h.y()), center + h,
                 Vec2(center.x() - h.x(), center.y() + h.y())};
    b.cls = c;
    b.confidence = confidence;
    return b;
  }

  /// Shoelace area of the corner polygon (signed).
  double signed_area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const Vec2& p = corners[i];
      const Vec2& q = corners[(i + 1) % 4];
      a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
  }

  void validate() const {
    for (const auto& c : corners) require(c.allFinite(), "bounding box corners must be finite");
    require(confidence >= 0.0 && confidence <= 1.0, "confidence must lie in [0, 1]");
    if (signed_area() == 0.0) throw DomainError("degenerate bounding box");
  }
};

/// Mean of the four corners.
inline Vec2 centroid(const BoundingBox& box) {
  box.validate();
  return 0.25 * (box.corners[0] + box.corners[1] + box.corners[2] + box.corners[3]);
}

struct AngleEstimate {
  double theta = 0.0;           // rad, (-pi, pi], positive counter-clockwise
  Vec2 v_approach = Vec2::Zero();  // marker2 -> papilla
  Vec2 v_body = Vec2::Zero();      // marker1 -> marker2
};

/// Signed angle that rotates the body direction onto the approach direction.
inline AngleEstimate angular_correction(const Vec2& marker1, const Vec2& marker2, const Vec2& papilla) {
  AngleEstimate a;
  a.v_body = marker2 - marker1;
  a.v_approach = papilla - marker2;
  if (a.v_body.squaredNorm() == 0.0) throw DomainError("marker1 and marker2 coincide");
  if (a.v_approach.squaredNorm() == 0.0) throw DomainError("marker2 and papilla coincide");
  const double cross = a.v_body.x() * a.v_approach.y() - a.v_body.y() * a.v_approach.x();
  const double dot = a.v_body.dot(a.v_approach);
  a.theta = std::atan2(cross, dot);
  if (a.theta == -kPi) a.theta = kPi;
  return a;
}

struct BestDetections {
  std::array<std::optional<BoundingBox>, 3> by_class;

  const std::optional<BoundingBox>& get(MarkerClass c) const {
    return by_class[static_cast<std::size_t>(c)];
  }
  bool complete() const {
    return std::all_of(by_class.begin(), by_class.end(), [](const auto& b) { return b.has_value(); });
  }
  std::vector<MarkerClass> missing() const {
    std::vector<MarkerClass> out;
    for (auto c : kAllClasses)
      if (!get(c)) out.push_back(c);
    return out;
  }
};

/// Highest-confidence box per class. Ties keep the earliest box.
inline BestDetections select_best(const std::vector<BoundingBox>& detections) {
  BestDetections best;
  for (const auto& d : detections) {
    auto& slot = best.by_class[static_cast<std::size_t>(d.cls)];
    if (!slot || d.confidence > slot->confidence) slot = d;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Rect {
  double x0, y0, x1, y1;
  double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
};

inline Rect bounding_rect(const BoundingBox& b) {
  Rect r{b.corners[0].x(), b.corners[0].y(), b.corners[0].x(), b.corners[0].y()};
  for (const auto& c : b.corners) {
    r.x0 = std::min(r.x0, c.x());
    r.y0 = std::min(r.y0, c.y());
    r.x1 = std::max(r.x1, c.x());
    r.y1 = std::max(r.y1, c.y());
  }
  return r;
}

/// Intersection over union of the axis-aligned hulls.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const Rect ra = bounding_rect(a), rb = bounding_rect(b);
  const Rect inter{std::max(ra.x0, rb.x0), std::max(ra.y0, rb.y0), std::min(ra.x1, rb.x1),
                   std::min(ra.y1, rb.y1)};
  const double i = inter.area();
  const double u = ra.area() + rb.area() - i;
  return u > 0.0 ? i / u : 0.0;
}

struct Frame {
  long index = 0;
  std::vector<BoundingBox> boxes;
};

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  std::vector<std::string> warnings;
};

inline double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace detail {

// Greedy one-to-one matching within a frame: predictions in descending
// confidence (stable on input order) each take the unmatched ground-truth box
// of the same class with the highest IoU, if that IoU reaches the threshold.
inline int match_frame(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& truth,
                       double threshold) {
  std::vector<std::size_t> order(pred.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return pred[a].confidence > pred[b].confidence; });
  std::vector<bool> used(truth.size(), false);
  int tp = 0;
  for (auto pi : order) {
    double best = -1.0;
    std::size_t best_j = truth.size();
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (used[j] || truth[j].cls != pred[pi].cls) continue;
      const double v = iou(pred[pi], truth[j]);
      if (v >= threshold && v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j < truth.size()) {
      used[best_j] = true;
      ++tp;
    }
  }
  return tp;
}

}  // namespace detail

/// Precision, recall and F1 over frames paired by index. Frames present on
/// only one side contribute all of their boxes as FP or FN.
inline DetectionMetrics evaluate_detector(const std::vector<Frame>& predictions,
                                          const std::vector<Frame>& ground_truth,
                                          double iou_threshold) {
  require(iou_threshold > 0.0 && iou_threshold < 1.0, "IoU threshold must lie in (0, 1)");
  DetectionMetrics m;
  static const std::vector<BoundingBox> kNone;
  const auto find = [](const std::vector<Frame>& fs, long idx) -> const std::vector<BoundingBox>& {
    for (const auto& f : fs)
      if (f.index == idx) return f.boxes;
    return kNone;
  };
  int n_pred = 0, n_truth = 0;
  std::vector<long> indices;
  for (const auto& f : predictions) indices.push_back(f.index);
  for (const auto& f : ground_truth) indices.push_back(f.index);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (long idx : indices) {
    const auto& p = find(predictions, idx);
    const auto& t = find(ground_truth, idx);
    n_pred += static_cast<int>(p.size());
    n_truth += static_cast<int>(t.size());
    m.true_positives += detail::match_frame(p, t, iou_threshold);
  }
  m.false_positives = n_pred - m.true_positives;
  m.false_negatives = n_truth - m.true_positives;
  if (n_pred == 0) {
    m.warnings.emplace_back("no predictions: precision reported as 0");
  } else {
    m.precision = static_cast<double>(m.true_positives) / n_pred;
  }
  if (n_truth == 0) {
    m.warnings.emplace_back("no ground-truth boxes: recall reported as 0");
  } else {
    m.recall = static_cast<double>(m.true_positives) / n_truth;
  }
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

inline DetectionMetrics evaluate_detector(const std::vector<BoundingBox>& predictions,
                                          const std::vector<BoundingBox>& ground_truth,
                                          double iou_threshold) {
  return evaluate_detector(std::vector<Frame>{{0, predictions}}, std::vector<Frame>{{0, ground_truth}},
                           iou_threshold);
}

// ---------------------------------------------------------------------------
// Synthetic detector

struct TrueScene {
  Vec2 marker1 = Vec2::Zero();  // px
  Vec2 marker2 = Vec2::Zero();
  Vec2 papilla = Vec2::Zero();
  bool papilla_visible = true;
};

struct NoiseSpec {
  double jitter_sigma = 0.0;   // px, per axis
  double dropout = 0.0;        // per-box drop probability
  double box_size = 24.0;      // px, square side
  double confidence_mean = 0.85;
  double confidence_sd = 0.05;

  void validate() const {
    require(jitter_sigma >= 0.0, "jitter sigma must be >= 0");
    require(dropout >= 0.0 && dropout <= 1.0, "dropout must lie in [0, 1]");
    require(box_size > 0.0, "box size must be > 0");
    require(confidence_sd >= 0.0, "confidence sd must be >= 0");
  }
};

/// Boxes centred on the jittered true positions; the draw order per class is
/// fixed so a given seed reproduces the same detections.
inline std::vector<BoundingBox> synth_detect(const TrueScene& scene, const NoiseSpec& noise,
                                             std::mt19937_64& rng) {
  noise.validate();
  std::vector<BoundingBox> out;
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::normal_distribution<double> conf(0.0, 1.0);
  std::uniform_real_distribution<double> drop(0.0, 1.0);
  const std::array<std::pair<MarkerClass, Vec2>, 3> items{
      std::pair{MarkerClass::marker1, scene.marker1}, std::pair{MarkerClass::marker2, scene.marker2},
      std::pair{MarkerClass::papilla, scene.papilla}};
  for (const auto& [cls, pos] : items) {
    // Draw every variate even for dropped boxes so later classes see the same stream.
    const double u = drop(rng);
    const Vec2 offset(jitter(rng), jitter(rng));
    const double c = conf(rng);
    if (cls == MarkerClass::papilla && !scene.papilla_visible) continue;
    if (u < noise.dropout) continue;
    const Vec2 center = pos + noise.jitter_sigma * offset;
    const double confidence =
        std::clamp(noise.confidence_mean + noise.confidence_sd * c, 0.01, 1.0);
    out.push_back(BoundingBox::axis_aligned(center, noise.box_size, noise.box_size, cls, confidence));
  }
  return out;
}

}  // namespace mscr::perception
