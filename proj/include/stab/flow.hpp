#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stab/features.hpp"
#include "stab/frame.hpp"

namespace stab {

struct FlowConfig {
    int window_radius = 10;      // 21x21 window
    int max_levels = 4;          // pyramid depth
    int max_iterations = 30;     // per-level iterations
    double epsilon = 0.01;       // convergence threshold on the update norm, px
    double fb_threshold = 0.5;   // forward-backward error limit, px
    int redetect_interval = 5;   // frames between fresh detections
    int min_tracks = 8;          // surviving pairs required to attempt estimation
};

void validate(const FlowConfig& cfg);

struct TrackedPoint {
    Point2 position;
    bool ok = false;
};

// Coarse-to-fine iterative LK: at each level the 2x2 normal equations
// G * d = b are solved until the update norm drops below epsilon or the
// iteration budget runs out; the coarse result, doubled, seeds the next
// level. A point fails when G is unconditioned (min eigenvalue below
// 1e-4 * window area) or when it leaves the frame.
std::vector<TrackedPoint> track_lk(const Pyramid& prev, const Pyramid& cur,
                                   std::span<const Point2> points, const FlowConfig& cfg);

// Index-aligned point pairs that survived forward-backward weeding.
struct TrackSet {
    std::vector<Point2> prev_points;
    std::vector<Point2> cur_points;
    std::int64_t frame_index = 0;  // ordinal of the later frame

    std::size_t size() const { return prev_points.size(); }
    bool empty() const { return prev_points.empty(); }
};

// Re-tracks each pair backward (cur -> prev) and keeps it only when the
// backward result lands within fb_threshold of the original point.
// prev_points/cur_points are the index-aligned successful forward tracks.
TrackSet weed_tracks(const Pyramid& prev, const Pyramid& cur, std::span<const Point2> prev_points,
                     std::span<const Point2> cur_points, const FlowConfig& cfg);

// Stateful per-stream corner tracker: detects on the first frame and every
// redetect_interval frames after, carries tracked positions in between, and
// emits the weeded TrackSet for each consecutive frame pair.
class Tracker {
  public:
    Tracker(FlowConfig flow_cfg, DetectConfig detect_cfg);

    struct Advance {
        enum class Kind { FirstFrame, Skipped, Tracked };
        Kind kind = Kind::FirstFrame;
        TrackSet tracks;  // filled when kind == Tracked
    };

    // Frames must arrive in strictly increasing index order.
    Advance advance(const GrayFrame& cur);

    std::size_t active_point_count() const { return points_.size(); }
    std::int64_t detections_run() const { return detections_run_; }

  private:
    FlowConfig flow_;
    DetectConfig detect_;
    std::optional<Pyramid> prev_;
    std::vector<Point2> points_;
    int since_detect_ = 0;
    std::int64_t last_index_ = -1;
    std::int64_t detections_run_ = 0;

    void detect_fresh(const GrayFrame& frame);
};

}  // namespace stab
