#include "stab/flow.hpp"

#include <algorithm>
#include <cmath>

#include "stab/image_ops.hpp"

namespace stab {

void validate(const FlowConfig& cfg) {
    if (cfg.window_radius < 1 || cfg.max_levels < 1 || cfg.max_iterations < 1 ||
        cfg.epsilon <= 0.0 || cfg.fb_threshold <= 0.0) {
        throw InvalidConfigError("flow parameters must be positive");
    }
    if (cfg.redetect_interval < 1) {
        throw InvalidConfigError("redetect_interval must be >= 1");
    }
    if (cfg.min_tracks < 4) {
        throw InvalidConfigError("min_tracks must be >= 4");
    }
}

namespace {

// Bilinear patch around `center` with shared fractional weights and clamped
// (border-replicating) indices; side = 2*radius + 1. The replication keeps
// window samples near borders finite instead of poisoning them with zeros.
void extract_patch(const GrayFrame& img, Point2 center, int radius, double* out) {
    const int side = 2 * radius + 1;
    const int x0 = static_cast<int>(std::floor(center.x));
    const int y0 = static_cast<int>(std::floor(center.y));
    const double fx = center.x - x0;
    const double fy = center.y - y0;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;

    // Clamped sample columns/rows for the whole patch, computed once.
    // side <= 2*(window_radius + 1) + 1 <= 67 given the radius cap in track_lk.
    constexpr int kMaxSide = 68;
    int xa[kMaxSide], xb[kMaxSide], ya[kMaxSide], yb[kMaxSide];
    for (int i = 0; i < side; ++i) {
        const int x = x0 - radius + i;
        xa[i] = std::clamp(x, 0, img.width - 1);
        xb[i] = std::clamp(x + 1, 0, img.width - 1);
        const int y = y0 - radius + i;
        ya[i] = std::clamp(y, 0, img.height - 1);
        yb[i] = std::clamp(y + 1, 0, img.height - 1);
    }
    for (int j = 0; j < side; ++j) {
        const std::uint8_t* rowa = &img.pixels[static_cast<std::size_t>(ya[j]) * img.width];
        const std::uint8_t* rowb = &img.pixels[static_cast<std::size_t>(yb[j]) * img.width];
        double* dst = out + static_cast<std::size_t>(j) * side;
        for (int i = 0; i < side; ++i) {
            dst[i] = w00 * rowa[xa[i]] + w10 * rowa[xb[i]] + w01 * rowb[xa[i]] + w11 * rowb[xb[i]];
        }
    }
}

struct LevelPatch {
    // Template values and gradients over the valid part of the window —
    // offsets whose bilinear and gradient stencils lie fully inside the
    // image. Clipping the window this way keeps border bands from flooding
    // the normal equations when a coarse level is smaller than the window.
    std::vector<int> index;  // positions within the side x side window
    std::vector<double> value;
    std::vector<double> gx;
    std::vector<double> gy;
    double gxx = 0.0, gxy = 0.0, gyy = 0.0;  // structure tensor G over the valid set

    std::size_t count() const { return index.size(); }
};

enum class PatchStatus { Ok, TooSmall, Unconditioned };

PatchStatus build_level_patch(const GrayFrame& img, Point2 center, int radius, LevelPatch& p) {
    const int side = 2 * radius + 1;
    const int ext = radius + 1;
    const int ext_side = 2 * ext + 1;
    std::vector<double> extended(static_cast<std::size_t>(ext_side) * ext_side);
    extract_patch(img, center, ext, extended.data());

    const int x0 = static_cast<int>(std::floor(center.x));
    const int y0 = static_cast<int>(std::floor(center.y));

    p.index.clear();
    p.value.clear();
    p.gx.clear();
    p.gy.clear();
    p.gxx = p.gxy = p.gyy = 0.0;
    for (int j = 0; j < side; ++j) {
        // Valid iff the bilinear stencils of the sample and of its +-1
        // gradient neighbors stay inside the image.
        const int sy = y0 - radius + j;
        if (sy < 1 || sy + 2 > img.height - 1) continue;
        const double* mid = &extended[static_cast<std::size_t>(j + 1) * ext_side + 1];
        const double* up = mid - ext_side;
        const double* down = mid + ext_side;
        for (int i = 0; i < side; ++i) {
            const int sx = x0 - radius + i;
            if (sx < 1 || sx + 2 > img.width - 1) continue;
            p.index.push_back(j * side + i);
            p.value.push_back(mid[i]);
            const double dx = 0.5 * (mid[i + 1] - mid[i - 1]);
            const double dy = 0.5 * (down[i] - up[i]);
            p.gx.push_back(dx);
            p.gy.push_back(dy);
            p.gxx += dx * dx;
            p.gxy += dx * dy;
            p.gyy += dy * dy;
        }
    }
    // A window that lost more than ~3/4 of its support carries too little
    // evidence for a stable solve at this level.
    if (p.count() < static_cast<std::size_t>(std::max(25, side * side / 4))) {
        return PatchStatus::TooSmall;
    }
    const double half_trace = 0.5 * (p.gxx + p.gyy);
    const double half_diff = 0.5 * (p.gxx - p.gyy);
    const double min_eig = half_trace - std::sqrt(half_diff * half_diff + p.gxy * p.gxy);
    if (min_eig < 1e-4 * static_cast<double>(p.count())) {
        return PatchStatus::Unconditioned;
    }
    return PatchStatus::Ok;
}

bool inside(const GrayFrame& img, Point2 p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= img.width - 1.0 && p.y <= img.height - 1.0;
}

TrackedPoint track_one(const Pyramid& prev, const Pyramid& cur, Point2 point,
                       const FlowConfig& cfg) {
    const int levels = prev.level_count();
    const int radius = cfg.window_radius;
    const int side = 2 * radius + 1;
    LevelPatch patch;
    std::vector<double> cur_patch(static_cast<std::size_t>(side) * side);

    // Estimation starts at the deepest level that still fits the window;
    // smaller levels are mostly border and add noise, not signal.
    int start_level = 0;
    for (int level = levels - 1; level > 0; --level) {
        if (std::min(prev.levels[level].width, prev.levels[level].height) >= side) {
            start_level = level;
            break;
        }
    }

    // Flow carried between levels, expressed in the coordinates of the level
    // being processed.
    double gx_flow = 0.0;
    double gy_flow = 0.0;
    for (int level = start_level; level >= 0; --level) {
        const GrayFrame& pimg = prev.levels[level];
        const GrayFrame& cimg = cur.levels[level];
        const double scale = static_cast<double>(1u << level);
        const Point2 pl{point.x / scale, point.y / scale};
        if (!inside(pimg, pl)) {
            return {point, false};
        }
        const PatchStatus status = build_level_patch(pimg, pl, radius, patch);
        if (status == PatchStatus::Unconditioned) {
            return {point, false};
        }
        if (status == PatchStatus::TooSmall) {
            if (level == 0) {
                return {point, false};
            }
            // Carry the guess to the next level untouched.
            gx_flow *= 2.0;
            gy_flow *= 2.0;
            continue;
        }
        const double det = patch.gxx * patch.gyy - patch.gxy * patch.gxy;

        // The update is only meaningful within the linearization region, so
        // per-level displacement is capped at the window radius; beyond it
        // the level stops refining and hands its guess down. Only level 0
        // declares a point lost.
        double vx = 0.0;
        double vy = 0.0;
        bool diverged = false;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            const Point2 q{pl.x + gx_flow + vx, pl.y + gy_flow + vy};
            if (!inside(cimg, q)) {
                diverged = true;
                break;
            }
            extract_patch(cimg, q, radius, cur_patch.data());
            double bx = 0.0;
            double by = 0.0;
            for (std::size_t k = 0; k < patch.count(); ++k) {
                const double di = patch.value[k] - cur_patch[patch.index[k]];
                bx += di * patch.gx[k];
                by += di * patch.gy[k];
            }
            const double dx = (patch.gyy * bx - patch.gxy * by) / det;
            const double dy = (patch.gxx * by - patch.gxy * bx) / det;
            vx += dx;
            vy += dy;
            if (vx * vx + vy * vy > static_cast<double>(radius) * radius) {
                diverged = true;
                break;
            }
            if (dx * dx + dy * dy < cfg.epsilon * cfg.epsilon) {
                break;
            }
        }
        if (diverged && level == 0) {
            return {point, false};
        }
        if (!diverged) {
            gx_flow += vx;
            gy_flow += vy;
        }
        if (level > 0) {
            gx_flow *= 2.0;
            gy_flow *= 2.0;
        }
    }
    const Point2 result{point.x + gx_flow, point.y + gy_flow};
    if (!inside(cur.base(), result)) {
        return {point, false};
    }
    return {result, true};
}

void check_pyramids(const Pyramid& prev, const Pyramid& cur) {
    if (prev.levels.empty() || cur.levels.empty() ||
        prev.level_count() != cur.level_count()) {
        throw InvalidInputError("pyramids must have matching level counts");
    }
    for (int i = 0; i < prev.level_count(); ++i) {
        if (!prev.levels[i].same_size(cur.levels[i])) {
            throw InvalidInputError("pyramid levels differ in size");
        }
    }
}

}  // namespace

std::vector<TrackedPoint> track_lk(const Pyramid& prev, const Pyramid& cur,
                                   std::span<const Point2> points, const FlowConfig& cfg) {
    validate(cfg);
    check_pyramids(prev, cur);
    if (cfg.window_radius > 31) {
        throw InvalidConfigError("window_radius above 31 is not supported");
    }
    std::vector<TrackedPoint> out;
    out.reserve(points.size());
    for (const Point2& p : points) {
        out.push_back(track_one(prev, cur, p, cfg));
    }
    return out;
}

TrackSet weed_tracks(const Pyramid& prev, const Pyramid& cur, std::span<const Point2> prev_points,
                     std::span<const Point2> cur_points, const FlowConfig& cfg) {
    if (prev_points.size() != cur_points.size()) {
        throw InvalidInputError("prev/cur point lists must be index-aligned");
    }
    TrackSet set;
    set.frame_index = cur.index();
    if (prev_points.empty()) {
        return set;
    }
    const std::vector<TrackedPoint> back = track_lk(cur, prev, cur_points, cfg);
    const double limit2 = cfg.fb_threshold * cfg.fb_threshold;
    for (std::size_t i = 0; i < cur_points.size(); ++i) {
        if (!back[i].ok) continue;
        const double dx = back[i].position.x - prev_points[i].x;
        const double dy = back[i].position.y - prev_points[i].y;
        if (dx * dx + dy * dy <= limit2) {
            set.prev_points.push_back(prev_points[i]);
            set.cur_points.push_back(cur_points[i]);
        }
    }
    return set;
}

Tracker::Tracker(FlowConfig flow_cfg, DetectConfig detect_cfg)
    : flow_(flow_cfg), detect_(detect_cfg) {
    validate(flow_);
    validate(detect_);
}

void Tracker::detect_fresh(const GrayFrame& frame) {
    points_.clear();
    for (const Corner& c : detect_corners(frame, detect_)) {
        points_.push_back(c.position);
    }
    since_detect_ = 0;
    ++detections_run_;
}

Tracker::Advance Tracker::advance(const GrayFrame& cur) {
    validate(cur);
    if (cur.index <= last_index_) {
        throw SequencingError("frame index must be strictly increasing");
    }
    last_index_ = cur.index;
    Pyramid pyr = build_pyramid(cur, flow_.max_levels);

    if (!prev_) {
        detect_fresh(cur);
        prev_ = std::move(pyr);
        return {Advance::Kind::FirstFrame, {}};
    }

    TrackSet tracks;
    tracks.frame_index = cur.index;
    if (!points_.empty()) {
        std::vector<Point2> prev_ok;
        std::vector<Point2> cur_ok;
        const std::vector<TrackedPoint> fwd = track_lk(*prev_, pyr, points_, flow_);
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            if (fwd[i].ok) {
                prev_ok.push_back(points_[i]);
                cur_ok.push_back(fwd[i].position);
            }
        }
        tracks = weed_tracks(*prev_, pyr, prev_ok, cur_ok, flow_);
    }

    points_ = tracks.cur_points;
    ++since_detect_;
    if (since_detect_ >= flow_.redetect_interval) {
        detect_fresh(cur);
    }
    prev_ = std::move(pyr);

    if (tracks.size() < static_cast<std::size_t>(flow_.min_tracks)) {
        return {Advance::Kind::Skipped, {}};
    }
    return {Advance::Kind::Tracked, std::move(tracks)};
}

}  // namespace stab
