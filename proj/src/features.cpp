#include "stab/features.hpp"

#include <algorithm>
#include <cmath>

#include "stab/image_ops.hpp"

namespace stab {

void validate(const DetectConfig& cfg) {
    if (cfg.max_corners < 8) {
        throw InvalidConfigError("max_corners must be >= 8");
    }
    if (!(cfg.quality_level > 0.0 && cfg.quality_level < 1.0)) {
        throw InvalidConfigError("quality_level must lie in (0, 1)");
    }
    if (cfg.min_distance < 1.0) {
        throw InvalidConfigError("min_distance must be >= 1");
    }
    if (cfg.block_size < 3 || cfg.block_size % 2 == 0) {
        throw InvalidConfigError("block_size must be odd and >= 3");
    }
    if (!(cfg.roi_margin >= 0.0 && cfg.roi_margin < 0.4)) {
        throw InvalidConfigError("roi_margin must lie in [0, 0.4)");
    }
}

RoiRect detection_roi(const GrayFrame& frame, double roi_margin) {
    const int mx = static_cast<int>(std::lround(roi_margin * frame.width));
    const int my = static_cast<int>(std::lround(roi_margin * frame.height));
    RoiRect roi{mx, my, frame.width - mx, frame.height - my};
    if (roi.width() < 32 || roi.height() < 32) {
        throw InvalidConfigError("detection ROI smaller than 32x32");
    }
    return roi;
}

namespace {

// min eigenvalue of [[sxx, sxy], [sxy, syy]]
inline double min_eig(double sxx, double sxy, double syy) {
    const double half_trace = 0.5 * (sxx + syy);
    const double half_diff = 0.5 * (sxx - syy);
    return half_trace - std::sqrt(half_diff * half_diff + sxy * sxy);
}

// Structure-tensor response over one rectangle. Summation runs in the same
// per-window order as a direct per-pixel evaluation so results match the
// closed-form oracle exactly.
void response_in_rect(const ScalarMap& gx, const ScalarMap& gy, int block_size, const RoiRect& rect,
                      ScalarMap& out) {
    const int w = gx.width;
    const int h = gx.height;
    const int half = block_size / 2;
    for (int y = rect.y0; y < rect.y1; ++y) {
        const int wy0 = std::max(y - half, 0);
        const int wy1 = std::min(y + half, h - 1);
        for (int x = rect.x0; x < rect.x1; ++x) {
            const int wx0 = std::max(x - half, 0);
            const int wx1 = std::min(x + half, w - 1);
            double sxx = 0.0, sxy = 0.0, syy = 0.0;
            for (int wy = wy0; wy <= wy1; ++wy) {
                for (int wx = wx0; wx <= wx1; ++wx) {
                    const double dx = gx.at(wx, wy);
                    const double dy = gy.at(wx, wy);
                    sxx += dx * dx;
                    sxy += dx * dy;
                    syy += dy * dy;
                }
            }
            out.at(x, y) = min_eig(sxx, sxy, syy);
        }
    }
}

}  // namespace

ScalarMap min_eig_response(const GrayFrame& frame, int block_size) {
    validate(frame);
    if (block_size < 3 || block_size % 2 == 0) {
        throw InvalidConfigError("block_size must be odd and >= 3");
    }
    auto [gx, gy] = gradients(frame);
    ScalarMap out(frame.width, frame.height);
    response_in_rect(gx, gy, block_size, RoiRect{0, 0, frame.width, frame.height}, out);
    return out;
}

std::vector<Corner> detect_corners(const GrayFrame& frame, const DetectConfig& cfg) {
    validate(frame);
    validate(cfg);
    const RoiRect roi = detection_roi(frame, cfg.roi_margin);

    auto [gx, gy] = gradients(frame);
    ScalarMap response(frame.width, frame.height);
    response_in_rect(gx, gy, cfg.block_size, roi, response);

    double max_response = 0.0;
    for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1; ++x) {
            max_response = std::max(max_response, response.at(x, y));
        }
    }
    if (max_response <= 0.0) {
        return {};
    }
    const double threshold = cfg.quality_level * max_response;

    std::vector<Corner> candidates;
    for (int y = roi.y0; y < roi.y1; ++y) {
        for (int x = roi.x0; x < roi.x1; ++x) {
            const double r = response.at(x, y);
            if (r >= threshold && r > 0.0) {
                candidates.push_back({{static_cast<double>(x), static_cast<double>(y)}, r});
            }
        }
    }
    // Score-descending, ties broken by row-major position.
    std::sort(candidates.begin(), candidates.end(), [](const Corner& a, const Corner& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.position.y != b.position.y) return a.position.y < b.position.y;
        return a.position.x < b.position.x;
    });

    const double min_dist2 = cfg.min_distance * cfg.min_distance;
    std::vector<Corner> selected;
    for (const Corner& c : candidates) {
        if (static_cast<int>(selected.size()) >= cfg.max_corners) break;
        bool keep = true;
        for (const Corner& s : selected) {
            const double dx = c.position.x - s.position.x;
            const double dy = c.position.y - s.position.y;
            if (dx * dx + dy * dy < min_dist2) {
                keep = false;
                break;
            }
        }
        if (keep) selected.push_back(c);
    }
    return selected;
}

}  // namespace stab
