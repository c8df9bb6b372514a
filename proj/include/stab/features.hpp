#pragma once

#include <vector>

#include "stab/frame.hpp"

namespace stab {

// Shi-Tomasi corner: position plus min-eigenvalue response.
struct Corner {
    Point2 position;
    double score = 0.0;
};

struct DetectConfig {
    int max_corners = 50;        // corner budget
    double quality_level = 0.01; // fraction of the max response kept
    double min_distance = 10.0;  // pixels between accepted corners
    int block_size = 3;          // structure-tensor window side, odd
    double roi_margin = 0.1;     // fraction of each dimension excluded per border
};

// Throws InvalidConfigError when any field is out of range.
void validate(const DetectConfig& cfg);

// Detection rectangle, half-open: x in [x0, x1), y in [y0, y1).
struct RoiRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool contains(Point2 p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
};

// ROI after removing the margin band; throws InvalidConfigError when the
// remaining interior is smaller than 32x32.
RoiRect detection_roi(const GrayFrame& frame, double roi_margin);

// Smaller eigenvalue of the 2x2 gradient structure tensor, summed over the
// block window (uniform weights, window truncated at frame borders).
ScalarMap min_eig_response(const GrayFrame& frame, int block_size);

// Up to max_corners corners inside the ROI, score-descending, greedily
// suppressing candidates within min_distance of an accepted corner.
// An empty result is valid (flat frame), not an error.
std::vector<Corner> detect_corners(const GrayFrame& frame, const DetectConfig& cfg);

}  // namespace stab
