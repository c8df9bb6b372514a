#pragma once

#include <utility>

#include "stab/frame.hpp"
#include "stab/transform.hpp"

namespace stab {

// Builds up to max_levels pyramid levels by binomial low-pass filtering and
// 2x decimation; stops before a level would drop below 16x16.
Pyramid build_pyramid(const GrayFrame& frame, int max_levels);

// Central-difference derivatives ([-1, 0, 1]/2 per axis, borders replicated).
std::pair<ScalarMap, ScalarMap> gradients(const GrayFrame& frame);

// Bilinear interpolation of the 4 neighbors; coordinates outside
// [0, w-1] x [0, h-1] return 0.
double sample_bilinear(const GrayFrame& frame, Point2 p);

// Inverse-mapped similarity warp: each output pixel q takes the value
// sample_bilinear(frame, t^-1(q)). Unfilled regions are 0.
GrayFrame warp_similarity(const GrayFrame& frame, const SimilarityTransform& t);

// Removes a crop_ratio border on each side, then bilinearly resizes the
// interior back to the original dimensions. crop_ratio in [0, 0.25).
GrayFrame crop_resize(const GrayFrame& frame, double crop_ratio);

// Image-composition step for one frame: warps luma (and chroma planes when
// present) by the correction transform, then crops and resizes. Unfilled
// luma is 0 and unfilled chroma is 128 (black).
VideoFrame compose_stabilized(const VideoFrame& in, const SimilarityTransform& correction,
                              double crop_ratio);

}  // namespace stab
