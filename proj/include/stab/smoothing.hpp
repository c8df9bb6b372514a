#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stab/transform.hpp"

namespace stab {

struct SmoothConfig {
    int radius = 10;  // half-width r of the averaging window (2r+1 samples interior)
};

void validate(const SmoothConfig& cfg);

// Cumulative 4-vector of trajectory parameters (dx, dy, da, dls order).
struct Params4 {
    double x = 0.0;
    double y = 0.0;
    double a = 0.0;
    double ls = 0.0;
};

// Per-frame parameter trajectory: raw deltas, their running sum, and the
// sliding-window smoothed path. Appended in frame order by a single writer;
// reads are safe on any consistent prefix.
class Trajectory {
  public:
    // Accumulates one delta; cumulative[i] - cumulative[i-1] == delta[i].
    void append(const DeltaParams& d);

    // Declares end-of-stream: windows near the tail become truncated means
    // instead of reporting not-ready.
    void mark_complete() { complete_ = true; }
    bool complete() const { return complete_; }

    std::size_t size() const { return deltas_.size(); }
    const DeltaParams& delta(std::size_t i) const { return deltas_[i]; }
    const Params4& cumulative(std::size_t i) const { return cumulative_[i]; }

    // Mean of cumulative over [max(0, i-r), min(last, i+r)]; nullopt while
    // the window still needs future frames on an open stream.
    std::optional<Params4> smooth_at(std::size_t i, const SmoothConfig& cfg) const;

    // Correction transform built from smoothed-minus-accumulated parameters.
    std::optional<SimilarityTransform> correction(std::size_t i, const SmoothConfig& cfg) const;

  private:
    std::vector<DeltaParams> deltas_;
    std::vector<Params4> cumulative_;
    bool complete_ = false;
};

}  // namespace stab
