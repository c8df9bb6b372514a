#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stab/errors.hpp"

namespace stab {

// Smallest frame (and pyramid level) edge the tracker can work with.
inline constexpr int kMinFrameDim = 16;

// Single-channel 8-bit image, row-major. The unit flowing through the
// stabilization pipeline.
struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height bytes
    std::int64_t index = 0;            // zero-based frame ordinal

    GrayFrame() = default;
    GrayFrame(int w, int h, std::int64_t idx = 0, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill), index(idx) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool same_size(const GrayFrame& o) const { return width == o.width && height == o.height; }
};

// Throws InvalidInputError when dimensions or buffer length are off.
void validate(const GrayFrame& f);

// Sub-pixel image coordinate.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Image pyramid: levels[0] is full resolution, every level above it is
// floor-halved in both dimensions. The smallest level stays >= 16x16.
struct Pyramid {
    std::vector<GrayFrame> levels;

    int level_count() const { return static_cast<int>(levels.size()); }
    const GrayFrame& base() const { return levels.front(); }
    std::int64_t index() const { return levels.front().index; }
};

// Per-pixel real-valued map aligned with a GrayFrame (gradients, responses).
struct ScalarMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ScalarMap() = default;
    ScalarMap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Luma frame plus optional chroma planes carried along so color streams can
// be re-composed after stabilization. Motion runs on luma only.
struct VideoFrame {
    GrayFrame luma;
    int chroma_width = 0;
    int chroma_height = 0;
    std::vector<std::uint8_t> cb;
    std::vector<std::uint8_t> cr;

    bool has_chroma() const { return !cb.empty(); }
};

}  // namespace stab
