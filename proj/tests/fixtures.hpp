#pragma once

// Shared synthetic fixtures for the test suite. Oracles that check library
// output live next to the tests that use them and stay independent of the
// implementation code paths they verify.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stab/flow.hpp"
#include "stab/frame.hpp"
#include "stab/transform.hpp"

namespace fixtures {

// Deterministic RNG independent of the library's generator.
class TestRng {
  public:
    explicit TestRng(std::uint64_t seed) : state_(seed * 2654435761u + 1) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    std::uint64_t state_;
};

inline stab::GrayFrame constant_frame(int w, int h, std::uint8_t value, std::int64_t index = 0) {
    return stab::GrayFrame(w, h, index, value);
}

// I(x, y) = a*x + b*y + c, clamped to [0, 255].
inline stab::GrayFrame affine_frame(int w, int h, double a, double b, double c) {
    stab::GrayFrame f(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f.at(x, y) = static_cast<std::uint8_t>(
                std::clamp(std::lround(a * x + b * y + c), 0L, 255L));
        }
    }
    return f;
}

inline stab::GrayFrame noise_frame(int w, int h, std::uint64_t seed) {
    TestRng rng(seed);
    stab::GrayFrame f(w, h);
    for (auto& p : f.pixels) {
        p = static_cast<std::uint8_t>(rng.next_u64() % 256);
    }
    return f;
}

// Two-octave noise texture: a coarse octave (noise rendered at quarter
// resolution and bilinearly upsampled) plus fine noise, lightly smoothed.
// The coarse octave gives pyramid levels real structure to lock onto, the
// way natural 1/f imagery does.
inline stab::GrayFrame smooth_noise_frame(int w, int h, std::uint64_t seed, int passes = 2) {
    const int cw = std::max(4, w / 4);
    const int ch = std::max(4, h / 4);
    const stab::GrayFrame coarse = noise_frame(cw, ch, seed * 7 + 1);
    stab::GrayFrame f = noise_frame(w, h, seed);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sx = std::min(static_cast<double>(x) * cw / w, cw - 1.0);
            const double sy = std::min(static_cast<double>(y) * ch / h, ch - 1.0);
            const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, cw - 1), y1 = std::min(y0 + 1, ch - 1);
            const double fx = sx - x0, fy = sy - y0;
            const double up = (1 - fy) * ((1 - fx) * coarse.at(x0, y0) + fx * coarse.at(x1, y0)) +
                              fy * ((1 - fx) * coarse.at(x0, y1) + fx * coarse.at(x1, y1));
            f.at(x, y) = static_cast<std::uint8_t>(std::lround(0.5 * up + 0.5 * f.at(x, y)));
        }
    }
    for (int pass = 0; pass < passes; ++pass) {
        stab::GrayFrame g = f;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                int acc = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        acc += g.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1));
                    }
                }
                f.at(x, y) = static_cast<std::uint8_t>((acc + 4) / 9);
            }
        }
    }
    return f;
}

// Exact integer shift with zero fill: pixel (x, y) of the result equals
// base(x - dx, y - dy). Ground truth for flow tests.
inline stab::GrayFrame integer_shift(const stab::GrayFrame& base, int dx, int dy,
                                     std::int64_t index = 0) {
    stab::GrayFrame out(base.width, base.height, index);
    for (int y = 0; y < base.height; ++y) {
        const int sy = y - dy;
        if (sy < 0 || sy >= base.height) continue;
        for (int x = 0; x < base.width; ++x) {
            const int sx = x - dx;
            if (sx < 0 || sx >= base.width) continue;
            out.at(x, y) = base.at(sx, sy);
        }
    }
    return out;
}

// Bilinear sub-pixel shift rendered directly in the test (independent of the
// library warp): result(x, y) = base(x - dx, y - dy).
inline stab::GrayFrame subpixel_shift(const stab::GrayFrame& base, double dx, double dy,
                                      std::int64_t index = 0) {
    stab::GrayFrame out(base.width, base.height, index);
    for (int y = 0; y < base.height; ++y) {
        for (int x = 0; x < base.width; ++x) {
            const double sx = x - dx;
            const double sy = y - dy;
            if (sx < 0 || sy < 0 || sx > base.width - 1 || sy > base.height - 1) continue;
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, base.width - 1);
            const int y1 = std::min(y0 + 1, base.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            const double v = (1 - fy) * ((1 - fx) * base.at(x0, y0) + fx * base.at(x1, y0)) +
                             fy * ((1 - fx) * base.at(x0, y1) + fx * base.at(x1, y1));
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

// Exact point correspondences under a similarity transform.
inline stab::TrackSet make_trackset(const std::vector<stab::Point2>& src,
                                    const stab::SimilarityTransform& t,
                                    std::int64_t frame_index = 1) {
    stab::TrackSet set;
    set.frame_index = frame_index;
    set.prev_points = src;
    for (const stab::Point2& p : src) {
        set.cur_points.push_back(t.apply(p));
    }
    return set;
}

inline std::vector<stab::Point2> random_points(TestRng& rng, int n, double lo = -50.0,
                                               double hi = 50.0) {
    std::vector<stab::Point2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        pts.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi)});
    }
    return pts;
}

}  // namespace fixtures
