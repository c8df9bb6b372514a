#include "stab/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace stab {

void validate(const GrayFrame& f) {
    if (f.width < kMinFrameDim || f.height < kMinFrameDim) {
        throw InvalidInputError("frame smaller than 16x16");
    }
    if (f.pixels.size() != static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height)) {
        throw InvalidInputError("pixel buffer length does not match width*height");
    }
}

namespace {

inline std::uint8_t clamp_u8(long v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

// One binomial [1,4,6,4,1]/16 pass per axis followed by 2x decimation.
GrayFrame downsample(const GrayFrame& src) {
    const int w = src.width;
    const int h = src.height;
    const int ow = w / 2;
    const int oh = h / 2;

    // Horizontal pass into a 16.4 fixed-point row buffer, then vertical pass.
    std::vector<std::uint16_t> tmp(static_cast<std::size_t>(w) * h);
    auto cx = [w](int x) { return std::clamp(x, 0, w - 1); };
    auto cy = [h](int y) { return std::clamp(y, 0, h - 1); };
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = &src.pixels[static_cast<std::size_t>(y) * w];
        std::uint16_t* out = &tmp[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            out[x] = static_cast<std::uint16_t>(row[cx(x - 2)] + 4 * row[cx(x - 1)] + 6 * row[x] +
                                                4 * row[cx(x + 1)] + row[cx(x + 2)]);
        }
    }
    GrayFrame dst(ow, oh, src.index);
    for (int y = 0; y < oh; ++y) {
        const int sy = 2 * y;
        for (int x = 0; x < ow; ++x) {
            const int sx = 2 * x;
            const std::uint32_t acc = tmp[static_cast<std::size_t>(cy(sy - 2)) * w + sx] +
                                      4u * tmp[static_cast<std::size_t>(cy(sy - 1)) * w + sx] +
                                      6u * tmp[static_cast<std::size_t>(sy) * w + sx] +
                                      4u * tmp[static_cast<std::size_t>(cy(sy + 1)) * w + sx] +
                                      tmp[static_cast<std::size_t>(cy(sy + 2)) * w + sx];
            // acc is 256 * value; round to nearest.
            dst.pixels[static_cast<std::size_t>(y) * ow + x] = static_cast<std::uint8_t>((acc + 128) >> 8);
        }
    }
    return dst;
}

}  // namespace

Pyramid build_pyramid(const GrayFrame& frame, int max_levels) {
    validate(frame);
    if (max_levels < 1) {
        throw InvalidInputError("max_levels must be >= 1");
    }
    Pyramid pyr;
    pyr.levels.push_back(frame);
    while (pyr.level_count() < max_levels) {
        const GrayFrame& top = pyr.levels.back();
        if (top.width / 2 < kMinFrameDim || top.height / 2 < kMinFrameDim) {
            break;
        }
        pyr.levels.push_back(downsample(top));
    }
    return pyr;
}

std::pair<ScalarMap, ScalarMap> gradients(const GrayFrame& frame) {
    validate(frame);
    const int w = frame.width;
    const int h = frame.height;
    ScalarMap gx(w, h);
    ScalarMap gy(w, h);
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            gx.at(x, y) = 0.5 * (static_cast<double>(frame.at(xp, y)) - frame.at(xm, y));
            gy.at(x, y) = 0.5 * (static_cast<double>(frame.at(x, yp)) - frame.at(x, ym));
        }
    }
    return {std::move(gx), std::move(gy)};
}

double sample_bilinear(const GrayFrame& frame, Point2 p) {
    const double xmax = frame.width - 1.0;
    const double ymax = frame.height - 1.0;
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= xmax && p.y <= ymax)) {
        return 0.0;
    }
    const int x0 = static_cast<int>(p.x);
    const int y0 = static_cast<int>(p.y);
    const int x1 = std::min(x0 + 1, frame.width - 1);
    const int y1 = std::min(y0 + 1, frame.height - 1);
    const double fx = p.x - x0;
    const double fy = p.y - y0;
    const double top = frame.at(x0, y0) + fx * (frame.at(x1, y0) - static_cast<double>(frame.at(x0, y0)));
    const double bot = frame.at(x0, y1) + fx * (frame.at(x1, y1) - static_cast<double>(frame.at(x0, y1)));
    return top + fy * (bot - top);
}

GrayFrame warp_similarity(const GrayFrame& frame, const SimilarityTransform& t) {
    validate(frame);
    validate(t);
    GrayFrame out(frame.width, frame.height, frame.index);
    // Inverse mapping leaves no holes; constant row/column steps avoid a full
    // transform evaluation per pixel.
    const double c = std::cos(t.theta) / t.s;
    const double sn = std::sin(t.theta) / t.s;
    for (int y = 0; y < frame.height; ++y) {
        double sx = c * (0.0 - t.tx) + sn * (y - t.ty);
        double sy = -sn * (0.0 - t.tx) + c * (y - t.ty);
        std::uint8_t* row = &out.pixels[static_cast<std::size_t>(y) * frame.width];
        for (int x = 0; x < frame.width; ++x) {
            row[x] = clamp_u8(std::lround(sample_bilinear(frame, {sx, sy})));
            sx += c;
            sy -= sn;
        }
    }
    return out;
}

GrayFrame crop_resize(const GrayFrame& frame, double crop_ratio) {
    validate(frame);
    if (!(crop_ratio >= 0.0 && crop_ratio < 0.25)) {
        throw InvalidConfigError("crop_ratio must lie in [0, 0.25)");
    }
    const int mx = static_cast<int>(std::lround(crop_ratio * frame.width));
    const int my = static_cast<int>(std::lround(crop_ratio * frame.height));
    if (mx == 0 && my == 0) {
        return frame;
    }
    const int cw = frame.width - 2 * mx;
    const int ch = frame.height - 2 * my;
    GrayFrame out(frame.width, frame.height, frame.index);
    const double step_x = frame.width > 1 ? static_cast<double>(cw - 1) / (frame.width - 1) : 0.0;
    const double step_y = frame.height > 1 ? static_cast<double>(ch - 1) / (frame.height - 1) : 0.0;
    for (int y = 0; y < frame.height; ++y) {
        const double sy = my + y * step_y;
        for (int x = 0; x < frame.width; ++x) {
            const double sx = mx + x * step_x;
            out.at(x, y) = clamp_u8(std::lround(sample_bilinear(frame, {sx, sy})));
        }
    }
    return out;
}

namespace {

// Warp + crop/resize of one chroma plane, mapped through luma coordinates.
// fx/fy are the luma-to-chroma subsampling factors; unfilled chroma is 128.
std::vector<std::uint8_t> compose_plane(const std::vector<std::uint8_t>& plane, int cw, int ch,
                                        int lw, int lh, const SimilarityTransform& t,
                                        double crop_ratio) {
    const double fx = static_cast<double>(lw) / cw;
    const double fy = static_cast<double>(lh) / ch;
    GrayFrame src;
    src.width = cw;
    src.height = ch;
    src.pixels = plane;

    const int mx = static_cast<int>(std::lround(crop_ratio * lw));
    const int my = static_cast<int>(std::lround(crop_ratio * lh));
    const double step_x = lw > 1 ? static_cast<double>(lw - 2 * mx - 1) / (lw - 1) : 0.0;
    const double step_y = lh > 1 ? static_cast<double>(lh - 2 * my - 1) / (lh - 1) : 0.0;

    std::vector<std::uint8_t> out(plane.size());
    for (int y = 0; y < ch; ++y) {
        for (int x = 0; x < cw; ++x) {
            // Chroma sample center in luma coordinates.
            double lx = (x + 0.5) * fx - 0.5;
            double ly = (y + 0.5) * fy - 0.5;
            // Crop/resize in luma space, then the inverse warp.
            if (mx != 0 || my != 0) {
                lx = mx + lx * step_x;
                ly = my + ly * step_y;
            }
            const Point2 p = t.apply_inverse({lx, ly});
            const double px = (p.x + 0.5) / fx - 0.5;
            const double py = (p.y + 0.5) / fy - 0.5;
            double v = 128.0;
            if (px >= 0.0 && py >= 0.0 && px <= cw - 1.0 && py <= ch - 1.0) {
                v = sample_bilinear(src, {px, py});
            }
            out[static_cast<std::size_t>(y) * cw + x] = clamp_u8(std::lround(v));
        }
    }
    return out;
}

}  // namespace

VideoFrame compose_stabilized(const VideoFrame& in, const SimilarityTransform& correction,
                              double crop_ratio) {
    VideoFrame out;
    out.luma = crop_resize(warp_similarity(in.luma, correction), crop_ratio);
    if (in.has_chroma()) {
        out.chroma_width = in.chroma_width;
        out.chroma_height = in.chroma_height;
        out.cb = compose_plane(in.cb, in.chroma_width, in.chroma_height, in.luma.width,
                               in.luma.height, correction, crop_ratio);
        out.cr = compose_plane(in.cr, in.chroma_width, in.chroma_height, in.luma.width,
                               in.luma.height, correction, crop_ratio);
    }
    return out;
}

}  // namespace stab
