#include "stab/synth_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "stab/features.hpp"
#include "stab/flow.hpp"
#include "stab/image_ops.hpp"
#include "stab/motion.hpp"

namespace stab {

namespace {

// Self-contained deterministic RNG (splitmix64 + Box-Muller) so fixtures and
// seeds reproduce bit-identically on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * u2);
        have_spare_ = true;
        return mag * std::cos(two_pi * u2);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Rotation+scale about `center` followed by a translation, folded into a
// single origin-anchored transform.
SimilarityTransform pose_transform(double tx, double ty, double theta, double log_s,
                                   Point2 center) {
    SimilarityTransform rot;
    rot.theta = theta;
    rot.s = std::exp(log_s);
    const Point2 moved = rot.apply(center);
    rot.tx = center.x - moved.x + tx;
    rot.ty = center.y - moved.y + ty;
    return rot;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

GrayFrame make_textured_base(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    GrayFrame f(width, height);
    for (auto& p : f.pixels) {
        p = static_cast<std::uint8_t>(rng.next_u64() % 256);
    }

    // Two binomial passes knock down aliasing while keeping corner-rich detail.
    for (int pass = 0; pass < 2; ++pass) {
        GrayFrame tmp = f;
        auto cx = [&](int x) { return std::clamp(x, 0, width - 1); };
        auto cy = [&](int y) { return std::clamp(y, 0, height - 1); };
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                unsigned acc = 0;
                static constexpr int k[5] = {1, 4, 6, 4, 1};
                for (int i = -2; i <= 2; ++i) {
                    acc += static_cast<unsigned>(k[i + 2]) * tmp.at(cx(x + i), y);
                }
                f.at(x, y) = static_cast<std::uint8_t>((acc + 8) / 16);
            }
        }
        tmp = f;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                unsigned acc = 0;
                static constexpr int k[5] = {1, 4, 6, 4, 1};
                for (int i = -2; i <= 2; ++i) {
                    acc += static_cast<unsigned>(k[i + 2]) * tmp.at(x, cy(y + i));
                }
                f.at(x, y) = static_cast<std::uint8_t>((acc + 8) / 16);
            }
        }
    }

    // Overlaid rectangles and disks give strong, well-spread corners.
    const int shapes = std::max(24, width * height / 3000);
    for (int i = 0; i < shapes; ++i) {
        const int cx = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(width));
        const int cy = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(height));
        const int half = 3 + static_cast<int>(rng.next_u64() % 14);
        const std::uint8_t shade = static_cast<std::uint8_t>(rng.next_u64() % 256);
        const bool disk = (rng.next_u64() & 1) != 0;
        for (int y = std::max(0, cy - half); y <= std::min(height - 1, cy + half); ++y) {
            for (int x = std::max(0, cx - half); x <= std::min(width - 1, cx + half); ++x) {
                if (disk && (x - cx) * (x - cx) + (y - cy) * (y - cy) > half * half) continue;
                f.at(x, y) = static_cast<std::uint8_t>((f.at(x, y) + 3 * shade) / 4);
            }
        }
    }
    return f;
}

SynthSequence::SynthSequence(JitterSpec spec, std::vector<SimilarityTransform> render,
                             std::vector<DeltaParams> truth)
    : spec_(std::move(spec)), render_(std::move(render)), truth_(std::move(truth)) {}

VideoFrame SynthSequence::render(int i) const {
    VideoFrame f;
    f.luma = warp_similarity(spec_.base, render_[static_cast<std::size_t>(i)]);
    f.luma.index = i;
    return f;
}

SynthSequence generate(const JitterSpec& spec) {
    validate(spec.base);
    if (spec.frames < 2) {
        throw InvalidInputError("a synthetic sequence needs at least 2 frames");
    }
    if (spec.jitter_std < 0.0 || spec.angle_std < 0.0 || spec.scale_jitter_std < 0.0) {
        throw InvalidInputError("jitter deviations must be non-negative");
    }
    // Texture gate: the detector must see at least a full corner budget of
    // candidates above its quality threshold inside the ROI.
    DetectConfig texture_check;
    {
        const ScalarMap response = min_eig_response(spec.base, texture_check.block_size);
        const RoiRect roi = detection_roi(spec.base, texture_check.roi_margin);
        double max_response = 0.0;
        for (int y = roi.y0; y < roi.y1; ++y) {
            for (int x = roi.x0; x < roi.x1; ++x) {
                max_response = std::max(max_response, response.at(x, y));
            }
        }
        std::int64_t candidates = 0;
        for (int y = roi.y0; y < roi.y1; ++y) {
            for (int x = roi.x0; x < roi.x1; ++x) {
                const double r = response.at(x, y);
                if (r > 0.0 && r >= texture_check.quality_level * max_response) {
                    ++candidates;
                }
            }
        }
        if (candidates < texture_check.max_corners) {
            throw InvalidInputError("base image is not textured enough to track");
        }
    }

    Rng rng(spec.seed);
    const Point2 center{(spec.base.width - 1) / 2.0, (spec.base.height - 1) / 2.0};
    std::vector<SimilarityTransform> render;
    std::vector<DeltaParams> truth;
    render.reserve(spec.frames);
    truth.reserve(spec.frames);
    SimilarityTransform prev_render;
    for (int i = 0; i < spec.frames; ++i) {
        const double tx = spec.drift_x * i + spec.jitter_std * rng.next_gaussian();
        const double ty = spec.drift_y * i + spec.jitter_std * rng.next_gaussian();
        const double theta = spec.angle_std * rng.next_gaussian();
        const double log_s = spec.scale_jitter_std * rng.next_gaussian();
        // Camera moved by +pose; the image content moves by the inverse.
        const SimilarityTransform w = pose_transform(tx, ty, theta, log_s, center).inverse();
        if (i == 0) {
            truth.push_back(DeltaParams{});
        } else {
            const SimilarityTransform d = compose(w, prev_render.inverse());
            DeltaParams t;
            t.dx = d.tx;
            t.dy = d.ty;
            t.da = d.theta;
            t.dls = std::log(d.s);
            t.kind = ModelKind::Similarity;
            truth.push_back(t);
        }
        render.push_back(w);
        prev_render = w;
    }
    return SynthSequence(spec, std::move(render), std::move(truth));
}

double psnr_pair(const GrayFrame& a, const GrayFrame& b, double crop_ratio) {
    if (!a.same_size(b)) {
        throw InvalidInputError("PSNR requires equal frame sizes");
    }
    if (!(crop_ratio >= 0.0 && crop_ratio < 0.5)) {
        throw InvalidConfigError("psnr crop_ratio must lie in [0, 0.5)");
    }
    const int mx = static_cast<int>(std::lround(crop_ratio * a.width));
    const int my = static_cast<int>(std::lround(crop_ratio * a.height));
    double acc = 0.0;
    std::int64_t n = 0;
    for (int y = my; y < a.height - my; ++y) {
        for (int x = mx; x < a.width - mx; ++x) {
            const double d = static_cast<double>(a.at(x, y)) - b.at(x, y);
            acc += d * d;
            ++n;
        }
    }
    if (n == 0) {
        throw InvalidInputError("PSNR crop region is empty");
    }
    const double mse = acc / static_cast<double>(n);
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::vector<double> interframe_psnr(const std::vector<VideoFrame>& frames, double crop_ratio) {
    if (frames.size() < 2) {
        throw InvalidInputError("inter-frame PSNR needs at least 2 frames");
    }
    std::vector<double> out;
    out.reserve(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        out.push_back(psnr_pair(frames[i - 1].luma, frames[i].luma, crop_ratio));
    }
    return out;
}

std::vector<DeltaParams> reestimate_deltas(const std::vector<VideoFrame>& frames) {
    FlowConfig flow;
    DetectConfig detect;
    Tracker tracker(flow, detect);
    std::vector<DeltaParams> out;
    out.reserve(frames.size());
    for (const VideoFrame& f : frames) {
        const Tracker::Advance adv = tracker.advance(f.luma);
        if (adv.kind == Tracker::Advance::Kind::Tracked) {
            out.push_back(extract_delta(estimate_similarity(adv.tracks)));
        } else {
            DeltaParams d;
            d.kind = ModelKind::Similarity;
            d.skipped = adv.kind == Tracker::Advance::Kind::Skipped;
            out.push_back(d);
        }
    }
    return out;
}

namespace {

ParamStats delta_std(const std::vector<DeltaParams>& deltas) {
    std::vector<double> dx, dy, da, dls;
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        dx.push_back(deltas[i].dx);
        dy.push_back(deltas[i].dy);
        da.push_back(deltas[i].da);
        dls.push_back(deltas[i].dls);
    }
    return {std_of(dx), std_of(dy), std_of(da), std_of(dls)};
}

double mean_finite(const std::vector<double>& v) {
    double acc = 0.0;
    std::int64_t n = 0;
    for (double x : v) {
        if (std::isfinite(x)) {
            acc += x;
            ++n;
        }
    }
    return n > 0 ? acc / static_cast<double>(n) : std::numeric_limits<double>::infinity();
}

}  // namespace

EvalReport score(const std::vector<VideoFrame>& original,
                 const std::vector<VideoFrame>& stabilized,
                 const std::vector<DeltaParams>& truth,
                 const std::vector<DeltaParams>& estimated, double crop_ratio) {
    if (original.size() != stabilized.size()) {
        throw InvalidInputError("original and stabilized streams differ in length");
    }
    if (!truth.empty() && !estimated.empty() && truth.size() != estimated.size()) {
        throw InvalidInputError("truth and estimated trajectories differ in length");
    }
    if (!truth.empty() && truth.size() != original.size()) {
        throw InvalidInputError("truth trajectory length does not match the stream");
    }
    EvalReport r;
    r.mean_psnr_before = mean_finite(interframe_psnr(original, crop_ratio));
    r.mean_psnr_after = mean_finite(interframe_psnr(stabilized, crop_ratio));

    const std::vector<DeltaParams> est_before = reestimate_deltas(original);
    const std::vector<DeltaParams> est_after = reestimate_deltas(stabilized);
    r.jitter_energy_before = delta_std(est_before);
    r.jitter_energy_after = delta_std(est_after);

    for (const DeltaParams& d : estimated) {
        if (d.skipped) ++r.frames_skipped;
    }

    if (!truth.empty() && !estimated.empty()) {
        r.has_truth = true;
        double sx = 0, sy = 0, sa = 0, sls = 0;
        std::int64_t n = 0;
        for (std::size_t i = 1; i < truth.size(); ++i) {
            if (estimated[i].skipped) continue;
            const double ex = estimated[i].dx - truth[i].dx;
            const double ey = estimated[i].dy - truth[i].dy;
            const double ea = estimated[i].da - truth[i].da;
            const double els = estimated[i].dls - truth[i].dls;
            sx += ex * ex;
            sy += ey * ey;
            sa += ea * ea;
            sls += els * els;
            ++n;
        }
        if (n > 0) {
            r.truth_recovery_rmse = {std::sqrt(sx / n), std::sqrt(sy / n), std::sqrt(sa / n),
                                     std::sqrt(sls / n)};
        }
    }
    return r;
}

std::string to_json(const EvalReport& report) {
    nlohmann::json j;
    const auto stats = [](const ParamStats& s) {
        return nlohmann::json{{"dx", s.dx}, {"dy", s.dy}, {"da", s.da}, {"dls", s.dls}};
    };
    j["mean_psnr_before"] = std::isfinite(report.mean_psnr_before)
                                ? nlohmann::json(report.mean_psnr_before)
                                : nlohmann::json("inf");
    j["mean_psnr_after"] = std::isfinite(report.mean_psnr_after)
                               ? nlohmann::json(report.mean_psnr_after)
                               : nlohmann::json("inf");
    j["jitter_energy_before"] = stats(report.jitter_energy_before);
    j["jitter_energy_after"] = stats(report.jitter_energy_after);
    if (report.has_truth) {
        j["truth_recovery_rmse"] = stats(report.truth_recovery_rmse);
    } else {
        j["truth_recovery_rmse"] = nullptr;
    }
    j["frames_skipped"] = report.frames_skipped;
    return j.dump(2) + "\n";
}

}  // namespace stab
