#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stab/stream.hpp"
#include "stab/transform.hpp"

namespace stab {

// Synthetic camera-path spec: smooth drift plus seeded Gaussian jitter per
// parameter, rendered from one textured base image.
struct JitterSpec {
    GrayFrame base;
    int frames = 0;
    double jitter_std = 0.0;        // translation noise std, px
    double angle_std = 0.0;         // rotation noise std, rad (about the image center)
    double scale_jitter_std = 0.0;  // log-scale noise std
    double drift_x = 0.0;           // intended per-frame motion
    double drift_y = 0.0;
    std::uint64_t seed = 0;
};

// Deterministic rendered sequence with its ground-truth per-pair deltas.
// Frames are rendered on demand so long streams stay memory-bounded.
class SynthSequence {
  public:
    SynthSequence(JitterSpec spec, std::vector<SimilarityTransform> render,
                  std::vector<DeltaParams> truth);

    int frame_count() const { return spec_.frames; }
    VideoFrame render(int i) const;
    const std::vector<DeltaParams>& truth() const { return truth_; }

  private:
    JitterSpec spec_;
    std::vector<SimilarityTransform> render_;  // base -> frame i
    std::vector<DeltaParams> truth_;
};

// Validates that the base is textured enough for the corner budget, builds
// the seeded camera path, and records truth deltas (truth[0] is zero).
SynthSequence generate(const JitterSpec& spec);

class SynthSource : public FrameSource {
  public:
    explicit SynthSource(SynthSequence seq) : seq_(std::move(seq)) {}
    std::optional<VideoFrame> next() override {
        if (pos_ >= seq_.frame_count()) return std::nullopt;
        return seq_.render(pos_++);
    }

  private:
    SynthSequence seq_;
    int pos_ = 0;
};

// Deterministic textured fixture: low-passed noise with geometric shapes.
GrayFrame make_textured_base(int width, int height, std::uint64_t seed);

// PSNR between consecutive luma frames over the central (1 - 2*crop_ratio)
// region; identical frames yield +infinity (excluded from means).
std::vector<double> interframe_psnr(const std::vector<VideoFrame>& frames, double crop_ratio);
double psnr_pair(const GrayFrame& a, const GrayFrame& b, double crop_ratio);

struct ParamStats {
    double dx = 0.0;
    double dy = 0.0;
    double da = 0.0;
    double dls = 0.0;
};

struct EvalReport {
    double mean_psnr_before = 0.0;
    double mean_psnr_after = 0.0;
    ParamStats jitter_energy_before;  // std of frame-to-frame parameter deltas
    ParamStats jitter_energy_after;
    ParamStats truth_recovery_rmse;  // estimated vs true deltas, non-skipped frames
    bool has_truth = false;
    std::int64_t frames_skipped = 0;
};

std::string to_json(const EvalReport& report);

// Scores a stabilized stream against the original. Jitter energies are the
// per-parameter stds of deltas re-estimated from pixels on both streams with
// one shared estimator; `truth`/`estimated` feed the recovery RMSE (pass
// empty vectors when unavailable).
EvalReport score(const std::vector<VideoFrame>& original,
                 const std::vector<VideoFrame>& stabilized,
                 const std::vector<DeltaParams>& truth,
                 const std::vector<DeltaParams>& estimated, double crop_ratio = 0.04);

// Deltas re-estimated from pixels (similarity model every frame); index 0 is
// the zero delta. Used by score and exposed for tests.
std::vector<DeltaParams> reestimate_deltas(const std::vector<VideoFrame>& frames);

}  // namespace stab
