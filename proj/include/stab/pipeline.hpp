#pragma once

#include <cstdint>
#include <string>

#include "stab/features.hpp"
#include "stab/flow.hpp"
#include "stab/motion.hpp"
#include "stab/smoothing.hpp"
#include "stab/stream.hpp"

namespace stab {

// Every stabilization tunable in one validated record.
struct StabConfig {
    DetectConfig detect;
    FlowConfig flow;
    SmoothConfig smooth;
    SelectorConfig selector;
    double crop_ratio = 0.04;
    std::size_t queue_capacity = 64;  // per stage hand-off channel
};

void validate(const StabConfig& cfg);

// Raw run telemetry; fps fields are derived by summarize().
struct RunTelemetry {
    std::int64_t frames = 0;
    double wall_seconds = 0.0;
    double me_seconds = 0.0;  // busy time, excludes channel waits
    double mc_seconds = 0.0;
    double ic_seconds = 0.0;
    std::int64_t rigid_decisions = 0;
    std::int64_t similarity_decisions = 0;
    std::int64_t skipped_frames = 0;
    int latency_frames = 0;
    std::int64_t first_emit_me_frames = -1;  // deltas estimated when the first frame left MC
};

struct RunSummary {
    std::int64_t frames = 0;
    double fps_overall = 0.0;
    double fps_me = 0.0;
    double fps_mc = 0.0;
    double fps_ic = 0.0;
    std::int64_t rigid_decisions = 0;
    std::int64_t similarity_decisions = 0;
    std::int64_t skipped_frames = 0;
    int latency_frames = 0;

    // Telemetry kept outside the serialized document.
    double wall_seconds = 0.0;
    double me_seconds = 0.0;
    double mc_seconds = 0.0;
    double ic_seconds = 0.0;
    std::int64_t first_emit_me_frames = -1;
};

RunSummary summarize(const RunTelemetry& t);

// {frames, fps_overall, fps_me, fps_mc, fps_ic, rigid_decisions,
//  similarity_decisions, skipped_frames, latency_frames}
std::string to_json(const RunSummary& s);

// Single-threaded run: motion estimation, compensation, and composition per
// frame with a bounded emission lag of smooth.radius frames. Optionally
// copies the final trajectory out for CSV export.
RunSummary run_offline(FrameSource& source, const StabConfig& cfg, FrameSink& sink,
                       Trajectory* trajectory_out = nullptr);

// Three concurrent stages (ME, MC, IC) joined by bounded blocking channels.
// Output frames are bit-identical to run_offline on the same input; the
// first frame is emitted only after 2 * smooth.radius frames have entered
// motion estimation (or the stream ended sooner).
RunSummary run_streaming(FrameSource& source, const StabConfig& cfg, FrameSink& sink,
                         Trajectory* trajectory_out = nullptr);

}  // namespace stab
