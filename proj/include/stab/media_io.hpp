#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stab/smoothing.hpp"
#include "stab/stream.hpp"

namespace stab {

// Where frames come from / go to. Y4M files keep chroma; image directories
// hold numbered PGM/PPM/PNG frames.
struct StreamSpec {
    enum class Kind { Y4m, ImageDir };
    Kind kind = Kind::Y4m;
    std::string path;
    int fps_num = 30;
    int fps_den = 1;
    std::string image_format = "pgm";  // sink format for ImageDir: pgm | ppm | png
};

// *.y4m -> Y4m, anything else -> ImageDir.
StreamSpec infer_stream_spec(const std::string& path);

// infer_stream_spec plus fps metadata read from the Y4M header.
StreamSpec probe_stream_spec(const std::string& path);

std::unique_ptr<FrameSource> open_source(const StreamSpec& spec);

// Sinks write atomically: a temp file is renamed into place on close();
// abort() discards it. Y4M sinks copy fps from the spec and pick the
// colorspace from the first frame.
std::unique_ptr<FrameSink> open_sink(const StreamSpec& spec);

// Wraps a source, delaying each frame to at most `fps` frames per second.
std::unique_ptr<FrameSource> throttle_source(std::unique_ptr<FrameSource> inner, double fps);

// Reads a whole stream into memory (test/eval convenience).
std::vector<VideoFrame> read_all(FrameSource& source);

// In-memory source/sink for synthetic runs and tests.
class MemorySource : public FrameSource {
  public:
    explicit MemorySource(std::vector<VideoFrame> frames) : frames_(std::move(frames)) {}
    std::optional<VideoFrame> next() override {
        if (pos_ >= frames_.size()) return std::nullopt;
        return frames_[pos_++];
    }

  private:
    std::vector<VideoFrame> frames_;
    std::size_t pos_ = 0;
};

class MemorySink : public FrameSink {
  public:
    void push(VideoFrame frame) override { frames.push_back(std::move(frame)); }
    std::vector<VideoFrame> frames;
};

// CSV export of the parameter trajectory (raw deltas, cumulative, smoothed);
// smoothed cells are left empty where the window was never computable.
// Header: frame,dx,dy,da,dls,cum_x,cum_y,cum_a,cum_ls,smooth_x,...
void export_trajectory(const Trajectory& traj, const SmoothConfig& cfg, const std::string& path);

// Parses the delta columns back out of an export_trajectory CSV.
std::vector<DeltaParams> read_trajectory_csv(const std::string& path);

// Truth trajectory CSV (same layout, truth_ prefixed delta/cumulative columns).
void export_truth(const std::vector<DeltaParams>& truth, const std::string& path);
std::vector<DeltaParams> read_truth_csv(const std::string& path);

// Atomic small-file write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

// BT.601 luma from 8-bit RGB, integer rounding.
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace stab
