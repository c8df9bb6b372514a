#pragma once

#include <optional>
#include <string>

#include "stab/frame.hpp"

namespace stab {

// Pull-style frame producer. next() yields frames with strictly increasing
// luma.index and throws IoError on unreadable input.
class FrameSource {
  public:
    virtual ~FrameSource() = default;
    virtual std::optional<VideoFrame> next() = 0;
};

// Frame consumer. push() may throw IoError; close() finalizes the artifact
// (atomic writers rename their temp file here); abort() tells the sink the
// run failed so partial output is discarded.
class FrameSink {
  public:
    virtual ~FrameSink() = default;
    virtual void push(VideoFrame frame) = 0;
    virtual void close() {}
    virtual void abort(const std::string& /*reason*/) {}
};

}  // namespace stab
