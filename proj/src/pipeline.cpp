#include "stab/pipeline.hpp"

#include <chrono>
#include <deque>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stab/channel.hpp"
#include "stab/image_ops.hpp"

namespace stab {

void validate(const StabConfig& cfg) {
    validate(cfg.detect);
    validate(cfg.flow);
    validate(cfg.smooth);
    validate(cfg.selector);
    if (!(cfg.crop_ratio >= 0.0 && cfg.crop_ratio < 0.25)) {
        throw InvalidConfigError("crop_ratio must lie in [0, 0.25)");
    }
    if (cfg.queue_capacity < 2 * static_cast<std::size_t>(cfg.smooth.radius) + 4) {
        throw InvalidConfigError("queue_capacity must be >= 2*radius + 4");
    }
}

RunSummary summarize(const RunTelemetry& t) {
    RunSummary s;
    s.frames = t.frames;
    const auto fps = [&](double seconds) {
        return seconds > 0.0 ? static_cast<double>(t.frames) / seconds : 0.0;
    };
    s.fps_overall = fps(t.wall_seconds);
    s.fps_me = fps(t.me_seconds);
    s.fps_mc = fps(t.mc_seconds);
    s.fps_ic = fps(t.ic_seconds);
    s.rigid_decisions = t.rigid_decisions;
    s.similarity_decisions = t.similarity_decisions;
    s.skipped_frames = t.skipped_frames;
    s.latency_frames = t.latency_frames;
    s.wall_seconds = t.wall_seconds;
    s.me_seconds = t.me_seconds;
    s.mc_seconds = t.mc_seconds;
    s.ic_seconds = t.ic_seconds;
    s.first_emit_me_frames = t.first_emit_me_frames;
    return s;
}

std::string to_json(const RunSummary& s) {
    nlohmann::json j;
    j["frames"] = s.frames;
    j["fps_overall"] = s.fps_overall;
    j["fps_me"] = s.fps_me;
    j["fps_mc"] = s.fps_mc;
    j["fps_ic"] = s.fps_ic;
    j["rigid_decisions"] = s.rigid_decisions;
    j["similarity_decisions"] = s.similarity_decisions;
    j["skipped_frames"] = s.skipped_frames;
    j["latency_frames"] = s.latency_frames;
    return j.dump(2) + "\n";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Motion-estimation stage: tracker plus model selector, one delta per frame.
class MotionStage {
  public:
    explicit MotionStage(const StabConfig& cfg)
        : tracker_(cfg.flow, cfg.detect), selector_(cfg.selector) {}

    DeltaParams step(const GrayFrame& luma) {
        Tracker::Advance adv = tracker_.advance(luma);
        switch (adv.kind) {
            case Tracker::Advance::Kind::FirstFrame: {
                selector_.note_skipped();
                DeltaParams d;
                d.kind = selector_.current_kind();
                return d;  // definitional zero delta, not a fallback
            }
            case Tracker::Advance::Kind::Skipped: {
                selector_.note_skipped();
                ++skipped_;
                DeltaParams d;
                d.kind = selector_.current_kind();
                d.skipped = true;
                return d;
            }
            case Tracker::Advance::Kind::Tracked:
                return extract_delta(selector_.select(adv.tracks));
        }
        throw Error("unreachable");
    }

    std::int64_t skipped() const { return skipped_; }
    std::int64_t rigid_decisions() const { return selector_.rigid_decisions(); }
    std::int64_t similarity_decisions() const { return selector_.similarity_decisions(); }

  private:
    Tracker tracker_;
    ModelSelector selector_;
    std::int64_t skipped_ = 0;
};

// Motion-compensation stage: accumulates the trajectory and decides which
// frame corrections are releasable. Nothing is released until 2r deltas have
// been estimated (or the stream ended), mirroring the startup delay in which
// motion estimation runs ahead of the other stages.
class CompensationPlanner {
  public:
    explicit CompensationPlanner(const SmoothConfig& cfg) : cfg_(cfg) {}

    std::vector<std::pair<std::size_t, SimilarityTransform>> feed(const DeltaParams& d) {
        traj_.append(d);
        return release();
    }

    std::vector<std::pair<std::size_t, SimilarityTransform>> finish() {
        traj_.mark_complete();
        return release();
    }

    const Trajectory& trajectory() const { return traj_; }

  private:
    SmoothConfig cfg_;
    Trajectory traj_;
    std::size_t next_ = 0;

    std::vector<std::pair<std::size_t, SimilarityTransform>> release() {
        std::vector<std::pair<std::size_t, SimilarityTransform>> out;
        if (!traj_.complete() && traj_.size() < 2 * static_cast<std::size_t>(cfg_.radius)) {
            return out;
        }
        while (next_ < traj_.size()) {
            const std::optional<SimilarityTransform> c = traj_.correction(next_, cfg_);
            if (!c) break;
            out.emplace_back(next_, *c);
            ++next_;
        }
        return out;
    }
};

struct MeMessage {
    VideoFrame frame;
    DeltaParams delta;
};

struct IcMessage {
    VideoFrame frame;
    SimilarityTransform correction;
};

// First error wins; later ones are ignored.
class ErrorCollector {
  public:
    void record(std::exception_ptr e) {
        std::lock_guard lock(m_);
        if (!first_) first_ = e;
    }
    std::exception_ptr first() const {
        std::lock_guard lock(m_);
        return first_;
    }

  private:
    mutable std::mutex m_;
    std::exception_ptr first_;
};

}  // namespace

RunSummary run_offline(FrameSource& source, const StabConfig& cfg, FrameSink& sink,
                       Trajectory* trajectory_out) {
    validate(cfg);
    const auto start = Clock::now();
    MotionStage me(cfg);
    CompensationPlanner mc(cfg.smooth);
    std::deque<VideoFrame> pending;
    RunTelemetry t;
    t.latency_frames = cfg.smooth.radius;

    const auto emit = [&](std::vector<std::pair<std::size_t, SimilarityTransform>> ready) {
        if (!ready.empty() && t.first_emit_me_frames < 0) {
            t.first_emit_me_frames = t.frames;
        }
        for (auto& [idx, correction] : ready) {
            (void)idx;  // release order is the arrival order
            const auto t0 = Clock::now();
            VideoFrame out = compose_stabilized(pending.front(), correction, cfg.crop_ratio);
            pending.pop_front();
            t.ic_seconds += seconds_since(t0);
            sink.push(std::move(out));
        }
    };

    while (std::optional<VideoFrame> frame = source.next()) {
        ++t.frames;
        auto t0 = Clock::now();
        const DeltaParams d = me.step(frame->luma);
        t.me_seconds += seconds_since(t0);
        pending.push_back(std::move(*frame));
        t0 = Clock::now();
        auto ready = mc.feed(d);
        t.mc_seconds += seconds_since(t0);
        emit(std::move(ready));
    }
    if (t.frames < 2) {
        throw InvalidInputError("stabilization needs at least 2 frames");
    }
    auto t0 = Clock::now();
    auto ready = mc.finish();
    t.mc_seconds += seconds_since(t0);
    emit(std::move(ready));
    sink.close();

    t.rigid_decisions = me.rigid_decisions();
    t.similarity_decisions = me.similarity_decisions();
    t.skipped_frames = me.skipped();
    t.wall_seconds = seconds_since(start);
    if (trajectory_out) {
        *trajectory_out = mc.trajectory();
        trajectory_out->mark_complete();
    }
    return summarize(t);
}

RunSummary run_streaming(FrameSource& source, const StabConfig& cfg, FrameSink& sink,
                         Trajectory* trajectory_out) {
    validate(cfg);
    const auto start = Clock::now();

    BoundedChannel<MeMessage> me_to_mc(cfg.queue_capacity);
    BoundedChannel<IcMessage> mc_to_ic(cfg.queue_capacity);
    ErrorCollector errors;
    RunTelemetry t;
    t.latency_frames = cfg.smooth.radius;

    MotionStage me(cfg);
    Trajectory trajectory;

    std::thread me_thread([&] {
        try {
            while (std::optional<VideoFrame> frame = source.next()) {
                ++t.frames;
                const auto t0 = Clock::now();
                const DeltaParams d = me.step(frame->luma);
                t.me_seconds += seconds_since(t0);
                me_to_mc.send({std::move(*frame), d});
            }
            me_to_mc.close();
        } catch (const ChannelAbortedError&) {
        } catch (...) {
            errors.record(std::current_exception());
            me_to_mc.abort();
            mc_to_ic.abort();
        }
    });

    std::thread mc_thread([&] {
        CompensationPlanner planner(cfg.smooth);
        std::deque<VideoFrame> pending;
        std::int64_t received = 0;
        std::int64_t last_index = -1;
        try {
            const auto forward = [&](std::vector<std::pair<std::size_t, SimilarityTransform>> ready) {
                if (!ready.empty() && t.first_emit_me_frames < 0) {
                    t.first_emit_me_frames = received;
                }
                for (auto& [idx, correction] : ready) {
                    (void)idx;
                    IcMessage msg{std::move(pending.front()), correction};
                    pending.pop_front();
                    mc_to_ic.send(std::move(msg));
                }
            };
            while (std::optional<MeMessage> msg = me_to_mc.recv()) {
                if (msg->frame.luma.index <= last_index) {
                    throw SequencingError("ME->MC channel delivered frames out of order");
                }
                last_index = msg->frame.luma.index;
                ++received;
                pending.push_back(std::move(msg->frame));
                const auto t0 = Clock::now();
                auto ready = planner.feed(msg->delta);
                t.mc_seconds += seconds_since(t0);
                forward(std::move(ready));
            }
            const auto t0 = Clock::now();
            auto ready = planner.finish();
            t.mc_seconds += seconds_since(t0);
            forward(std::move(ready));
            trajectory = planner.trajectory();
            trajectory.mark_complete();
            mc_to_ic.close();
        } catch (const ChannelAbortedError&) {
            me_to_mc.abort();
            mc_to_ic.abort();
        } catch (...) {
            errors.record(std::current_exception());
            me_to_mc.abort();
            mc_to_ic.abort();
        }
    });

    std::thread ic_thread([&] {
        std::int64_t last_index = -1;
        try {
            while (std::optional<IcMessage> msg = mc_to_ic.recv()) {
                if (msg->frame.luma.index <= last_index) {
                    throw SequencingError("MC->IC channel delivered frames out of order");
                }
                last_index = msg->frame.luma.index;
                const auto t0 = Clock::now();
                VideoFrame out = compose_stabilized(msg->frame, msg->correction, cfg.crop_ratio);
                t.ic_seconds += seconds_since(t0);
                sink.push(std::move(out));
            }
        } catch (const ChannelAbortedError&) {
            mc_to_ic.abort();
            me_to_mc.abort();
        } catch (...) {
            errors.record(std::current_exception());
            mc_to_ic.abort();
            me_to_mc.abort();
        }
    });

    me_thread.join();
    mc_thread.join();
    ic_thread.join();

    if (std::exception_ptr e = errors.first()) {
        try {
            std::rethrow_exception(e);
        } catch (const std::exception& ex) {
            sink.abort(ex.what());
        } catch (...) {
            sink.abort("unknown pipeline error");
        }
        std::rethrow_exception(e);
    }
    if (t.frames < 2) {
        throw InvalidInputError("stabilization needs at least 2 frames");
    }
    sink.close();

    t.rigid_decisions = me.rigid_decisions();
    t.similarity_decisions = me.similarity_decisions();
    t.skipped_frames = me.skipped();
    t.wall_seconds = seconds_since(start);
    if (trajectory_out) {
        *trajectory_out = std::move(trajectory);
    }
    return summarize(t);
}

}  // namespace stab
