#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "stab/media_io.hpp"
#include "stab/pipeline.hpp"
#include "stab/synth_eval.hpp"

namespace {

struct StabilizeOptions {
    std::string input;
    std::string output;
    int radius = 10;
    int dwell = 20;
    int max_corners = 50;
    double roi_margin = 0.1;
    double crop = 0.04;
    int redetect = 5;
    std::string model = "hybrid";
    std::string traj_csv;
    std::string summary_json;
    std::string image_format = "pgm";
    double realtime_throttle = 0.0;
};

void add_stabilize_flags(CLI::App& cmd, StabilizeOptions& opt, bool streaming) {
    cmd.add_option("--input", opt.input, "input stream (*.y4m or image directory)")->required();
    cmd.add_option("--output", opt.output, "output stream (*.y4m or image directory)")->required();
    cmd.add_option("--radius", opt.radius, "smoothing radius in frames");
    cmd.add_option("--dwell", opt.dwell, "model decision dwell in frames");
    cmd.add_option("--max-corners", opt.max_corners, "corner budget");
    cmd.add_option("--roi-margin", opt.roi_margin, "detection ROI margin per side");
    cmd.add_option("--crop", opt.crop, "crop ratio per side after warping");
    cmd.add_option("--redetect", opt.redetect, "frames between corner re-detections");
    cmd.add_option("--model", opt.model, "motion model: hybrid | rigid | similarity")
        ->check(CLI::IsMember({"hybrid", "rigid", "similarity"}));
    cmd.add_option("--traj-csv", opt.traj_csv, "write the parameter trajectory as CSV");
    cmd.add_option("--summary-json", opt.summary_json, "write the run summary as JSON");
    cmd.add_option("--image-format", opt.image_format, "directory sink format: pgm | ppm | png")
        ->check(CLI::IsMember({"pgm", "ppm", "png"}));
    if (streaming) {
        cmd.add_option("--realtime-throttle", opt.realtime_throttle,
                       "pace the source at this many frames per second");
    }
}

stab::StabConfig make_config(const StabilizeOptions& opt) {
    stab::StabConfig cfg;
    cfg.smooth.radius = opt.radius;
    cfg.selector.dwell = opt.dwell;
    if (opt.model == "rigid") {
        cfg.selector.mode = stab::SelectionMode::ForceRigid;
    } else if (opt.model == "similarity") {
        cfg.selector.mode = stab::SelectionMode::ForceSimilarity;
    }
    cfg.detect.max_corners = opt.max_corners;
    cfg.detect.roi_margin = opt.roi_margin;
    cfg.crop_ratio = opt.crop;
    cfg.flow.redetect_interval = opt.redetect;
    cfg.queue_capacity = std::max<std::size_t>(64, 2 * static_cast<std::size_t>(opt.radius) + 4);
    validate(cfg);
    return cfg;
}

int run_stabilize(const StabilizeOptions& opt, bool streaming) {
    const stab::StabConfig cfg = make_config(opt);
    const stab::StreamSpec in_spec = stab::probe_stream_spec(opt.input);
    stab::StreamSpec out_spec = stab::infer_stream_spec(opt.output);
    out_spec.fps_num = in_spec.fps_num;
    out_spec.fps_den = in_spec.fps_den;
    out_spec.image_format = opt.image_format;

    std::unique_ptr<stab::FrameSource> source = stab::open_source(in_spec);
    if (streaming && opt.realtime_throttle > 0.0) {
        source = stab::throttle_source(std::move(source), opt.realtime_throttle);
    }
    std::unique_ptr<stab::FrameSink> sink = stab::open_sink(out_spec);

    stab::Trajectory trajectory;
    const stab::RunSummary summary =
        streaming ? stab::run_streaming(*source, cfg, *sink, &trajectory)
                  : stab::run_offline(*source, cfg, *sink, &trajectory);

    if (!opt.traj_csv.empty()) {
        stab::export_trajectory(trajectory, cfg.smooth, opt.traj_csv);
    }
    if (!opt.summary_json.empty()) {
        stab::write_file_atomic(opt.summary_json, stab::to_json(summary));
    }
    std::printf("%lld frames | %.1f fps overall | ME %.1f fps | rigid %lld, similarity %lld, skipped %lld\n",
                static_cast<long long>(summary.frames), summary.fps_overall, summary.fps_me,
                static_cast<long long>(summary.rigid_decisions),
                static_cast<long long>(summary.similarity_decisions),
                static_cast<long long>(summary.skipped_frames));
    return 0;
}

struct SynthOptions {
    std::string base_image;
    std::string output;
    int frames = 100;
    double jitter_std = 0.0;
    double angle_jitter = 0.0;
    double scale_jitter = 0.0;
    std::string drift = "0,0";
    std::uint64_t seed = 0;
    std::string truth_csv;
    int width = 320;
    int height = 240;
    std::string image_format = "pgm";
};

int run_synth(const SynthOptions& opt) {
    stab::JitterSpec spec;
    if (!opt.base_image.empty()) {
        const stab::StreamSpec base_spec = stab::infer_stream_spec(opt.base_image);
        auto source = stab::open_source(base_spec);
        auto frame = source->next();
        if (!frame) {
            throw stab::IoError("base image stream is empty");
        }
        spec.base = std::move(frame->luma);
    } else {
        spec.base = stab::make_textured_base(opt.width, opt.height, opt.seed ^ 0x5eedba5eull);
    }
    spec.frames = opt.frames;
    spec.jitter_std = opt.jitter_std;
    spec.angle_std = opt.angle_jitter;
    spec.scale_jitter_std = opt.scale_jitter;
    spec.seed = opt.seed;
    if (std::sscanf(opt.drift.c_str(), "%lf,%lf", &spec.drift_x, &spec.drift_y) != 2) {
        throw stab::InvalidConfigError("--drift expects dx,dy");
    }

    stab::SynthSequence seq = stab::generate(spec);
    const std::vector<stab::DeltaParams> truth = seq.truth();

    stab::StreamSpec out_spec = stab::infer_stream_spec(opt.output);
    out_spec.image_format = opt.image_format;
    auto sink = stab::open_sink(out_spec);
    stab::SynthSource source(std::move(seq));
    while (auto frame = source.next()) {
        sink->push(std::move(*frame));
    }
    sink->close();
    if (!opt.truth_csv.empty()) {
        stab::export_truth(truth, opt.truth_csv);
    }
    std::printf("wrote %d synthetic frames to %s\n", opt.frames, opt.output.c_str());
    return 0;
}

struct EvalOptions {
    std::string original;
    std::string stabilized;
    std::string truth_csv;
    std::string est_csv;
    std::string report;
    double crop = 0.04;
};

int run_eval(const EvalOptions& opt) {
    auto original_src = stab::open_source(stab::infer_stream_spec(opt.original));
    auto stabilized_src = stab::open_source(stab::infer_stream_spec(opt.stabilized));
    const std::vector<stab::VideoFrame> original = stab::read_all(*original_src);
    const std::vector<stab::VideoFrame> stabilized = stab::read_all(*stabilized_src);

    std::vector<stab::DeltaParams> truth;
    if (!opt.truth_csv.empty()) {
        truth = stab::read_truth_csv(opt.truth_csv);
    }
    std::vector<stab::DeltaParams> estimated;
    if (!opt.est_csv.empty()) {
        estimated = stab::read_trajectory_csv(opt.est_csv);
    } else if (!truth.empty()) {
        estimated = stab::reestimate_deltas(original);
    }

    const stab::EvalReport report = stab::score(original, stabilized, truth, estimated, opt.crop);
    const std::string json = stab::to_json(report);
    if (!opt.report.empty()) {
        stab::write_file_atomic(opt.report, json);
    }
    std::fputs(json.c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical-flow video stabilizer"};
    app.require_subcommand(1);

    StabilizeOptions stab_opt;
    CLI::App* stabilize = app.add_subcommand("stabilize", "stabilize a stream offline");
    add_stabilize_flags(*stabilize, stab_opt, false);

    StabilizeOptions stream_opt;
    CLI::App* stream =
        app.add_subcommand("stream", "stabilize with three concurrent stages (streaming)");
    add_stabilize_flags(*stream, stream_opt, true);

    SynthOptions synth_opt;
    CLI::App* synth = app.add_subcommand("synth", "generate a jittered synthetic sequence");
    synth->add_option("--base-image", synth_opt.base_image,
                      "base frame (first frame of any stream); procedural when omitted");
    synth->add_option("--output", synth_opt.output, "output stream")->required();
    synth->add_option("--frames", synth_opt.frames, "frame count");
    synth->add_option("--jitter-std", synth_opt.jitter_std, "translation jitter std, px");
    synth->add_option("--angle-jitter", synth_opt.angle_jitter, "rotation jitter std, rad");
    synth->add_option("--scale-jitter", synth_opt.scale_jitter, "log-scale jitter std");
    synth->add_option("--drift", synth_opt.drift, "per-frame intended motion dx,dy");
    synth->add_option("--seed", synth_opt.seed, "RNG seed");
    synth->add_option("--truth-csv", synth_opt.truth_csv, "write the true deltas as CSV");
    synth->add_option("--width", synth_opt.width, "procedural base width");
    synth->add_option("--height", synth_opt.height, "procedural base height");
    synth->add_option("--image-format", synth_opt.image_format,
                      "directory sink format: pgm | ppm | png")
        ->check(CLI::IsMember({"pgm", "ppm", "png"}));

    EvalOptions eval_opt;
    CLI::App* eval = app.add_subcommand("eval", "score a stabilized stream against the original");
    eval->add_option("--original", eval_opt.original, "original stream")->required();
    eval->add_option("--stabilized", eval_opt.stabilized, "stabilized stream")->required();
    eval->add_option("--truth-csv", eval_opt.truth_csv, "true deltas from synth");
    eval->add_option("--est-csv", eval_opt.est_csv, "estimated deltas from stabilize --traj-csv");
    eval->add_option("--report", eval_opt.report, "write the metric report JSON here");
    eval->add_option("--crop", eval_opt.crop, "central-region crop ratio for PSNR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (stabilize->parsed()) return run_stabilize(stab_opt, false);
        if (stream->parsed()) return run_stabilize(stream_opt, true);
        if (synth->parsed()) return run_synth(synth_opt);
        if (eval->parsed()) return run_eval(eval_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
