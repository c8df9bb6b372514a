#include "stab/motion.hpp"

#include <cmath>

namespace stab {

namespace {

struct ProcrustesSums {
    double src_cx = 0.0, src_cy = 0.0;
    double dst_cx = 0.0, dst_cy = 0.0;
    double dot = 0.0;    // sum(x*x' + y*y') over demeaned coordinates
    double cross = 0.0;  // sum(x*y' - y*x') over demeaned coordinates
    double src_norm = 0.0;  // sum(x^2 + y^2) over demeaned source
};

ProcrustesSums accumulate(const TrackSet& tracks) {
    const std::size_t n = tracks.size();
    if (n < 2) {
        throw DegenerateInputError("estimation needs at least 2 point pairs");
    }
    ProcrustesSums s;
    for (std::size_t i = 0; i < n; ++i) {
        s.src_cx += tracks.prev_points[i].x;
        s.src_cy += tracks.prev_points[i].y;
        s.dst_cx += tracks.cur_points[i].x;
        s.dst_cy += tracks.cur_points[i].y;
    }
    s.src_cx /= n;
    s.src_cy /= n;
    s.dst_cx /= n;
    s.dst_cy /= n;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = tracks.prev_points[i].x - s.src_cx;
        const double y = tracks.prev_points[i].y - s.src_cy;
        const double xp = tracks.cur_points[i].x - s.dst_cx;
        const double yp = tracks.cur_points[i].y - s.dst_cy;
        s.dot += x * xp + y * yp;
        s.cross += x * yp - y * xp;
        s.src_norm += x * x + y * y;
    }
    if (s.src_norm == 0.0) {
        throw DegenerateInputError("all source points coincide");
    }
    return s;
}

SimilarityTransform finish(const ProcrustesSums& s, double theta, double scale, ModelKind kind) {
    SimilarityTransform t;
    t.theta = theta;
    t.s = scale;
    t.kind = kind;
    const double c = scale * std::cos(theta);
    const double sn = scale * std::sin(theta);
    t.tx = s.dst_cx - (c * s.src_cx - sn * s.src_cy);
    t.ty = s.dst_cy - (sn * s.src_cx + c * s.src_cy);
    return t;
}

}  // namespace

SimilarityTransform estimate_similarity(const TrackSet& tracks) {
    const ProcrustesSums s = accumulate(tracks);
    const double theta = std::atan2(s.cross, s.dot);
    const double scale = (std::cos(theta) * s.dot + std::sin(theta) * s.cross) / s.src_norm;
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DegenerateInputError("similarity fit produced a non-positive scale");
    }
    return finish(s, theta, scale, ModelKind::Similarity);
}

SimilarityTransform estimate_rigid(const TrackSet& tracks) {
    const ProcrustesSums s = accumulate(tracks);
    const double theta = std::atan2(s.cross, s.dot);
    return finish(s, theta, 1.0, ModelKind::Rigid);
}

double rms_residual(const TrackSet& tracks, const SimilarityTransform& t) {
    if (tracks.empty()) {
        throw DegenerateInputError("rms_residual needs a non-empty track set");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const Point2 mapped = t.apply(tracks.prev_points[i]);
        const double dx = tracks.cur_points[i].x - mapped.x;
        const double dy = tracks.cur_points[i].y - mapped.y;
        acc += dx * dx + dy * dy;
    }
    return std::sqrt(acc / tracks.size());
}

DeltaParams extract_delta(const SimilarityTransform& t) {
    DeltaParams d;
    d.dx = t.tx;
    d.dy = t.ty;
    d.da = t.theta;
    d.dls = t.kind == ModelKind::Rigid ? 0.0 : std::log(t.s);
    d.kind = t.kind;
    d.skipped = false;
    return d;
}

SimilarityTransform delta_to_transform(double dx, double dy, double da, double dls) {
    SimilarityTransform t;
    t.tx = dx;
    t.ty = dy;
    t.theta = da;
    t.s = std::exp(dls);
    t.kind = ModelKind::Similarity;
    return t;
}

void validate(const SelectorConfig& cfg) {
    if (cfg.dwell < 1) {
        throw InvalidConfigError("dwell must be >= 1");
    }
    if (cfg.margin < 0.0) {
        throw InvalidConfigError("margin must be >= 0");
    }
}

ModelSelector::ModelSelector(SelectorConfig cfg) : cfg_(cfg) {
    validate(cfg_);
    if (cfg_.mode == SelectionMode::ForceSimilarity) {
        current_ = ModelKind::Similarity;
    }
}

void ModelSelector::advance_counter() {
    frames_since_decision_ = (frames_since_decision_ + 1) % cfg_.dwell;
}

void ModelSelector::record_decision(ModelKind kind) {
    current_ = kind;
    if (kind == ModelKind::Rigid) {
        ++rigid_decisions_;
    } else {
        ++similarity_decisions_;
    }
    pending_decision_ = false;
}

SimilarityTransform ModelSelector::select(const TrackSet& tracks) {
    if (frames_since_decision_ == 0) {
        pending_decision_ = true;
    }
    SimilarityTransform out;
    switch (cfg_.mode) {
        case SelectionMode::ForceRigid:
            out = estimate_rigid(tracks);
            ++estimation_calls_;
            if (pending_decision_) record_decision(ModelKind::Rigid);
            break;
        case SelectionMode::ForceSimilarity:
            out = estimate_similarity(tracks);
            ++estimation_calls_;
            if (pending_decision_) record_decision(ModelKind::Similarity);
            break;
        case SelectionMode::Hybrid:
            if (pending_decision_) {
                const SimilarityTransform rigid = estimate_rigid(tracks);
                const SimilarityTransform similarity = estimate_similarity(tracks);
                estimation_calls_ += 2;
                const double e_r = rms_residual(tracks, rigid);
                const double e_s = rms_residual(tracks, similarity);
                // E_s <= E_r always holds for nested least squares, so the
                // comparison tolerates near-ties in favor of the cheaper model.
                if (e_r <= e_s * (1.0 + cfg_.margin)) {
                    record_decision(ModelKind::Rigid);
                    out = rigid;
                } else {
                    record_decision(ModelKind::Similarity);
                    out = similarity;
                }
            } else {
                out = current_ == ModelKind::Rigid ? estimate_rigid(tracks)
                                                   : estimate_similarity(tracks);
                ++estimation_calls_;
            }
            break;
    }
    advance_counter();
    return out;
}

void ModelSelector::note_skipped() {
    if (frames_since_decision_ == 0) {
        pending_decision_ = true;
    }
    advance_counter();
}

}  // namespace stab
