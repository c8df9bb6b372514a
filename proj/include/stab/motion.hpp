#pragma once

#include <cstdint>

#include "stab/flow.hpp"
#include "stab/transform.hpp"

namespace stab {

// Global least-squares similarity fit (2D Procrustes closed form):
// demeaned rotation from atan2 of the cross/dot sums, scale from the
// projection onto the rotated source, translation between centroids.
SimilarityTransform estimate_similarity(const TrackSet& tracks);

// Same fit with scale fixed at 1.
SimilarityTransform estimate_rigid(const TrackSet& tracks);

// sqrt(mean over pairs of |dst - t(src)|^2), in pixels.
double rms_residual(const TrackSet& tracks, const SimilarityTransform& t);

// dx = tx, dy = ty, da = theta, dls = ln(s); rigid transforms yield dls == 0.
DeltaParams extract_delta(const SimilarityTransform& t);

// Correction/delta parameters back to a transform: s = exp(dls).
SimilarityTransform delta_to_transform(double dx, double dy, double da, double dls);

enum class SelectionMode { Hybrid, ForceRigid, ForceSimilarity };

struct SelectorConfig {
    int dwell = 20;        // frames a decision stays in force
    double margin = 0.05;  // rigid wins while E_r <= E_s * (1 + margin)
    SelectionMode mode = SelectionMode::Hybrid;
};

void validate(const SelectorConfig& cfg);

// Hybrid rigid/similarity selection: on decision frames both models are
// fitted and their RMS residuals compared; the winner is held for the next
// dwell frames, during which only that model is fitted. Skipped frames
// advance the dwell counter; a decision that falls on a skipped frame is
// taken at the next trackable frame.
class ModelSelector {
  public:
    explicit ModelSelector(SelectorConfig cfg);

    SimilarityTransform select(const TrackSet& tracks);
    void note_skipped();

    ModelKind current_kind() const { return current_; }
    std::int64_t rigid_decisions() const { return rigid_decisions_; }
    std::int64_t similarity_decisions() const { return similarity_decisions_; }
    std::int64_t estimation_calls() const { return estimation_calls_; }
    int frames_since_decision() const { return frames_since_decision_; }

  private:
    SelectorConfig cfg_;
    ModelKind current_ = ModelKind::Rigid;
    int frames_since_decision_ = 0;
    bool pending_decision_ = true;
    std::int64_t rigid_decisions_ = 0;
    std::int64_t similarity_decisions_ = 0;
    std::int64_t estimation_calls_ = 0;

    void advance_counter();
    void record_decision(ModelKind kind);
};

}  // namespace stab
