#pragma once

#include <array>

#include "stab/frame.hpp"

namespace stab {

enum class ModelKind { Rigid, Similarity };

// 4-parameter planar motion model: q = s * R(theta) * p + (tx, ty).
// Rigid is the s == 1 restriction (3 degrees of freedom).
struct SimilarityTransform {
    double tx = 0.0;
    double ty = 0.0;
    double theta = 0.0;  // radians
    double s = 1.0;      // uniform scale, > 0
    ModelKind kind = ModelKind::Similarity;

    static SimilarityTransform identity(ModelKind k = ModelKind::Similarity) {
        SimilarityTransform t;
        t.kind = k;
        return t;
    }

    Point2 apply(Point2 p) const;
    Point2 apply_inverse(Point2 p) const;
    SimilarityTransform inverse() const;

    // Row-major 2x3 matrix [a -b tx; b a ty] with a = s*cos(theta), b = s*sin(theta).
    std::array<double, 6> matrix() const;
};

// second(first(p)). Kind is Rigid only when both inputs are rigid.
SimilarityTransform compose(const SimilarityTransform& second, const SimilarityTransform& first);

// Throws InvalidTransformError on non-finite parameters or s <= 0.
void validate(const SimilarityTransform& t);

// Per-frame-pair trajectory element. Scale is carried as log-scale so the
// parameters compose additively.
struct DeltaParams {
    double dx = 0.0;
    double dy = 0.0;
    double da = 0.0;   // radians
    double dls = 0.0;  // ln(s)
    ModelKind kind = ModelKind::Rigid;
    bool skipped = false;  // identity fallback used for this frame
};

}  // namespace stab
