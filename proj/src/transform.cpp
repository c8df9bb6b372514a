#include "stab/transform.hpp"

#include <cmath>

namespace stab {

Point2 SimilarityTransform::apply(Point2 p) const {
    const double c = s * std::cos(theta);
    const double sn = s * std::sin(theta);
    return {c * p.x - sn * p.y + tx, sn * p.x + c * p.y + ty};
}

Point2 SimilarityTransform::apply_inverse(Point2 p) const {
    const double c = std::cos(theta) / s;
    const double sn = std::sin(theta) / s;
    const double dx = p.x - tx;
    const double dy = p.y - ty;
    return {c * dx + sn * dy, -sn * dx + c * dy};
}

SimilarityTransform SimilarityTransform::inverse() const {
    SimilarityTransform inv;
    inv.s = 1.0 / s;
    inv.theta = -theta;
    const Point2 o = apply_inverse({0.0, 0.0});
    inv.tx = o.x;
    inv.ty = o.y;
    inv.kind = kind;
    return inv;
}

std::array<double, 6> SimilarityTransform::matrix() const {
    const double a = s * std::cos(theta);
    const double b = s * std::sin(theta);
    return {a, -b, tx, b, a, ty};
}

SimilarityTransform compose(const SimilarityTransform& second, const SimilarityTransform& first) {
    SimilarityTransform out;
    out.s = second.s * first.s;
    out.theta = second.theta + first.theta;
    const Point2 t = second.apply({first.tx, first.ty});
    out.tx = t.x;
    out.ty = t.y;
    out.kind = (second.kind == ModelKind::Rigid && first.kind == ModelKind::Rigid)
                   ? ModelKind::Rigid
                   : ModelKind::Similarity;
    return out;
}

void validate(const SimilarityTransform& t) {
    if (!std::isfinite(t.tx) || !std::isfinite(t.ty) || !std::isfinite(t.theta) ||
        !std::isfinite(t.s) || t.s <= 0.0) {
        throw InvalidTransformError("similarity transform requires finite parameters and s > 0");
    }
    if (t.kind == ModelKind::Rigid && t.s != 1.0) {
        throw InvalidTransformError("rigid transform must have s == 1");
    }
}

}  // namespace stab
