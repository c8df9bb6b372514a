#include "stab/smoothing.hpp"

#include <algorithm>

#include "stab/errors.hpp"
#include "stab/motion.hpp"

namespace stab {

void validate(const SmoothConfig& cfg) {
    if (cfg.radius < 1) {
        throw InvalidConfigError("smoothing radius must be >= 1");
    }
}

void Trajectory::append(const DeltaParams& d) {
    Params4 c = cumulative_.empty() ? Params4{} : cumulative_.back();
    c.x += d.dx;
    c.y += d.dy;
    c.a += d.da;
    c.ls += d.dls;
    deltas_.push_back(d);
    cumulative_.push_back(c);
}

std::optional<Params4> Trajectory::smooth_at(std::size_t i, const SmoothConfig& cfg) const {
    validate(cfg);
    if (i >= size()) {
        throw InvalidInputError("smooth_at index past the trajectory");
    }
    const std::size_t r = static_cast<std::size_t>(cfg.radius);
    if (!complete_ && i + r >= size()) {
        return std::nullopt;  // window still extends past the known stream
    }
    const std::size_t lo = i >= r ? i - r : 0;
    const std::size_t hi = std::min(i + r, size() - 1);
    Params4 sum;
    for (std::size_t j = lo; j <= hi; ++j) {
        sum.x += cumulative_[j].x;
        sum.y += cumulative_[j].y;
        sum.a += cumulative_[j].a;
        sum.ls += cumulative_[j].ls;
    }
    const double n = static_cast<double>(hi - lo + 1);
    return Params4{sum.x / n, sum.y / n, sum.a / n, sum.ls / n};
}

std::optional<SimilarityTransform> Trajectory::correction(std::size_t i,
                                                          const SmoothConfig& cfg) const {
    const std::optional<Params4> smoothed = smooth_at(i, cfg);
    if (!smoothed) {
        return std::nullopt;
    }
    const Params4& cum = cumulative_[i];
    return delta_to_transform(smoothed->x - cum.x, smoothed->y - cum.y, smoothed->a - cum.a,
                              smoothed->ls - cum.ls);
}

}  // namespace stab
