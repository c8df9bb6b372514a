#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "stab/motion.hpp"

using namespace stab;

namespace {

bool close_rel(double got, double want, double tol = 1e-9) {
    return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

// Direct evaluation of the least-squares objective (mean form).
double oracle_objective(const TrackSet& t, double tx, double ty, double theta, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double c = s * std::cos(theta);
        const double sn = s * std::sin(theta);
        const double mx = c * t.prev_points[i].x - sn * t.prev_points[i].y + tx;
        const double my = sn * t.prev_points[i].x + c * t.prev_points[i].y + ty;
        const double dx = t.cur_points[i].x - mx;
        const double dy = t.cur_points[i].y - my;
        acc += dx * dx + dy * dy;
    }
    return acc / static_cast<double>(t.size());
}

}  // namespace

TEST_CASE("similarity estimation recovers exact generating transforms") {
    SUBCASE("identity") {
        fixtures::TestRng rng(1);
        const TrackSet set =
            fixtures::make_trackset(fixtures::random_points(rng, 10), SimilarityTransform{});
        const SimilarityTransform t = estimate_similarity(set);
        CHECK(close_rel(t.tx, 0.0));
        CHECK(close_rel(t.ty, 0.0));
        CHECK(close_rel(t.theta, 0.0));
        CHECK(close_rel(t.s, 1.0));
    }
    SUBCASE("pure translation") {
        fixtures::TestRng rng(2);
        SimilarityTransform truth;
        truth.tx = 3.0;
        truth.ty = 4.0;
        const TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 8), truth);
        const SimilarityTransform t = estimate_similarity(set);
        CHECK(close_rel(t.tx, 3.0));
        CHECK(close_rel(t.ty, 4.0));
        CHECK(close_rel(t.theta, 0.0));
        CHECK(close_rel(t.s, 1.0));
    }
    SUBCASE("full similarity, 20 points") {
        fixtures::TestRng rng(3);
        SimilarityTransform truth;
        truth.tx = 2.0;
        truth.ty = -1.0;
        truth.theta = 0.02;
        truth.s = 1.05;
        const TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 20), truth);
        const SimilarityTransform t = estimate_similarity(set);
        CHECK(close_rel(t.tx, truth.tx));
        CHECK(close_rel(t.ty, truth.ty));
        CHECK(close_rel(t.theta, truth.theta));
        CHECK(close_rel(t.s, truth.s));
        CHECK(rms_residual(set, t) < 1e-9);

        // Optimality spot check: the closed form beats random perturbations.
        const double best = oracle_objective(set, t.tx, t.ty, t.theta, t.s);
        for (int i = 0; i < 100; ++i) {
            const double obj = oracle_objective(
                set, t.tx + rng.uniform(-0.5, 0.5), t.ty + rng.uniform(-0.5, 0.5),
                t.theta + rng.uniform(-0.02, 0.02), t.s * (1.0 + rng.uniform(-0.02, 0.02)));
            CHECK(best <= obj + 1e-15);
        }
    }
}

TEST_CASE("rigid estimation recovers rotations exactly and pins s = 1") {
    fixtures::TestRng rng(4);
    const std::vector<Point2> src = fixtures::random_points(rng, 15);
    // Rotate about the centroid so the translation is zero by construction.
    Point2 centroid{0.0, 0.0};
    for (const Point2& p : src) {
        centroid.x += p.x / src.size();
        centroid.y += p.y / src.size();
    }
    const double theta = 0.3;
    TrackSet set;
    set.prev_points = src;
    for (const Point2& p : src) {
        const double dx = p.x - centroid.x;
        const double dy = p.y - centroid.y;
        set.cur_points.push_back({centroid.x + std::cos(theta) * dx - std::sin(theta) * dy,
                                  centroid.y + std::sin(theta) * dx + std::cos(theta) * dy});
    }
    const SimilarityTransform t = estimate_rigid(set);
    CHECK(t.kind == ModelKind::Rigid);
    CHECK(t.s == 1.0);
    CHECK(close_rel(t.theta, theta));
    CHECK(rms_residual(set, t) < 1e-9);
}

TEST_CASE("rigid fit of scaled data keeps s = 1 and loses to the similarity fit") {
    fixtures::TestRng rng(5);
    SimilarityTransform truth;
    truth.s = 1.2;
    const TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 12), truth);
    const SimilarityTransform rigid = estimate_rigid(set);
    const SimilarityTransform similarity = estimate_similarity(set);
    CHECK(rigid.s == 1.0);
    CHECK(rms_residual(set, rigid) > 1e-3);
    CHECK(rms_residual(set, similarity) <= rms_residual(set, rigid));
    CHECK(close_rel(similarity.s, 1.2));
}

TEST_CASE("estimators are invariant to relabeling of the pairs") {
    fixtures::TestRng rng(6);
    SimilarityTransform truth;
    truth.tx = -4.0;
    truth.ty = 2.5;
    truth.theta = 0.15;
    truth.s = 0.93;
    TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 30), truth);
    // Add noise so the fit is not exact (the permutation must not matter).
    for (Point2& p : set.cur_points) {
        p.x += rng.uniform(-0.3, 0.3);
        p.y += rng.uniform(-0.3, 0.3);
    }
    const SimilarityTransform a = estimate_similarity(set);

    TrackSet shuffled;
    shuffled.frame_index = set.frame_index;
    std::vector<std::size_t> order(set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.next_u64() % i]);
    }
    for (std::size_t i : order) {
        shuffled.prev_points.push_back(set.prev_points[i]);
        shuffled.cur_points.push_back(set.cur_points[i]);
    }
    const SimilarityTransform b = estimate_similarity(shuffled);
    CHECK(a.tx == doctest::Approx(b.tx).epsilon(1e-12));
    CHECK(a.ty == doctest::Approx(b.ty).epsilon(1e-12));
    CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-12));
    CHECK(a.s == doctest::Approx(b.s).epsilon(1e-12));
}

TEST_CASE("similarity residual never exceeds the rigid residual") {
    fixtures::TestRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        TrackSet set;
        const int n = rng.uniform_int(2, 40);
        set.prev_points = fixtures::random_points(rng, n);
        for (const Point2& p : set.prev_points) {
            set.cur_points.push_back({p.x + rng.uniform(-5, 5), p.y + rng.uniform(-5, 5)});
        }
        const double er = rms_residual(set, estimate_rigid(set));
        const double es = rms_residual(set, estimate_similarity(set));
        CHECK(es <= er + 1e-12 * std::max(1.0, er));
    }
}

TEST_CASE("degenerate inputs are rejected") {
    TrackSet one;
    one.prev_points = {{1.0, 1.0}};
    one.cur_points = {{2.0, 2.0}};
    CHECK_THROWS_AS(estimate_similarity(one), DegenerateInputError);
    CHECK_THROWS_AS(estimate_rigid(one), DegenerateInputError);

    TrackSet coincident;
    coincident.prev_points = {{3.0, 3.0}, {3.0, 3.0}, {3.0, 3.0}};
    coincident.cur_points = {{4.0, 4.0}, {5.0, 5.0}, {6.0, 6.0}};
    CHECK_THROWS_AS(estimate_similarity(coincident), DegenerateInputError);

    TrackSet empty;
    CHECK_THROWS_AS(rms_residual(empty, SimilarityTransform{}), DegenerateInputError);
}

TEST_CASE("rms_residual basics and oracle agreement") {
    TrackSet set;
    set.prev_points = {{0.0, 0.0}, {10.0, 0.0}};
    set.cur_points = {{0.0, 0.0}, {10.0, 0.0}};
    CHECK(rms_residual(set, SimilarityTransform{}) == 0.0);

    TrackSet single;
    single.prev_points = {{1.0, 2.0}, {1.0, 2.0}};
    single.cur_points = {{1.0, 7.0}, {1.0, 7.0}};
    CHECK(rms_residual(single, SimilarityTransform{}) == doctest::Approx(5.0));

    fixtures::TestRng rng(8);
    SimilarityTransform truth;
    truth.s = 1.1;
    truth.theta = -0.2;
    truth.tx = 6.0;
    const TrackSet gen = fixtures::make_trackset(fixtures::random_points(rng, 25), truth);
    CHECK(rms_residual(gen, estimate_similarity(gen)) < 1e-9);
    const SimilarityTransform rigid = estimate_rigid(gen);
    CHECK(rms_residual(gen, rigid) ==
          doctest::Approx(std::sqrt(oracle_objective(gen, rigid.tx, rigid.ty, rigid.theta, rigid.s)))
              .epsilon(1e-12));
}

TEST_CASE("extract_delta and the matrix round trip") {
    CHECK(extract_delta(SimilarityTransform::identity()).dx == 0.0);
    CHECK(extract_delta(SimilarityTransform::identity()).dls == 0.0);

    SimilarityTransform t;
    t.tx = 2.0;
    t.ty = -1.0;
    t.theta = 0.02;
    t.s = 1.05;
    const DeltaParams d = extract_delta(t);
    CHECK(d.dx == 2.0);
    CHECK(d.dy == -1.0);
    CHECK(d.da == 0.02);
    CHECK(d.dls == doctest::Approx(std::log(1.05)).epsilon(1e-15));

    // extract -> rebuild from the 2x3 matrix -> extract is exact to 1e-12.
    const auto m = t.matrix();
    SimilarityTransform rebuilt;
    rebuilt.theta = std::atan2(m[3], m[0]);
    rebuilt.s = std::hypot(m[3], m[0]);
    rebuilt.tx = m[2];
    rebuilt.ty = m[5];
    const DeltaParams d2 = extract_delta(rebuilt);
    CHECK(d2.dx == doctest::Approx(d.dx).epsilon(1e-12));
    CHECK(d2.dy == doctest::Approx(d.dy).epsilon(1e-12));
    CHECK(d2.da == doctest::Approx(d.da).epsilon(1e-12));
    CHECK(d2.dls == doctest::Approx(d.dls).epsilon(1e-12));

    SimilarityTransform rigid;
    rigid.kind = ModelKind::Rigid;
    rigid.theta = 0.4;
    CHECK(extract_delta(rigid).dls == 0.0);
}

namespace {

TrackSet rigid_trackset(fixtures::TestRng& rng, double theta, double tx, double ty) {
    SimilarityTransform t;
    t.theta = theta;
    t.tx = tx;
    t.ty = ty;
    return fixtures::make_trackset(fixtures::random_points(rng, 20), t);
}

}  // namespace

TEST_CASE("hybrid selector: rigid stream decides rigid at every decision frame") {
    fixtures::TestRng rng(9);
    SelectorConfig cfg;  // dwell 20, margin 0.05
    ModelSelector selector(cfg);
    selector.note_skipped();  // frame 0 has no pair
    for (int i = 1; i < 100; ++i) {
        const TrackSet set = rigid_trackset(rng, 0.01 * (i % 3), 1.0, -0.5);
        const SimilarityTransform t = selector.select(set);
        CHECK(t.kind == ModelKind::Rigid);
    }
    CHECK(selector.rigid_decisions() == 5);  // ceil(100 / 20)
    CHECK(selector.similarity_decisions() == 0);
}

TEST_CASE("hybrid selector: zoom stream decides similarity at every decision frame") {
    fixtures::TestRng rng(10);
    SelectorConfig cfg;
    ModelSelector selector(cfg);
    selector.note_skipped();
    for (int i = 1; i < 200; ++i) {
        SimilarityTransform t;
        t.s = 1.0 + 0.10 * i / 200.0;  // ramp 1.00 -> 1.10
        const TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 25), t);
        const SimilarityTransform fit = selector.select(set);
        CHECK(fit.kind == ModelKind::Similarity);
    }
    CHECK(selector.similarity_decisions() == 10);
    CHECK(selector.rigid_decisions() == 0);
}

TEST_CASE("selector call accounting: one fit per frame between decisions") {
    fixtures::TestRng rng(11);
    SelectorConfig cfg;
    ModelSelector selector(cfg);
    selector.note_skipped();
    std::int64_t expected_calls = 0;
    for (int i = 1; i < 61; ++i) {
        const TrackSet set = rigid_trackset(rng, 0.0, 2.0, 0.0);
        const std::int64_t before = selector.estimation_calls();
        selector.select(set);
        const std::int64_t used = selector.estimation_calls() - before;
        const bool decision_frame = (i == 1) || (i % 20 == 0);
        CHECK(used == (decision_frame ? 2 : 1));
        expected_calls += used;
    }
    CHECK(selector.estimation_calls() == expected_calls);
    // Decisions at frames 1 (deferred from 0), 20, 40, 60.
    CHECK(selector.rigid_decisions() + selector.similarity_decisions() == 4);
}

TEST_CASE("selector: the active kind changes only at decision frames") {
    fixtures::TestRng rng(12);
    SelectorConfig cfg;
    cfg.dwell = 10;
    ModelSelector selector(cfg);
    selector.note_skipped();
    ModelKind last = ModelKind::Rigid;
    for (int i = 1; i < 50; ++i) {
        // Alternate rigid-looking and zooming tracksets; between decision
        // frames the kind must stay put regardless of the data.
        SimilarityTransform t;
        t.s = (i % 2 == 0) ? 1.3 : 1.0;
        const TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 15), t);
        selector.select(set);
        const bool decision_frame = (i == 1) || (i % 10 == 0);
        if (!decision_frame) {
            CHECK(selector.current_kind() == last);
        }
        last = selector.current_kind();
    }
}

TEST_CASE("forced modes count every decision for the forced kind") {
    fixtures::TestRng rng(13);
    SelectorConfig cfg;
    cfg.mode = SelectionMode::ForceRigid;
    ModelSelector selector(cfg);
    selector.note_skipped();
    for (int i = 1; i < 100; ++i) {
        SimilarityTransform t;
        t.s = 1.2;  // clearly similarity data; forced mode must ignore it
        const TrackSet set = fixtures::make_trackset(fixtures::random_points(rng, 15), t);
        CHECK(selector.select(set).kind == ModelKind::Rigid);
    }
    CHECK(selector.rigid_decisions() == 5);
    CHECK(selector.similarity_decisions() == 0);
}

TEST_CASE("skipped frames advance the dwell counter") {
    fixtures::TestRng rng(14);
    SelectorConfig cfg;
    cfg.dwell = 4;
    ModelSelector selector(cfg);
    // Frames 0..3 skipped; the pending decision fires at the first tracked
    // frame of the next epoch without double counting.
    for (int i = 0; i < 4; ++i) selector.note_skipped();
    CHECK(selector.frames_since_decision() == 0);
    const TrackSet set = rigid_trackset(rng, 0.0, 1.0, 1.0);
    selector.select(set);
    CHECK(selector.rigid_decisions() + selector.similarity_decisions() == 1);
    selector.select(set);
    selector.select(set);
    CHECK(selector.rigid_decisions() + selector.similarity_decisions() == 1);
}

TEST_CASE("selector config validation") {
    SelectorConfig cfg;
    cfg.dwell = 0;
    CHECK_THROWS_AS(validate(cfg), InvalidConfigError);
    cfg = SelectorConfig{};
    cfg.margin = -0.1;
    CHECK_THROWS_AS(validate(cfg), InvalidConfigError);
}
