#include "helpers.hpp"
#include "trajkit/experiment.hpp"
#include "trajkit/local_frame.hpp"

#include <numbers>
#include <set>

using namespace trajkit;

TEST_CASE("stratified_split: per-class counts and determinism") {
    std::vector<FlightState> labels;
    for (int i = 0; i < 47; ++i) labels.push_back(state_from_index(i % 5));
    const auto a = stratified_split(labels, 0.2, 3);
    const auto b = stratified_split(labels, 0.2, 3);
    CHECK(a.test == b.test);
    CHECK(a.train.size() + a.test.size() == labels.size());
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    all.insert(a.test.begin(), a.test.end());
    CHECK(all.size() == labels.size());
    std::array<int, 5> per{};
    for (auto i : a.test) ++per[static_cast<std::size_t>(index_of(labels[i]))];
    CHECK(per[0] == 2);  // round(0.2 * 10)
    CHECK(per[4] == 2);  // round(0.2 * 9)
    CHECK(stratified_split(labels, 0.2, 4).test != a.test);
    CHECK_KIND(stratified_split(labels, 1.0, 3), ErrorKind::InvalidArgument);
}

TEST_CASE("stage seeds differ per stage") {
    CHECK(stage_seed(7, SeedStage::Corpus) != stage_seed(7, SeedStage::Split));
    CHECK(stage_seed(7, SeedStage::Mlp) == stage_seed(7, SeedStage::Mlp));
}

TEST_CASE("central_velocity_frames") {
    std::vector<FlightFrame> f(5);
    for (std::size_t i = 0; i < 5; ++i) {
        f[i].t = 0.1 * static_cast<double>(i);
        const double t = f[i].t;
        f[i].pos = Vec3(t * t, 2 * t, 0);
    }
    const auto c = central_velocity_frames(f);
    REQUIRE(c.size() == 3);
    CHECK(c[0].t == f[1].t);
    CHECK(c[1].vel.isApprox(Vec3(0.4, 2, 0)));
    CHECK(c[1].speed_mag == doctest::Approx(c[1].vel.norm()));
    CHECK_KIND(central_velocity_frames(std::span<const FlightFrame>(f).first(2)), ErrorKind::InsufficientData);
}

TEST_CASE("local frame: isometry, track alignment and mirroring") {
    std::vector<FlightFrame> hist(20);
    const double psi = 2.3;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const double t = 5.0 + 0.1 * static_cast<double>(i);
        hist[i].t = t;
        hist[i].pos = Vec3(3, -4, 90) + 10.0 * (t - 5.0) * Vec3(std::cos(psi), std::sin(psi), 0.1);
    }
    const auto fr = LocalFrame::from_history(hist, 10);
    const Vec3 p(1, 2, 3), q(-7, 0.5, 100);
    CHECK(((fr.to_local(p) - fr.to_local(q)).norm()) == doctest::Approx((p - q).norm()));
    CHECK((fr.to_world(fr.to_local(p)) - p).norm() < 1e-9);
    CHECK(fr.time_to_local(hist[0].t) == 0.0);
    CHECK(fr.to_local(hist[0].pos).norm() < 1e-9);
    // Straight history: the start velocity points along +x.
    const Vec3 v = fr.start().vel;
    CHECK(v.y() == doctest::Approx(0.0).scale(10.0));
    CHECK(v.x() == doctest::Approx(10.0));
    CHECK(v.z() == doctest::Approx(1.0));

    // A clockwise arc is mirrored so it turns counter-clockwise locally.
    std::vector<FlightFrame> cw(20);
    for (std::size_t i = 0; i < cw.size(); ++i) {
        const double a = 0.05 * static_cast<double>(i);
        cw[i].t = 0.1 * static_cast<double>(i);
        cw[i].pos = Vec3(30 * std::sin(a), -30 * (1 - std::cos(a)), 0);
        cw[i].attitude = Vec3(0, 0, -a);
    }
    const auto m = LocalFrame::from_history(cw, 10);
    CHECK(m.mirrored());
    // Its mirror image turns counter-clockwise and must land on the same local track.
    std::vector<FlightFrame> ccw = cw;
    for (auto& f : ccw) {
        f.pos.y() = -f.pos.y();
        f.attitude.z() = -f.attitude.z();
    }
    const auto c = LocalFrame::from_history(ccw, 10);
    CHECK(!c.mirrored());
    for (std::size_t i = 0; i < cw.size(); ++i) CHECK((m.to_local(cw[i].pos) - c.to_local(ccw[i].pos)).norm() < 1e-9);
    CHECK(c.to_local(ccw.back().pos).y() < 0.0);  // a left turn's chord lies right of the final track
}

TEST_CASE("run_experiment on a small corpus") {
    ExperimentConfig cfg;
    // Very small corpora can fit quadratic fields that escape to infinity
    // inside the horizon; 16 streams per state is clear of that.
    cfg.corpus.per_state.fill(16);
    cfg.mlp.epochs = 50;
    const auto r = run_experiment(cfg);
    CHECK(r.split.test.size() == 5 * 3);
    CHECK(r.adams.complete());
    CHECK(r.mlp.complete());
    CHECK(r.classification.total == 15);
    CHECK(r.pca.retained_ratio >= 0.85);
    CHECK(r.comparison.recognized.size() == 15);
    const auto again = run_experiment(cfg);
    CHECK(again.comparison.adams_with.overall.mu == r.comparison.adams_with.overall.mu);
    CHECK(again.comparison.mlp_without.overall.mu == r.comparison.mlp_without.overall.mu);
}
