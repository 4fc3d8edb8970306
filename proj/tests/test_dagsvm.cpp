#include "helpers.hpp"
#include "trajkit/dagsvm.hpp"

#include <random>

using namespace trajkit;

namespace {

struct Clusters {
    MatrixX x;
    std::vector<FlightState> y;
};

Clusters five_clusters(int per, double spread, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    Clusters c;
    c.x.resize(5 * per, 2);
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * 3.14159265358979 * k / 5.0;
        for (int i = 0; i < per; ++i) {
            c.x.row(k * per + i) << 4.0 * std::cos(a) + spread * n01(rng), 4.0 * std::sin(a) + spread * n01(rng);
            c.y.push_back(state_from_index(k));
        }
    }
    return c;
}

} // namespace

TEST_CASE("svm: two symmetric points") {
    MatrixX x(2, 2);
    x << -1, 0, 1, 0;
    VectorX y(2);
    y << -1, 1;
    SvmParams p;
    p.C = 10;
    p.kernel = Kernel::linear();
    const auto r = svm_train(x, y, p);
    CHECK(r.model.support_vectors.rows() == 2);
    CHECK(r.model.decision(Vec3(0, 5, 0).head<2>()) == doctest::Approx(0.0).scale(1.0));
    CHECK(r.model.decision(VectorX::Unit(2, 0)) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.model.decision(-VectorX::Unit(2, 0)) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("svm: XOR with an RBF kernel") {
    MatrixX x(4, 2);
    x << 0, 0, 1, 1, 0, 1, 1, 0;
    VectorX y(4);
    y << -1, -1, 1, 1;
    SvmParams p;
    p.C = 10;
    p.kernel = Kernel::rbf(1.0);
    const auto r = svm_train(x, y, p);
    for (int i = 0; i < 4; ++i) CHECK(r.model.decision(x.row(i).transpose()) * y(i) > 0.0);
    CHECK(kkt_violation(r, x, y, p.C) < 1e-3);
}

TEST_CASE("svm: KKT conditions hold on overlapping data") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    MatrixX x(80, 3);
    VectorX y(80);
    for (int i = 0; i < 80; ++i) {
        y(i) = i % 2 ? 1.0 : -1.0;
        for (int j = 0; j < 3; ++j) x(i, j) = n01(rng) + 0.8 * y(i);
    }
    for (auto kernel : {Kernel::linear(), Kernel::rbf(0.5)}) {
        SvmParams p;
        p.C = 2.0;
        p.kernel = kernel;
        const auto r = svm_train(x, y, p);
        CHECK(kkt_violation(r, x, y, p.C) < 1e-3);
        CHECK((r.alpha.array() >= 0.0).all());
        CHECK((r.alpha.array() <= p.C).all());
        CHECK(std::abs(r.alpha.dot(y)) < 1e-9);
    }
}

TEST_CASE("svm: single-class labels") {
    CHECK_KIND(svm_train(MatrixX::Random(4, 2), VectorX::Ones(4), SvmParams{}), ErrorKind::DegenerateLabels);
}

TEST_CASE("dag_walk: forced path and evaluation count") {
    int calls = 0;
    const auto r = dag_walk(kAllStates, [&](FlightState a, FlightState b) {
        ++calls;
        if (a == FlightState::Climb) return 1.0;
        if (b == FlightState::Climb) return -1.0;
        return 0.5;
    });
    CHECK(r.state == FlightState::Climb);
    CHECK(r.path.size() == 4);
    CHECK(calls == 4);
    CHECK(r.path[0].first == FlightState::Climb);
    CHECK(r.path[0].second == FlightState::Descent);
}

TEST_CASE("dag_walk: a total order of strengths always yields the strongest") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<double, kNumStates> strength{};
        for (auto& s : strength) s = std::uniform_real_distribution<double>(0, 1)(rng);
        const auto r = dag_walk(kAllStates, [&](FlightState a, FlightState b) {
            return strength[static_cast<std::size_t>(index_of(a))] - strength[static_cast<std::size_t>(index_of(b))];
        });
        const auto best = std::max_element(strength.begin(), strength.end()) - strength.begin();
        CHECK(index_of(r.state) == best);
    }
}

TEST_CASE("dagsvm: agrees with one-vs-one voting on separated clusters") {
    const auto c = five_clusters(40, 0.8, 21);
    DagSvmParams p;
    p.C = 10;
    const auto model = dagsvm_train(c.x, c.y, p);
    const auto test = five_clusters(60, 0.8, 22);
    int agree = 0, correct = 0;
    for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
        const VectorX xi = test.x.row(i).transpose();
        const auto d = dag_classify(model, xi).state;
        agree += d == vote_classify(model, xi);
        correct += d == test.y[static_cast<std::size_t>(i)];
    }
    CHECK(agree >= 0.95 * static_cast<double>(test.x.rows()));
    CHECK(correct >= 0.9 * static_cast<double>(test.x.rows()));
    CHECK_KIND(dag_classify(model, VectorX::Zero(3)), ErrorKind::DimensionError);
}

TEST_CASE("dagsvm: only the signs of decisions matter") {
    const auto c = five_clusters(20, 1.5, 31);
    const auto model = dagsvm_train(c.x, c.y, DagSvmParams{});
    for (Eigen::Index i = 0; i < c.x.rows(); ++i) {
        const VectorX xi = c.x.row(i).transpose();
        auto raw = [&](FlightState a, FlightState b) {
            const auto& svm = model.classifier(a, b);
            const double d = svm.decision(xi);
            return svm.positive == a ? d : -d;
        };
        const auto base = dag_walk(model.order, raw).state;
        const auto warped = dag_walk(model.order, [&](FlightState a, FlightState b) { return std::cbrt(raw(a, b)) * 7.0; }).state;
        CHECK(base == warped);
        CHECK(base == dag_classify(model, xi).state);
    }
}

TEST_CASE("weighted_f1: reported precision, recall and F1 triples") {
    struct Row {
        double p, r, f1;
    };
    // Precision, recall and F1 in percent, training then test rows.
    const Row rows[] = {{97.54, 99.25, 98.05}, {97.41, 98.63, 97.77}, {96.13, 93.25, 95.25}, {95.46, 94.63, 95.21},
                        {98.02, 98.88, 98.27}, {92.65, 94.50, 93.20}, {84.04, 79.00, 82.46}, {82.74, 81.50, 82.36}};
    for (const auto& row : rows) CHECK(std::abs(100.0 * weighted_f1(row.p / 100, row.r / 100, 0.7) - row.f1) <= 0.1);

    // Level-flight and descent test entries are not consistent with any
    // weight near 0.7: solving 1/F = a/p + (1 - a)/r for a gives 0.625 and 0.989.
    const Row odd[] = {{89.47, 93.50, 90.94}, {92.57, 93.50, 92.58}};
    const double solved[] = {0.625, 0.989};
    for (int i = 0; i < 2; ++i) {
        const auto& row = odd[i];
        const double a = (1.0 / row.f1 - 1.0 / row.r) / (1.0 / row.p - 1.0 / row.r);
        CHECK(a == doctest::Approx(solved[i]).epsilon(0.002));
        CHECK(std::abs(100.0 * weighted_f1(row.p / 100, row.r / 100, a) - row.f1) < 1e-9);
    }
}

TEST_CASE("weighted_f1: special cases") {
    CHECK(weighted_f1(0.42, 0.42, 0.3) == doctest::Approx(0.42));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double p = u(rng), r = u(rng);
        CHECK(std::abs(weighted_f1(p, r, 0.5) - 2 * p * r / (p + r)) < 1e-12);
    }
    CHECK_KIND(weighted_f1(0.0, 0.5, 0.7), ErrorKind::MetricUndefined);
    CHECK_KIND(weighted_f1(0.5, 0.0, 0.7), ErrorKind::MetricUndefined);
}

TEST_CASE("score_predictions: counting") {
    std::vector<FlightState> truth;
    for (auto s : kAllStates)
        for (int i = 0; i < 4; ++i) truth.push_back(s);
    const auto perfect = score_predictions(truth, truth);
    CHECK(perfect.accuracy == 1.0);
    for (int i = 0; i < kNumStates; ++i) {
        CHECK(perfect.f1[static_cast<std::size_t>(i)] == 1.0);
        CHECK(perfect.confusion.counts(i, i) == 4);
    }
    const std::vector<FlightState> all_a(truth.size(), FlightState::Climb);
    const auto lazy = score_predictions(truth, all_a);
    CHECK(lazy.recall[0] == 1.0);
    CHECK(lazy.precision[0] == doctest::Approx(0.2));
    CHECK(lazy.accuracy == doctest::Approx(0.2));
    CHECK(lazy.confusion.counts.col(0).sum() == 20);
    CHECK_KIND(score_predictions(std::vector<FlightState>{}, std::vector<FlightState>{}), ErrorKind::InsufficientData);
}
