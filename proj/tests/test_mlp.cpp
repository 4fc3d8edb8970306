#include "helpers.hpp"
#include "trajkit/mlp.hpp"
#include "trajkit/simgen.hpp"

#include <random>

using namespace trajkit;

namespace {

MlpBatch random_batch(Eigen::Index in, Eigen::Index out, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    MlpBatch b{MatrixX(in, n), MatrixX(out, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < in; ++i) b.x(i, j) = n01(rng);
        for (Eigen::Index i = 0; i < out; ++i) b.y(i, j) = n01(rng);
    }
    return b;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

} // namespace

TEST_CASE("mlp gradients match central differences for every parameter") {
    auto m = mlp_init(7, 8, 4, 42);
    m.b1.setConstant(0.05);  // keeps every hidden unit clear of the ReLU kink
    const auto batch = random_batch(7, 4, 16, 3);
    const auto g = mlp_gradients(m, batch);
    const double eps = 1e-5;
    auto check = [&](auto& param, const auto& grad) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
            const double keep = param.data()[i];
            param.data()[i] = keep + eps;
            const double up = mlp_loss(m, batch);
            param.data()[i] = keep - eps;
            const double down = mlp_loss(m, batch);
            param.data()[i] = keep;
            CHECK(rel_err((up - down) / (2 * eps), grad.data()[i]) < 1e-4);
        }
    };
    check(m.w1, g.w1);
    check(m.b1, g.b1);
    check(m.w2, g.w2);
    check(m.b2, g.b2);
}

TEST_CASE("mlp forward pass by hand") {
    MlpModel m = mlp_init(2, 2, 1, 1);
    m.w1 << 1.0, -2.0, 0.5, 0.25;
    m.b1 << 0.1, -3.0;
    m.w2 << 2.0, -1.0;
    m.b2 << 0.5;
    m.input_norm = Normalization::identity(2);
    m.output_norm = Normalization::identity(1);
    VectorX x(2);
    x << 0.3, -0.4;
    // hidden: relu(0.3 + 0.8 + 0.1) = 1.2, relu(0.15 - 0.1 - 3.0) = 0
    CHECK(std::abs(mlp_forward(m, x)(0) - (2.0 * 1.2 + 0.5)) < 1e-12);
    CHECK(std::abs(mlp_predict(m, x)(0) - 2.9) < 1e-12);

    MlpModel zero = mlp_init(7, 8, 4, 1);
    zero.w1.setZero();
    zero.b1.setZero();
    zero.w2.setZero();
    zero.b2.setZero();
    zero.input_norm = Normalization::identity(7);
    zero.output_norm = Normalization::identity(4);
    CHECK(mlp_predict(zero, VectorX::Ones(7)).norm() == 0.0);
    VectorX bad = VectorX::Ones(7);
    bad(3) = std::nan("");
    CHECK_KIND(mlp_predict(zero, bad), ErrorKind::InvalidData);
}

TEST_CASE("mlp init is seeded and bounded") {
    const auto a = mlp_init(7, 8, 4, 9), b = mlp_init(7, 8, 4, 9), c = mlp_init(7, 8, 4, 10);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    CHECK(a.w1 != c.w1);
    CHECK(a.w1.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 15.0));
    CHECK(a.w2.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 12.0));
    CHECK(a.b1 == VectorX::Ones(8));
    CHECK(a.b2 == VectorX::Zero(4));
}

TEST_CASE("normalization round trip") {
    const MatrixX rows = MatrixX::Random(30, 5) * 40.0;
    const auto n = Normalization::fit(rows);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const VectorX x = rows.row(i).transpose();
        CHECK((n.invert(n.apply(x)) - x).norm() < 1e-12 * std::max(1.0, x.norm()));
    }
}

TEST_CASE("mlp training: zero targets with a zero output layer") {
    const MatrixX x = MatrixX::Random(20, 3);
    const MatrixX y = MatrixX::Zero(20, 2);
    MlpTrainOptions opt;
    opt.epochs = 3;
    opt.zero_output_layer = true;
    opt.record_trace = true;
    opt.normalize = false;
    const auto r = mlp_train(x, y, opt);
    CHECK(r.loss_trace.front() == 0.0);
    CHECK(r.model.w2.norm() == 0.0);
    CHECK(r.model.b2.norm() == 0.0);
}

TEST_CASE("mlp training: linear map on the positive orthant") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    MatrixX w(4, 7);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng) - 0.5;
    MatrixX x(200, 7);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    const MatrixX y = x * w.transpose();
    MlpTrainOptions opt;
    opt.lr = 0.01;
    opt.epochs = 5000;
    opt.record_trace = true;
    const auto r = mlp_train(x, y, opt);
    double mse = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        mse += (mlp_predict(r.model, x.row(i).transpose()) - y.row(i).transpose()).squaredNorm();
    mse /= static_cast<double>(x.rows() * 4);
    CHECK(mse < 1e-3);
    CHECK(r.loss_trace.back() < r.loss_trace.front());

    const auto again = mlp_train(x, y, opt);
    CHECK(again.model.w1 == r.model.w1);
    CHECK(again.model.b2 == r.model.b2);
}

TEST_CASE("mlp training: preconditions") {
    MlpTrainOptions opt;
    opt.lr = -1.0;
    CHECK_KIND(mlp_train(MatrixX::Random(5, 7), MatrixX::Random(5, 4), opt), ErrorKind::InvalidArgument);
}

TEST_CASE("rollout: copying model stays put") {
    MlpModel m = mlp_init(7, 8, 4, 1);
    // Hidden units carry x, y, z and the speed input through two ReLUs each
    // would be needed for signed values; positive inputs keep one enough.
    m.w1.setZero();
    m.b1.setZero();
    m.w1(0, 1) = m.w1(1, 2) = m.w1(2, 3) = 1.0;
    m.w2.setZero();
    m.b2.setZero();
    m.w2(0, 0) = m.w2(1, 1) = m.w2(2, 2) = 1.0;
    m.input_norm = Normalization::identity(7);
    m.output_norm = Normalization::identity(4);
    MotionState s{0.0, Vec3(3, 4, 5), Vec3::Zero()};
    const auto p = rollout(m, s, 5);
    REQUIRE(p.points.size() == 5);
    for (const auto& q : p.points) CHECK((q.pos - s.pos).norm() < 1e-12);
    CHECK_KIND(rollout(m, s, 0), ErrorKind::InvalidArgument);
}

TEST_CASE("rollout: model trained on constant-velocity flight tracks it") {
    std::vector<TransitionSet> parts;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        FlightScenario sc;
        sc.state = FlightState::Level;
        sc.duration = 6.0;
        sc.noise = SensorNoise::none();
        sc.params.start = Vec3(0.0, 5.0 * static_cast<double>(seed), 100.0);
        parts.push_back(mlp_transitions(generate(sc).truth));
    }
    const auto data = concat(parts);
    MlpTrainOptions opt;
    // Absolute positions need a tight fit: 20 steps inside 0.5 m.
    opt.lr = 0.1;
    opt.epochs = 30000;
    const auto model = mlp_train(data.inputs, data.targets, opt).model;

    FlightScenario sc;
    sc.state = FlightState::Level;
    sc.duration = 6.0;
    sc.noise = SensorNoise::none();
    sc.params.start = Vec3(0.0, 12.5, 100.0);
    const auto truth = generate(sc).truth;
    const auto p = rollout(model, {truth[10].t, truth[10].pos, truth[10].vel}, 20);
    for (std::size_t i = 0; i < 20; ++i) CHECK((p.points[i].pos - truth[11 + i].pos).norm() < 0.5);
}

TEST_CASE("mlp_train: inputs without spread get zero first-layer weights") {
    MatrixX x(6, 3), y(6, 1);
    for (int i = 0; i < 6; ++i) {
        x.row(i) << i, 4.0, -i;
        y(i, 0) = 2.0 * i;
    }
    MlpTrainOptions opt;
    opt.epochs = 10;
    const auto m = mlp_train(x, y, opt).model;
    CHECK(m.w1.col(1).isZero(0.0));
    CHECK(!m.w1.col(0).isZero(0.0));
    CHECK(!m.w1.col(2).isZero(0.0));
}
