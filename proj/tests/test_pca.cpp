#include "helpers.hpp"
#include "trajkit/pca.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace trajkit;

namespace {

MatrixX gaussian_sample(int m, const VectorX& sd, const MatrixX& rot, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    MatrixX x(m, sd.size());
    for (int i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < sd.size(); ++j) x(i, j) = sd(j) * n01(rng);
    return x * rot.transpose();
}

MatrixX random_rotation(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    MatrixX a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = n01(rng);
    return Eigen::HouseholderQR<MatrixX>(a).householderQ();
}

} // namespace

TEST_CASE("jacobi_eigen matches a dense symmetric solver") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    MatrixX b(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) b(i, j) = n01(rng);
    const MatrixX a = b * b.transpose();
    const auto mine = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<MatrixX> ref(a);
    const VectorX want = ref.eigenvalues().reverse();
    for (int i = 0; i < 12; ++i) {
        CHECK(mine.values(i) == doctest::Approx(want(i)).epsilon(1e-10));
        const VectorX v = mine.vectors.col(i);
        CHECK((a * v - mine.values(i) * v).norm() < 1e-8 * std::max(1.0, mine.values(i)));
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        CHECK(v(arg) >= 0.0);
    }
    CHECK((mine.vectors.transpose() * mine.vectors - MatrixX::Identity(12, 12)).norm() < 1e-10);
}

TEST_CASE("pca_fit: rank-one data") {
    MatrixX x(6, 4);
    for (int i = 0; i < 6; ++i) x.row(i) << i * 1.5 - 2.0, 3.0, -1.0, 0.25;
    const auto m = pca_fit(x);
    REQUIRE(m.output_dim() == 1);
    CHECK(m.retained_ratio == doctest::Approx(1.0));
    CHECK(std::abs(m.components(0, 0)) == doctest::Approx(1.0));
    CHECK(m.components.row(0).tail(3).norm() < 1e-12);

    const VectorX at_mean = pca_project(m, m.mean);
    CHECK(at_mean.norm() < 1e-12);
    VectorX shifted = m.mean;
    shifted(0) += 2.0;
    CHECK(std::abs(pca_project(m, shifted)(0)) == doctest::Approx(2.0));
}

TEST_CASE("pca_fit: 5-D Gaussian against an independent covariance and eigensolver") {
    VectorX sd(5);
    sd << 3.0, 1.0, 0.0, 0.0, 0.0;
    MatrixX x = gaussian_sample(500, sd, random_rotation(5, 8), 4);
    const auto m = pca_fit(x, {0.85, false});

    const VectorX mean = x.colwise().mean();
    const MatrixX centred = x.rowwise() - mean.transpose();
    const MatrixX cov = centred.transpose() * centred / 499.0;
    Eigen::SelfAdjointEigenSolver<MatrixX> ref(cov);
    const VectorX want = ref.eigenvalues().reverse();
    for (int i = 0; i < 5; ++i) CHECK(std::abs(m.all_eigenvalues(i) - want(i)) < 1e-9);

    CHECK(m.output_dim() == 1);
    CHECK(m.all_eigenvalues(0) == doctest::Approx(9.0).epsilon(0.15));
    CHECK(m.all_eigenvalues(1) == doctest::Approx(1.0).epsilon(0.15));

    // Projection agrees with the oracle eigenvector up to sign.
    const VectorX v = ref.eigenvectors().col(4);
    const double s = v.dot(m.components.row(0).transpose()) > 0 ? 1.0 : -1.0;
    for (int i = 0; i < 20; ++i)
        CHECK(pca_project(m, x.row(i).transpose())(0) == doctest::Approx(s * v.dot(centred.row(i))).epsilon(1e-9));
}

TEST_CASE("pca_fit: minimal k, contributions and reconstruction") {
    VectorX sd(8);
    sd << 5, 4, 3, 2, 1, 0.5, 0.2, 0.1;
    const MatrixX x = gaussian_sample(300, sd, random_rotation(8, 3), 6);
    const auto m = pca_fit(x, {0.85, false});
    const VectorX c = contributions(m.all_eigenvalues);
    CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.head(m.output_dim()).sum() >= 0.85);
    CHECK(c.head(m.output_dim() - 1).sum() < 0.85);
    CHECK(m.retained_ratio == doctest::Approx(c.head(m.output_dim()).sum()));

    double err = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const VectorX d = x.row(i).transpose() - m.mean;
        err += (d - m.components.transpose() * (m.components * d)).squaredNorm();
    }
    const double total = m.all_eigenvalues.sum();
    CHECK(err == doctest::Approx((1.0 - m.retained_ratio) * total * 299.0).epsilon(1e-6));
}

TEST_CASE("pca_fit: standardisation divides by the column deviation") {
    MatrixX x = gaussian_sample(200, VectorX::Ones(3), MatrixX::Identity(3, 3), 12);
    x.col(0) *= 1000.0;
    const auto plain = pca_fit(x, {0.5, false});
    const auto scaled = pca_fit(x, {0.5, true});
    CHECK(plain.retained_ratio > 0.99);
    CHECK(scaled.all_eigenvalues.sum() == doctest::Approx(3.0));
    const VectorX sd = ((x.rowwise() - x.colwise().mean()).colwise().squaredNorm() / 199.0).cwiseSqrt();
    CHECK(scaled.scale.isApprox(sd.transpose().transpose()));
}

TEST_CASE("pca: errors") {
    CHECK_KIND(pca_fit(MatrixX::Ones(1, 3)), ErrorKind::InsufficientData);
    MatrixX bad = MatrixX::Random(5, 3);
    bad(2, 1) = std::nan("");
    CHECK_KIND(pca_fit(bad), ErrorKind::InvalidData);
    const auto m = pca_fit(MatrixX::Random(10, 3));
    CHECK_KIND(pca_project(m, VectorX::Zero(4)), ErrorKind::DimensionError);
}
