#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dcgrid/error.hpp"
#include "dcgrid/matrixkit.hpp"
#include "dcgrid/plant.hpp"
#include "dcgrid/stability.hpp"
#include "fixtures.hpp"

using namespace dcgrid;
using Catch::Approx;

namespace {

RankOneDiag random_rank_one(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> entry(-10.0, 10.0);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    std::bernoulli_distribution sign(0.5);
    RankOneDiag m;
    m.c.resize(n - 1);
    m.a.resize(n);
    m.b.resize(n);
    for (int i = 0; i < n - 1; ++i) m.c(i) = sign(rng) ? mag(rng) : -mag(rng);
    for (int i = 0; i < n; ++i) {
        m.a(i) = entry(rng);
        m.b(i) = entry(rng);
    }
    return m;
}

Eigen::MatrixXd lambda_of(const RankOneDiag& m) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m.order(), m.order());
    l.diagonal().head(m.c.size()) = m.c;
    return l;
}

}  // namespace

TEST_CASE("inertia of small matrices", "[matrixkit]") {
    const Eigen::Matrix3d d = Eigen::Vector3d(1, -2, 0).asDiagonal();
    CHECK(inertia_of(d) == Inertia{1, 1, 1});

    const SmallSignalModel m = linearize(fixtures::six_dg());
    CHECK(m.r_L == Approx(-8.0));
    CHECK(inertia_of(m.Z) == Inertia{5, 1, 0});
    CHECK(inertia_of(m.KLK) == Inertia{5, 0, 1});
}

TEST_CASE("rank-one determinants: worked 2x2", "[matrixkit]") {
    RankOneDiag m{Eigen::VectorXd::Constant(1, 2.0), Eigen::Vector2d(1, 3), Eigen::Vector2d(4, 5)};
    CHECK(det_lemma5_m1(m) == Approx(30.0));
    CHECK(det_lemma5_m2(m) == Approx(11.0));
    const Eigen::MatrixXd l = lambda_of(m);
    CHECK((l + m.a * m.b.transpose()).determinant() == Approx(30.0));
    CHECK((l + m.a * m.b.transpose() + m.b * m.a.transpose()).determinant() == Approx(11.0));

    m.a(1) = 0.0;
    CHECK(det_lemma5_m1(m) == 0.0);

    RankOneDiag sym{Eigen::Vector2d(2, 3), Eigen::Vector3d(1, -2, 4), Eigen::Vector3d(1, -2, 4)};
    CHECK(det_lemma5_m2(sym) == Approx(2.0 * 16.0 * 6.0));
}

TEST_CASE("rank-one determinants reject a zero diagonal entry", "[matrixkit]") {
    RankOneDiag m{Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3)};
    CHECK_THROWS_AS(det_lemma5_m1(m), Error);
}

TEST_CASE("rank-one determinants against dense LU", "[matrixkit][property]") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> size(2, 8);
    for (int trial = 0; trial < 1000; ++trial) {
        const RankOneDiag m = random_rank_one(rng, size(rng));
        const Eigen::MatrixXd l = lambda_of(m);
        const double d1 = (l + m.a * m.b.transpose()).partialPivLu().determinant();
        const double d2 = (l + m.a * m.b.transpose() + m.b * m.a.transpose()).partialPivLu().determinant();
        const double s1 = std::max(1.0, std::abs(d1));
        const double s2 = std::max(1.0, std::abs(d2));
        CHECK(std::abs(det_lemma5_m1(m) - d1) <= 1e-8 * s1);
        CHECK(std::abs(det_lemma5_m2(m) - d2) <= 1e-8 * s2);
    }
}

TEST_CASE("secular function", "[matrixkit]") {
    const std::vector<double> mu{1.0};
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<double> unit{0.0, 1.0};
    CHECK(secular_eval({3.0, 1.0}, {mu, zero, unit, 2.0, 3.0}) == Complex{1.0, 0.0});
    const Complex v = secular_eval({2.0, 0.0}, {mu, unit, unit, 1.0, 1.0});
    CHECK(v.real() == Approx(0.5));
    CHECK(v.imag() == Approx(0.0).margin(1e-15));

    try {
        (void)secular_eval({1.0, 0.0}, {mu, unit, unit, 1.0, 1.0});
        FAIL("pole not detected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Pole);
    }
    CHECK_THROWS_AS(secular_eval({0.0, 0.0}, {mu, unit, unit, 1.0, 1.0}), Error);
}

TEST_CASE("characteristic product vanishes at J1 eigenvalues", "[matrixkit]") {
    const dcgrid::MicrogridConfig cfg = fixtures::six_dg();
    const SmallSignalModel model = linearize(cfg);
    const DiagonalizationResult d = diagonalize_j2(model);
    const std::vector<double> mu(d.mu.data(), d.mu.data() + d.mu.size());
    const std::vector<double> alpha(d.alpha.data(), d.alpha.data() + d.alpha.size());
    const std::vector<double> beta(d.beta.data(), d.beta.data() + d.beta.size());
    const SecularData data{mu, alpha, beta, cfg.b1, cfg.b2};

    // Scale: the product of |lambda| + |b1 mu_i| bounds each expanded term.
    for (const Complex& lambda : eigenvalues(model.J1)) {
        double scale = std::abs(lambda);
        for (double m : mu) scale *= std::abs(lambda) + cfg.b1 * m;
        CHECK(std::abs(characteristic_eval(lambda, data)) <= 1e-6 * scale);
    }
}

TEST_CASE("inertia symmetry and Sylvester's law", "[matrixkit][property]") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> size(2, 7);
    std::uniform_real_distribution<double> entry(-5.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = size(rng);
        Eigen::MatrixXd a(n, n);
        for (auto& x : a.reshaped()) x = entry(rng);
        const Inertia p = inertia_of(a);
        const Inertia q = inertia_of(Eigen::MatrixXd(-a));
        CHECK(p.n_plus == q.n_minus);
        CHECK(p.n_minus == q.n_plus);
        CHECK(p.n_zero == q.n_zero);
        CHECK(p.order() == n);

        // Symmetric S with a planted kernel, congruence by a well-conditioned T.
        Eigen::MatrixXd s = (a + a.transpose()) / 2.0;
        Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
        basis.col(0) = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        const Eigen::MatrixXd orth = qr.householderQ();
        Eigen::VectorXd spec = symmetric_eigenvalues(s);
        for (Eigen::Index i = 0; i < n; ++i) spec(i) = spec(i) < 0.0 ? spec(i) - 0.5 : spec(i) + 0.5;
        spec(0) = 0.0;
        s = orth * spec.asDiagonal() * orth.transpose();
        Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
        for (auto& x : t.reshaped()) x += 0.05 * entry(rng) / 5.0;
        CHECK(inertia_of(Eigen::MatrixXd(t.transpose() * s * t), 1e-8) == inertia_of(s, 1e-8));
    }
}
