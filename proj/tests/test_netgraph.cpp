#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dcgrid/error.hpp"
#include "dcgrid/netgraph.hpp"

using namespace dcgrid;
using Catch::Approx;

TEST_CASE("ring of six with weight 100", "[netgraph]") {
    const LaplacianBundle b = build_laplacian(CommGraph::ring(6, 100.0));
    for (int i = 0; i < 6; ++i) {
        CHECK(b.laplacian(i, i) == 200.0);
        CHECK(b.laplacian(i, (i + 1) % 6) == -100.0);
        CHECK(b.laplacian(i, (i + 5) % 6) == -100.0);
        CHECK(b.laplacian(i, (i + 3) % 6) == 0.0);
    }
    CHECK(b.connected);

    // Circulant eigenvalues w (2 - 2 cos(2 pi k / 6)).
    std::vector<double> expected;
    for (int k = 0; k < 6; ++k) expected.push_back(100.0 * (2.0 - 2.0 * std::cos(2.0 * M_PI * k / 6.0)));
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 6; ++i) {
        CHECK(b.eigenvalues(i) == Approx(expected[static_cast<std::size_t>(i)]).margin(1e-9));
    }
    CHECK(b.eigenvalues(5) == Approx(400.0));
    CHECK(b.eigenvalues(1) == Approx(100.0));
}

TEST_CASE("two-node graph", "[netgraph]") {
    const LaplacianBundle b = build_laplacian(CommGraph::ring(2, 1.0));
    CHECK(b.laplacian.isApprox((Eigen::Matrix2d() << 1, -1, -1, 1).finished()));
    CHECK(b.eigenvalues(0) == Approx(0.0).margin(1e-12));
    CHECK(b.eigenvalues(1) == Approx(2.0));
    CHECK(b.connected);
    CHECK(weighted_spanning_tree_count(b) == Approx(1.0));
}

TEST_CASE("spanning tree counts", "[netgraph]") {
    const LaplacianBundle ring = build_laplacian(CommGraph::ring(6, 100.0));
    // (1/6) 100 * 100 * 300 * 300 * 400
    CHECK(weighted_spanning_tree_count(ring) == Approx(6e10).epsilon(1e-12));
    CHECK(spanning_tree_count_spectral(ring) == Approx(6e10).epsilon(1e-9));
    CHECK(weighted_spanning_tree_count(build_laplacian(CommGraph::ring(3, 1.0))) == Approx(3.0));
}

TEST_CASE("disconnected graph", "[netgraph]") {
    const std::vector<Edge> edges{{0, 1, 1.0}, {2, 3, 2.0}};
    const CommGraph g = CommGraph::from_edges(4, edges);
    const LaplacianBundle b = build_laplacian(g);
    CHECK_FALSE(b.connected);
    CHECK_FALSE(is_connected_bfs(g));
    CHECK(weighted_spanning_tree_count(b) == 0.0);
}

TEST_CASE("invalid adjacency is rejected", "[netgraph]") {
    Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(3, 3);
    asym(0, 1) = 1.0;
    asym(1, 0) = 2.0;
    CHECK_THROWS_AS(CommGraph::from_dense(asym), Error);
    Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
    neg(0, 1) = neg(1, 0) = -1.0;
    try {
        (void)CommGraph::from_dense(neg);
        FAIL("negative weight accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidGraph);
    }
    const std::vector<Edge> loop{{1, 1, 1.0}};
    CHECK_THROWS_AS(CommGraph::from_edges(3, loop), Error);
}

TEST_CASE("random graphs: Laplacian invariants", "[netgraph][property]") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(2, 8);
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    std::bernoulli_distribution present(0.35);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = size(rng);
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (present(rng)) w(i, j) = w(j, i) = weight(rng);
            }
        }
        const CommGraph g = CommGraph::from_dense(w);
        const LaplacianBundle b = build_laplacian(g);
        const double norm = b.eigenvalues.cwiseAbs().maxCoeff();
        CHECK((b.laplacian * Eigen::VectorXd::Ones(n)).norm() <= n * 1e-15 * std::max(1.0, norm) * 4);
        CHECK(b.laplacian.isApprox(b.laplacian.transpose()));
        CHECK(b.eigenvalues(0) >= -1e-9 * std::max(1.0, norm));
        CHECK(b.connected == is_connected_bfs(g));
        if (b.connected) {
            const double minor = weighted_spanning_tree_count(b);
            const double spectral = spanning_tree_count_spectral(b);
            CHECK(std::abs(minor - spectral) <= 1e-9 * std::abs(minor));
        }
    }
}
