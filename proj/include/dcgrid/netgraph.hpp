#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dcgrid {

/// Undirected weighted link between DGs i and j (0-based).
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0.0;
};

/// Symmetric, nonnegative adjacency of the communication network.
struct CommGraph {
    Eigen::MatrixXd weights;

    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(weights.rows());
    }

    [[nodiscard]] static CommGraph from_dense(const Eigen::MatrixXd& adjacency);
    [[nodiscard]] static CommGraph from_edges(std::size_t n, std::span<const Edge> edges);

    /// Undirected ring over n nodes with uniform weight.
    [[nodiscard]] static CommGraph ring(std::size_t n, double weight);

    [[nodiscard]] std::vector<Edge> edges() const;

    /// Sets a_ij = a_ji = weight.
    void set_link(std::size_t i, std::size_t j, double weight);
};

/// Throws Error{InvalidGraph} on asymmetric, negative, nonfinite or self-loop weights.
void validate(const CommGraph& graph);

struct LaplacianBundle {
    Eigen::MatrixXd laplacian;
    Eigen::VectorXd eigenvalues;  // ascending
    bool connected = false;
};

inline constexpr double kConnectivityTolerance = 1e-9;

/// L = D - A with its ascending spectrum. Connected when
/// lambda_2 > 1e-9 * max(1, lambda_max).
[[nodiscard]] LaplacianBundle build_laplacian(const CommGraph& graph);

/// Weighted spanning-tree count det(L_1), L with the last row and column removed.
/// Returns 0 for a disconnected graph.
[[nodiscard]] double weighted_spanning_tree_count(const LaplacianBundle& bundle);

/// The same count via the matrix-tree identity (1/n) * prod of nonzero eigenvalues.
[[nodiscard]] double spanning_tree_count_spectral(const LaplacianBundle& bundle);

/// Breadth-first reachability over positive-weight links.
[[nodiscard]] bool is_connected_bfs(const CommGraph& graph);

}  // namespace dcgrid
