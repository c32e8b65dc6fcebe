#include "dcgrid/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dcgrid/error.hpp"

namespace dcgrid {

CommGraph CommGraph::from_dense(const Eigen::MatrixXd& adjacency) {
    if (adjacency.rows() != adjacency.cols()) {
        throw Error(ErrorKind::InvalidGraph, "adjacency must be square");
    }
    CommGraph graph{adjacency};
    validate(graph);
    return graph;
}

CommGraph CommGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
    CommGraph graph{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
    for (const Edge& e : edges) {
        if (e.i >= n || e.j >= n) {
            std::ostringstream msg;
            msg << "edge (" << e.i << ", " << e.j << ") out of range for n = " << n;
            throw Error(ErrorKind::InvalidGraph, msg.str());
        }
        if (e.i == e.j) {
            throw Error(ErrorKind::InvalidGraph, "self loops are not allowed");
        }
        graph.set_link(e.i, e.j, e.weight);
    }
    validate(graph);
    return graph;
}

CommGraph CommGraph::ring(std::size_t n, double weight) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (i != j) {
            edges.push_back({std::min(i, j), std::max(i, j), weight});
        }
    }
    if (n == 2) {
        edges.resize(1);
    }
    return from_edges(n, edges);
}

std::vector<Edge> CommGraph::edges() const {
    std::vector<Edge> out;
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < weights.cols(); ++j) {
            if (weights(i, j) != 0.0) {
                out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), weights(i, j)});
            }
        }
    }
    return out;
}

void CommGraph::set_link(std::size_t i, std::size_t j, double weight) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    weights(a, b) = weight;
    weights(b, a) = weight;
}

void validate(const CommGraph& graph) {
    const auto& w = graph.weights;
    if (w.rows() != w.cols()) {
        throw Error(ErrorKind::InvalidGraph, "adjacency must be square");
    }
    if (w.rows() < 1) {
        throw Error(ErrorKind::InvalidGraph, "graph needs at least one node");
    }
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        if (w(i, i) != 0.0) {
            throw Error(ErrorKind::InvalidGraph, "diagonal of the adjacency must be zero");
        }
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) {
                throw Error(ErrorKind::InvalidGraph, "weights must be finite and nonnegative");
            }
            if (w(i, j) != w(j, i)) {
                std::ostringstream msg;
                msg << "a(" << i << "," << j << ") != a(" << j << "," << i << ")";
                throw Error(ErrorKind::InvalidGraph, msg.str());
            }
        }
    }
}

LaplacianBundle build_laplacian(const CommGraph& graph) {
    validate(graph);
    const auto& a = graph.weights;
    LaplacianBundle bundle;
    bundle.laplacian = -a;
    bundle.laplacian.diagonal() = a.rowwise().sum();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(bundle.laplacian, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure, "Laplacian eigensolver did not converge");
    }
    bundle.eigenvalues = solver.eigenvalues();  // already ascending
    std::stable_sort(bundle.eigenvalues.begin(), bundle.eigenvalues.end());

    const Eigen::Index n = bundle.eigenvalues.size();
    if (n < 2) {
        bundle.connected = true;
        return bundle;
    }
    const double scale = std::max(1.0, bundle.eigenvalues(n - 1));
    bundle.connected = bundle.eigenvalues(1) > kConnectivityTolerance * scale;
    return bundle;
}

double weighted_spanning_tree_count(const LaplacianBundle& bundle) {
    if (!bundle.connected) {
        return 0.0;
    }
    const Eigen::Index m = bundle.laplacian.rows() - 1;
    if (m == 0) {
        return 1.0;
    }
    return bundle.laplacian.topLeftCorner(m, m).partialPivLu().determinant();
}

double spanning_tree_count_spectral(const LaplacianBundle& bundle) {
    if (!bundle.connected) {
        return 0.0;
    }
    const Eigen::Index n = bundle.eigenvalues.size();
    double product = 1.0;
    for (Eigen::Index i = 1; i < n; ++i) {
        product *= bundle.eigenvalues(i);
    }
    return product / static_cast<double>(n);
}

bool is_connected_bfs(const CommGraph& graph) {
    const Eigen::Index n = graph.weights.rows();
    if (n == 0) {
        return false;
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<Eigen::Index> frontier;
    frontier.push(0);
    seen[0] = true;
    Eigen::Index reached = 1;
    while (!frontier.empty()) {
        const Eigen::Index v = frontier.front();
        frontier.pop();
        for (Eigen::Index u = 0; u < n; ++u) {
            if (graph.weights(v, u) > 0.0 && !seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = true;
                ++reached;
                frontier.push(u);
            }
        }
    }
    return reached == n;
}

}  // namespace dcgrid
