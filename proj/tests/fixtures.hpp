#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "dcgrid/plant.hpp"

namespace fixtures {

// Six-DG test system: ring communication graph, voltage feedback on DGs 4-6.
inline dcgrid::MicrogridConfig six_dg(double load_power = 5000.0, double b1 = 20.0, double b2 = 10.0,
                                      double tau = 0.0, double ring_weight = 100.0) {
    dcgrid::MicrogridConfig cfg;
    cfg.r = (Eigen::VectorXd(6) << 2, 2, 1, 0.5, 0.5, 2).finished();
    cfg.c = (Eigen::VectorXd(6) << 5, 5, 5, 10, 10, 10).finished();
    cfg.k = (Eigen::VectorXd(6) << 1, 1, 1, 2, 2, 2).finished();
    cfg.g = (Eigen::VectorXd(6) << 0, 0, 0, 1, 1, 1).finished();
    cfg.comm = dcgrid::CommGraph::ring(6, ring_weight);
    cfg.v_ref = 200.0;
    cfg.load_power = load_power;
    cfg.b1 = b1;
    cfg.b2 = b2;
    cfg.tau = tau;
    return cfg;
}

// Delay-study variant: sparse ring (weight 1) and sharing weights 2:2:2:1:1:1.
inline dcgrid::MicrogridConfig delay_case(double b1, double b2, double tau = 0.0) {
    dcgrid::MicrogridConfig cfg = six_dg(5000.0, b1, b2, tau, 1.0);
    cfg.k = (Eigen::VectorXd(6) << 1, 1, 1, 0.5, 0.5, 0.5).finished();
    return cfg;
}

inline std::filesystem::path scenario(const std::string& name) {
    return std::filesystem::path(DCGRID_SCENARIO_DIR) / (name + ".json");
}

inline double rel(double a, double b) {
    return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

}  // namespace fixtures
