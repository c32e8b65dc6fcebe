#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "dcgrid/netgraph.hpp"

namespace dcgrid {

/// Physical network, controller gains and communication layer of the microgrid.
///
/// Units: resistances in ohm, voltages in V, power in W, delay in s. k and g are
/// dimensionless. The current-sharing weights enter the controller through
/// K = diag(1 / k_i), so at consensus i_i / k_i is equal across DGs.
struct MicrogridConfig {
    Eigen::VectorXd r;  // line resistance DG -> bus
    Eigen::VectorXd c;  // virtual (droop) resistance
    Eigen::VectorXd k;  // current-sharing coefficients
    Eigen::VectorXd g;  // voltage-recovery weights
    CommGraph comm;
    double v_ref = 0.0;
    double load_power = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double tau = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(r.size()); }

    /// Length and sign checks and a connected graph. Zero gains are accepted (that
    /// loop is then off); sum k_i g_i > 0 is checked where it matters, in equilibrium().
    /// Throws Error{InvalidConfig} (or InvalidGraph).
    void validate() const;

    friend bool operator==(const MicrogridConfig&, const MicrogridConfig&);
};

struct Equilibrium {
    Eigen::VectorXd i_star;
    Eigen::VectorXd u_star;
    double uL_star = 0.0;
    /// Steady value of delta_i + delta_u per DG.
    Eigen::VectorXd correction;
    /// Split of the correction reachable from zero integrator states:
    /// delta_u is proportional to g and sum k_i delta_i = 0.
    Eigen::VectorXd delta_i;
    Eigen::VectorXd delta_u;
};

/// Steady state with u_L = v_ref and i_i proportional to k_i.
/// Throws Error{NoVoltageRecovery} when sum k_i g_i = 0.
[[nodiscard]] Equilibrium equilibrium(const MicrogridConfig& config);

/// Load v_ref^2 sum 1/(c_i + r_i) at which C + Z is singular. Below it C + Z has
/// exactly one negative eigenvalue; above it C + Z is positive definite.
[[nodiscard]] double cz_singular_load(const MicrogridConfig& config);

/// Bus voltage and branch currents for one converter state.
struct BusSolution {
    double u_L = 0.0;
    Eigen::VectorXd currents;
};

/// Eliminates the branch currents from the power balance and the converter law,
/// leaving A u_L^2 - B u_L + P = 0 with A = sum 1/(c_i+r_i), B = sum emf_i/(c_i+r_i).
/// Returns the high-voltage root. emf_i = v_ref + delta_i_i + delta_u_i.
/// Throws Error{LoadInfeasible} when B^2 < 4AP, Error{InvalidConfig} when some c_i+r_i <= 0.
[[nodiscard]] BusSolution solve_bus_voltage(const Eigen::VectorXd& emf, const Eigen::VectorXd& r,
                                            const Eigen::VectorXd& c, double load_power);

[[nodiscard]] BusSolution solve_bus_voltage(const Eigen::VectorXd& emf,
                                            const MicrogridConfig& config);

/// Droop-only operating point (all correction states zero).
[[nodiscard]] BusSolution droop_operating_point(const MicrogridConfig& config);

/// Right-hand side of the correction integrators driven by a total correction e
/// (delta_i + delta_u), undelayed:  -b1 K L K i(e) + b2 (v_ref - u_L(e)) g.
[[nodiscard]] Eigen::VectorXd correction_field(const Eigen::VectorXd& correction,
                                               const MicrogridConfig& config);

/// Linearization around the equilibrium.  The state-space Jacobian is -J1.
struct SmallSignalModel {
    double r_L = 0.0;  // -v_ref^2 / P
    double b1 = 0.0;
    double b2 = 0.0;
    Eigen::VectorXd g;
    Eigen::MatrixXd C;    // diag(c)
    Eigen::MatrixXd K;    // diag(1/k)
    Eigen::MatrixXd L;    // communication Laplacian
    Eigen::MatrixXd Z;    // diag(r) + r_L 1 1^T
    Eigen::MatrixXd CZ;   // C + Z
    Eigen::MatrixXd CZ_inv;
    double cz_condition = 0.0;
    Eigen::MatrixXd KLK;
    Eigen::MatrixXd G;    // r_L g 1^T
    Eigen::MatrixXd Q;    // K^-1 (C+Z) K^-1
    Eigen::MatrixXd J1;
    Eigen::MatrixXd J2;   // (C+Z)^-1 K L K
    Eigen::MatrixXd J3;   // (C+Z)^-1 G

    [[nodiscard]] Eigen::Index size() const noexcept { return C.rows(); }
};

inline constexpr double kSingularConditionLimit = 1e12;

/// Builds Z, G, Q and J1 = (C+Z)^-1 (b1 KLK + b2 G).
/// Throws Error{SingularModel} when C+Z is numerically singular.
[[nodiscard]] SmallSignalModel linearize(const MicrogridConfig& config);

}  // namespace dcgrid
