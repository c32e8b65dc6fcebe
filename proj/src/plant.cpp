#include "dcgrid/plant.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "dcgrid/error.hpp"

namespace dcgrid {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw Error(ErrorKind::InvalidConfig, message);
    }
}

bool all_at_least(const Eigen::VectorXd& v, double lo, bool strict) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i)) || (strict ? v(i) <= lo : v(i) < lo)) {
            return false;
        }
    }
    return true;
}

}  // namespace

void MicrogridConfig::validate() const {
    const Eigen::Index n = r.size();
    require(n >= 1, "at least one DG is required");
    require(c.size() == n, "c must have n entries");
    require(k.size() == n, "k must have n entries");
    require(g.size() == n, "g must have n entries");
    require(comm.weights.rows() == n, "communication graph must have n nodes");
    require(all_at_least(r, 0.0, true), "line resistances must be positive");
    require(all_at_least(c, 0.0, false), "virtual resistances must be nonnegative");
    require(all_at_least(k, 0.0, true), "sharing coefficients must be positive");
    require(all_at_least(g, 0.0, false), "voltage weights must be nonnegative");
    require(std::isfinite(v_ref) && v_ref > 0.0, "v_ref must be positive");
    require(std::isfinite(load_power) && load_power > 0.0, "load power must be positive");
    require(std::isfinite(b1) && b1 >= 0.0, "b1 must be nonnegative");
    require(std::isfinite(b2) && b2 >= 0.0, "b2 must be nonnegative");
    require(std::isfinite(tau) && tau >= 0.0, "tau must be nonnegative");
    dcgrid::validate(comm);
    require(build_laplacian(comm).connected, "communication graph must be connected");
}

bool operator==(const MicrogridConfig& x, const MicrogridConfig& y) {
    return x.r == y.r && x.c == y.c && x.k == y.k && x.g == y.g &&
           x.comm.weights == y.comm.weights && x.v_ref == y.v_ref &&
           x.load_power == y.load_power && x.b1 == y.b1 && x.b2 == y.b2 && x.tau == y.tau;
}

Equilibrium equilibrium(const MicrogridConfig& config) {
    const double kg = config.k.dot(config.g);
    if (!(kg > 0.0)) {
        throw Error(ErrorKind::NoVoltageRecovery,
                    "sum k_i g_i must be positive for the bus voltage to recover");
    }
    Equilibrium eq;
    const double total = config.load_power / config.v_ref;
    eq.uL_star = config.v_ref;
    eq.i_star = config.k / config.k.sum() * total;
    eq.u_star = eq.i_star.cwiseProduct(config.r).array() + eq.uL_star;
    eq.correction = (config.c + config.r).cwiseProduct(eq.i_star).array() + (eq.uL_star - config.v_ref);

    // delta_u stays proportional to g and sum k_i delta_i is conserved from zero.
    const double scale = config.k.dot(eq.correction) / kg;
    eq.delta_u = scale * config.g;
    eq.delta_i = eq.correction - eq.delta_u;
    return eq;
}

double cz_singular_load(const MicrogridConfig& config) {
    return config.v_ref * config.v_ref * (config.c + config.r).cwiseInverse().sum();
}

BusSolution solve_bus_voltage(const Eigen::VectorXd& emf, const Eigen::VectorXd& r,
                              const Eigen::VectorXd& c, double load_power) {
    const Eigen::VectorXd branch = c + r;
    if (!all_at_least(branch, 0.0, true)) {
        throw Error(ErrorKind::InvalidConfig, "c_i + r_i must be positive");
    }
    const Eigen::VectorXd conductance = branch.cwiseInverse();
    const double a = conductance.sum();
    const double b = emf.dot(conductance);
    const double disc = b * b - 4.0 * a * load_power;
    if (!(disc >= 0.0) || !(b > 0.0)) {
        std::ostringstream msg;
        msg << "no bus voltage serves P = " << load_power << " W (B^2 - 4AP = " << disc << ")";
        throw Error(ErrorKind::LoadInfeasible, msg.str());
    }
    BusSolution out;
    out.u_L = (b + std::sqrt(disc)) / (2.0 * a);
    out.currents = (emf.array() - out.u_L) * conductance.array();
    return out;
}

BusSolution solve_bus_voltage(const Eigen::VectorXd& emf, const MicrogridConfig& config) {
    return solve_bus_voltage(emf, config.r, config.c, config.load_power);
}

BusSolution droop_operating_point(const MicrogridConfig& config) {
    return solve_bus_voltage(Eigen::VectorXd::Constant(config.r.size(), config.v_ref), config);
}

Eigen::VectorXd correction_field(const Eigen::VectorXd& correction, const MicrogridConfig& config) {
    const BusSolution bus = solve_bus_voltage(correction.array() + config.v_ref, config);
    const Eigen::VectorXd inv_k = config.k.cwiseInverse();
    const Eigen::MatrixXd laplacian = build_laplacian(config.comm).laplacian;
    const Eigen::MatrixXd klk = inv_k.asDiagonal() * laplacian * inv_k.asDiagonal();
    return -config.b1 * (klk * bus.currents) + config.b2 * (config.v_ref - bus.u_L) * config.g;
}

SmallSignalModel linearize(const MicrogridConfig& config) {
    const Eigen::Index n = config.r.size();
    SmallSignalModel m;
    m.r_L = -config.v_ref * config.v_ref / config.load_power;
    m.b1 = config.b1;
    m.b2 = config.b2;
    m.g = config.g;
    m.C = config.c.asDiagonal();
    m.K = config.k.cwiseInverse().asDiagonal();
    m.L = build_laplacian(config.comm).laplacian;
    m.Z = Eigen::MatrixXd::Constant(n, n, m.r_L);
    m.Z.diagonal() += config.r;
    m.CZ = m.C + m.Z;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.CZ);
    const auto& sv = svd.singularValues();
    m.cz_condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(m.cz_condition) || m.cz_condition > kSingularConditionLimit) {
        std::ostringstream msg;
        msg << "C + Z is numerically singular (condition " << m.cz_condition << ")";
        throw Error(ErrorKind::SingularModel, msg.str());
    }
    const auto lu = m.CZ.partialPivLu();
    m.CZ_inv = lu.inverse();

    m.KLK = m.K * m.L * m.K;
    m.G = m.r_L * config.g * Eigen::RowVectorXd::Ones(n);
    const Eigen::VectorXd k = config.k;
    m.Q = k.asDiagonal() * m.CZ * k.asDiagonal();
    m.J2 = lu.solve(m.KLK);
    m.J3 = lu.solve(m.G);
    m.J1 = m.b1 * m.J2 + m.b2 * m.J3;
    return m;
}

}  // namespace dcgrid
