#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcgrid/plant.hpp"

namespace dcgrid {

/// Which signals feeding the correction integrators see the communication delay.
/// Uniform delays everything, including each DG's own current in the consensus
/// difference and the sampled bus voltage. Neighbor keeps the own current local.
enum class DelayMode { Uniform, Neighbor };

enum class EventAction {
    EnableDistributedControl,
    DisableDistributedControl,  // droop only: corrections reset to zero and frozen
    SetLoad,
    SetLink,
    SetVoltageWeight,
    SetDelay,
};

[[nodiscard]] std::string_view to_string(EventAction action) noexcept;
[[nodiscard]] std::optional<EventAction> parse_event_action(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(DelayMode mode) noexcept;
[[nodiscard]] std::optional<DelayMode> parse_delay_mode(std::string_view name) noexcept;

struct Event {
    double time = 0.0;
    EventAction action = EventAction::EnableDistributedControl;
    std::size_t i = 0;  // 0-based DG index (links, voltage weights)
    std::size_t j = 0;
    double value = 0.0;

    friend bool operator==(const Event&, const Event&) = default;
};

enum class InitialMode { Droop, Equilibrium };

struct InitialState {
    InitialMode mode = InitialMode::Droop;
    /// Load applied from t = 0 until the first set-load event, and at which the
    /// initial operating point is computed; defaults to the configured load.
    std::optional<double> load_power;
    /// Added to the current-correction states, V. Empty means none.
    Eigen::VectorXd perturbation;

    friend bool operator==(const InitialState&, const InitialState&);
};

struct Scenario {
    MicrogridConfig config;
    double t_end = 1.0;
    double dt = 1e-4;
    std::size_t decimation = 100;
    bool distributed_enabled = true;
    DelayMode delay_mode = DelayMode::Uniform;
    InitialState initial;
    std::vector<Event> events;

    /// Throws Error{InvalidInput}: unsorted events, dt <= 0, dt > tau/10 for any
    /// delay in play, bad indices.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&);
};

/// Values of the algebraic signals at t - tau.
struct DelayedSignals {
    Eigen::VectorXd currents;
    double u_L = 0.0;
};

struct StateDerivative {
    Eigen::VectorXd d_delta_i;
    Eigen::VectorXd d_delta_u;
};

/// d(delta_i)/dt = -b1 K L K i(t - tau), d(delta_u)/dt = b2 (v_ref - u_L(t - tau)) g.
/// In Neighbor mode the diagonal (own-current) part of the consensus term uses
/// the present current.
[[nodiscard]] StateDerivative derivatives(const MicrogridConfig& config, DelayMode mode,
                                          const BusSolution& present,
                                          const DelayedSignals& delayed);

/// Uniformly sampled signal record with cubic Hermite (Catmull-Rom) interpolation.
/// Queries before t = 0 return the pre-start value.
class SignalHistory {
public:
    SignalHistory(Eigen::Index width, double dt, std::size_t capacity,
                  Eigen::VectorXd prestart);

    /// Appends the sample for grid index newest()+1.
    void push(const Eigen::VectorXd& value);

    void sample(double t, Eigen::VectorXd& out) const;

    [[nodiscard]] long newest() const noexcept { return newest_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }

private:
    [[nodiscard]] const double* at(long index) const noexcept;

    Eigen::Index width_;
    double dt_;
    std::size_t capacity_;
    Eigen::VectorXd prestart_;
    std::vector<double> data_;
    long newest_ = -1;
};

struct SimSample {
    double t = 0.0;
    double u_L = 0.0;
    Eigen::VectorXd i;
    Eigen::VectorXd u;
    Eigen::VectorXd delta_i;
    Eigen::VectorXd delta_u;
};

enum class Outcome { Converged, RunningStable, Diverged, Infeasible };

[[nodiscard]] std::string_view to_string(Outcome outcome) noexcept;

struct LoggedEvent {
    double time = 0.0;
    std::string description;
};

struct SimulationTrace {
    std::vector<SimSample> samples;
    std::vector<LoggedEvent> events;
    Outcome outcome = Outcome::RunningStable;
    std::string stop_reason;
    double end_time = 0.0;
    double max_power_residual = 0.0;  // max |u_L sum i - P| / P over accepted steps
    Eigen::VectorXd k;                // sharing coefficients, for ratio reporting
    double v_ref = 0.0;
};

/// Fixed-step RK4 over the correction states with the bus closure solved at every
/// stage. Stops early on divergence (u_L outside (0, 2 v_ref) or nonfinite) or an
/// infeasible closure, keeping the partial trace.
[[nodiscard]] SimulationTrace run(const Scenario& scenario);

/// Convergence targets.
inline constexpr double kVoltageTolerance = 1e-3;
inline constexpr double kSharingTolerance = 1e-3;

/// max_i |i_i/k_i - mean| / mean.
[[nodiscard]] double sharing_error(const Eigen::VectorXd& currents, const Eigen::VectorXd& k);

[[nodiscard]] double voltage_error(double u_L, double v_ref);

/// max |u_L - v_ref| over samples in [t0, t1].
[[nodiscard]] double voltage_envelope(const SimulationTrace& trace, double t0, double t1);

/// Last sample with t <= time.
[[nodiscard]] const SimSample& sample_at(const SimulationTrace& trace, double time);

/// CSV with header t,u_L,i_1..i_n,u_1..u_n,di_1..di_n,du_1..du_n.
void write_csv(const SimulationTrace& trace, std::ostream& out);

struct LinearSample {
    double t = 0.0;
    Eigen::VectorXd x;
    double norm = 0.0;
};

struct LinearTrace {
    std::vector<LinearSample> samples;
};

/// dx/dt = -J1 x(t - tau) with x = x0 for t <= 0, RK4 with Hermite history.
/// Requires dt <= tau/10 when tau > 0.
[[nodiscard]] LinearTrace linear_dde_run(const Eigen::MatrixXd& j1, double tau,
                                         const Eigen::VectorXd& x0, double t_end, double dt,
                                         std::size_t decimation = 1);

[[nodiscard]] LinearTrace linear_dde_run(const SmallSignalModel& model, double tau,
                                         const Eigen::VectorXd& x0, double t_end, double dt,
                                         std::size_t decimation = 1);

/// log(max norm over the last quarter / max norm over the third quarter) per unit
/// time. Negative for a decaying envelope.
[[nodiscard]] double envelope_growth_rate(const LinearTrace& trace);

}  // namespace dcgrid
