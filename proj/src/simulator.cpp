#include "dcgrid/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "dcgrid/error.hpp"

namespace dcgrid {

namespace {

constexpr std::array<std::pair<EventAction, std::string_view>, 6> kActionNames{{
    {EventAction::EnableDistributedControl, "enable-distributed-control"},
    {EventAction::DisableDistributedControl, "disable-distributed-control"},
    {EventAction::SetLoad, "set-load"},
    {EventAction::SetLink, "set-link"},
    {EventAction::SetVoltageWeight, "set-voltage-weight"},
    {EventAction::SetDelay, "set-delay"},
}};

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && (a.size() == 0 || a == b);
}

void invalid(const std::string& message) {
    throw Error(ErrorKind::InvalidInput, message);
}

// Consensus operator split into its own-current (diagonal) and neighbor parts.
struct ControlMatrices {
    Eigen::MatrixXd klk;
    Eigen::VectorXd own;       // diagonal of K D K
    Eigen::MatrixXd neighbor;  // K A K
};

ControlMatrices control_matrices(const MicrogridConfig& config) {
    const Eigen::VectorXd inv_k = config.k.cwiseInverse();
    const Eigen::MatrixXd laplacian = build_laplacian(config.comm).laplacian;
    ControlMatrices m;
    m.klk = inv_k.asDiagonal() * laplacian * inv_k.asDiagonal();
    m.own = m.klk.diagonal();
    m.neighbor = -m.klk;
    m.neighbor.diagonal().setZero();
    return m;
}

void consensus_rate(const MicrogridConfig& config, const ControlMatrices& m, DelayMode mode,
                    const Eigen::VectorXd& present_i, const Eigen::VectorXd& delayed_i,
                    double delayed_uL, Eigen::VectorXd& d_di, Eigen::VectorXd& d_du) {
    if (mode == DelayMode::Uniform) {
        d_di.noalias() = m.klk * delayed_i;
    } else {
        d_di = m.own.cwiseProduct(present_i);
        d_di.noalias() -= m.neighbor * delayed_i;
    }
    d_di *= -config.b1;
    d_du = (config.b2 * (config.v_ref - delayed_uL)) * config.g;
}

// Bus closure with preallocated outputs; false when no operating point exists.
struct Closure {
    Eigen::VectorXd conductance;
    double a = 0.0;

    explicit Closure(const MicrogridConfig& config)
        : conductance((config.c + config.r).cwiseInverse()), a(conductance.sum()) {}

    bool solve(const Eigen::VectorXd& correction, double v_ref, double load, double& u_L,
               Eigen::VectorXd& currents) const {
        const double b = v_ref * a + correction.dot(conductance);
        const double disc = b * b - 4.0 * a * load;
        if (!(disc >= 0.0) || !(b > 0.0)) {
            return false;
        }
        u_L = (b + std::sqrt(disc)) / (2.0 * a);
        currents = ((correction.array() + (v_ref - u_L)) * conductance.array()).matrix();
        return true;
    }
};

std::string describe(const Event& e) {
    std::ostringstream s;
    s << to_string(e.action);
    switch (e.action) {
        case EventAction::SetLoad: s << " P=" << e.value; break;
        case EventAction::SetLink: s << " " << e.i + 1 << "-" << e.j + 1 << " w=" << e.value; break;
        case EventAction::SetVoltageWeight: s << " g" << e.i + 1 << "=" << e.value; break;
        case EventAction::SetDelay: s << " tau=" << e.value; break;
        default: break;
    }
    return s.str();
}

}  // namespace

std::string_view to_string(EventAction action) noexcept {
    for (const auto& [a, name] : kActionNames) {
        if (a == action) {
            return name;
        }
    }
    return "unknown";
}

std::optional<EventAction> parse_event_action(std::string_view name) noexcept {
    for (const auto& [a, n] : kActionNames) {
        if (n == name) {
            return a;
        }
    }
    return std::nullopt;
}

std::string_view to_string(DelayMode mode) noexcept {
    return mode == DelayMode::Uniform ? "uniform" : "neighbor";
}

std::optional<DelayMode> parse_delay_mode(std::string_view name) noexcept {
    if (name == "uniform") {
        return DelayMode::Uniform;
    }
    if (name == "neighbor") {
        return DelayMode::Neighbor;
    }
    return std::nullopt;
}

std::string_view to_string(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::Converged: return "converged";
        case Outcome::RunningStable: return "running-stable";
        case Outcome::Diverged: return "diverged";
        case Outcome::Infeasible: return "infeasible";
    }
    return "unknown";
}

bool operator==(const InitialState& x, const InitialState& y) {
    return x.mode == y.mode && x.load_power == y.load_power &&
           same_vector(x.perturbation, y.perturbation);
}

bool operator==(const Scenario& x, const Scenario& y) {
    return x.config == y.config && x.t_end == y.t_end && x.dt == y.dt &&
           x.decimation == y.decimation && x.distributed_enabled == y.distributed_enabled &&
           x.delay_mode == y.delay_mode && x.initial == y.initial && x.events == y.events;
}

void Scenario::validate() const {
    config.validate();
    const auto n = static_cast<std::size_t>(config.size());
    if (!(dt > 0.0) || !std::isfinite(dt)) invalid("dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) invalid("t_end must be positive");
    if (decimation == 0) invalid("decimation must be at least 1");
    if (config.tau > 0.0 && dt > config.tau / 10.0) invalid("dt must not exceed tau/10");
    if (initial.load_power && !(*initial.load_power > 0.0)) invalid("initial load must be positive");
    if (initial.perturbation.size() != 0 && static_cast<std::size_t>(initial.perturbation.size()) != n) {
        invalid("initial perturbation must have n entries");
    }
    double last = -std::numeric_limits<double>::infinity();
    for (const Event& e : events) {
        if (!std::isfinite(e.time) || e.time < 0.0) invalid("event times must be nonnegative");
        if (e.time < last) invalid("events must be sorted by time");
        last = e.time;
        switch (e.action) {
            case EventAction::SetLoad:
                if (!(e.value > 0.0)) invalid("set-load needs a positive power");
                break;
            case EventAction::SetLink:
                if (e.i >= n || e.j >= n || e.i == e.j) invalid("set-link needs two distinct DG indices");
                if (!(e.value >= 0.0)) invalid("set-link weight must be nonnegative");
                break;
            case EventAction::SetVoltageWeight:
                if (e.i >= n) invalid("set-voltage-weight index out of range");
                if (!(e.value >= 0.0)) invalid("voltage weight must be nonnegative");
                break;
            case EventAction::SetDelay:
                if (!(e.value >= 0.0)) invalid("delay must be nonnegative");
                if (e.value > 0.0 && dt > e.value / 10.0) invalid("dt must not exceed tau/10");
                break;
            default: break;
        }
    }
}

StateDerivative derivatives(const MicrogridConfig& config, DelayMode mode, const BusSolution& present,
                            const DelayedSignals& delayed) {
    const ControlMatrices m = control_matrices(config);
    StateDerivative out;
    consensus_rate(config, m, mode, present.currents, delayed.currents, delayed.u_L, out.d_delta_i,
                   out.d_delta_u);
    return out;
}

SignalHistory::SignalHistory(Eigen::Index width, double dt, std::size_t capacity,
                             Eigen::VectorXd prestart)
    : width_(width), dt_(dt), capacity_(std::max<std::size_t>(capacity, 4)),
      prestart_(std::move(prestart)), data_(capacity_ * static_cast<std::size_t>(width)) {
    if (prestart_.size() != width_ || !(dt_ > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "history width or step mismatch");
    }
}

void SignalHistory::push(const Eigen::VectorXd& value) {
    ++newest_;
    const auto slot = static_cast<std::size_t>(newest_) % capacity_;
    std::copy(value.data(), value.data() + width_, data_.begin() + static_cast<long>(slot) * width_);
}

const double* SignalHistory::at(long index) const noexcept {
    if (index < 0 || newest_ < 0) {
        return prestart_.data();
    }
    index = std::min(index, newest_);
    index = std::max(index, newest_ - static_cast<long>(capacity_) + 1);
    const auto slot = static_cast<std::size_t>(index) % capacity_;
    return data_.data() + slot * static_cast<std::size_t>(width_);
}

void SignalHistory::sample(double t, Eigen::VectorXd& out) const {
    out.resize(width_);
    const double u = t / dt_;
    const double base = std::floor(u);
    const double s = u - base;
    const auto k = static_cast<long>(base);
    const double* p0 = at(k - 1);
    const double* p1 = at(k);
    const double* p2 = at(k + 1);
    const double* p3 = at(k + 2);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    for (Eigen::Index c = 0; c < width_; ++c) {
        const double m1 = 0.5 * (p2[c] - p0[c]);
        const double m2 = 0.5 * (p3[c] - p1[c]);
        out(c) = h00 * p1[c] + h10 * m1 + h01 * p2[c] + h11 * m2;
    }
}

SimulationTrace run(const Scenario& scenario) {
    scenario.validate();
    MicrogridConfig cfg = scenario.config;
    const Eigen::Index n = cfg.size();
    const double dt = scenario.dt;
    const auto steps = static_cast<long>(std::llround(scenario.t_end / dt));

    SimulationTrace trace;
    trace.k = cfg.k;
    trace.v_ref = cfg.v_ref;

    Eigen::VectorXd di = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd du = Eigen::VectorXd::Zero(n);
    // The initial load holds until the first set-load event.
    cfg.load_power = scenario.initial.load_power.value_or(cfg.load_power);
    if (scenario.initial.mode == InitialMode::Equilibrium) {
        const Equilibrium eq = equilibrium(cfg);
        di = eq.delta_i;
        du = eq.delta_u;
    }
    if (scenario.initial.perturbation.size() == n) {
        di += scenario.initial.perturbation;
    }

    double max_tau = cfg.tau;
    for (const Event& e : scenario.events) {
        if (e.action == EventAction::SetDelay) max_tau = std::max(max_tau, e.value);
    }
    const auto capacity = static_cast<std::size_t>(std::ceil(max_tau / dt)) + 8;

    const Closure closure(cfg);
    ControlMatrices ctrl = control_matrices(cfg);
    bool enabled = scenario.distributed_enabled;

    Eigen::VectorXd e(n), cur(n), present(n + 1), delayed(n + 1), delayed_i(n);
    double u_L = 0.0;
    if (!closure.solve(di + du, cfg.v_ref, cfg.load_power, u_L, cur)) {
        trace.outcome = Outcome::Infeasible;
        trace.stop_reason = "no bus voltage at the initial state";
        return trace;
    }
    present.head(n) = cur;
    present(n) = u_L;
    SignalHistory history(n + 1, dt, capacity, present);

    std::array<Eigen::VectorXd, 4> kdi, kdu;
    for (auto& v : kdi) v.resize(n);
    for (auto& v : kdu) v.resize(n);
    Eigen::VectorXd si(n), su(n), stage_cur(n);

    std::string failure;
    auto stage = [&](double t, const Eigen::VectorXd& xi, const Eigen::VectorXd& xu,
                     Eigen::VectorXd& d_di, Eigen::VectorXd& d_du) {
        if (!enabled) {
            d_di.setZero();
            d_du.setZero();
            return true;
        }
        double stage_uL = 0.0;
        e = xi + xu;
        if (!closure.solve(e, cfg.v_ref, cfg.load_power, stage_uL, stage_cur)) {
            failure = "bus closure infeasible";
            return false;
        }
        if (cfg.tau > 0.0) {
            history.sample(t - cfg.tau, delayed);
            delayed_i = delayed.head(n);
            consensus_rate(cfg, ctrl, scenario.delay_mode, stage_cur, delayed_i, delayed(n), d_di, d_du);
        } else {
            consensus_rate(cfg, ctrl, scenario.delay_mode, stage_cur, stage_cur, stage_uL, d_di, d_du);
        }
        return true;
    };

    std::size_t next_event = 0;
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * dt;
        while (next_event < scenario.events.size() &&
               scenario.events[next_event].time <= t + 0.5 * dt) {
            const Event& ev = scenario.events[next_event++];
            switch (ev.action) {
                case EventAction::EnableDistributedControl: enabled = true; break;
                case EventAction::DisableDistributedControl:
                    enabled = false;
                    di.setZero();
                    du.setZero();
                    break;
                case EventAction::SetLoad: cfg.load_power = ev.value; break;
                case EventAction::SetLink:
                    cfg.comm.set_link(ev.i, ev.j, ev.value);
                    ctrl = control_matrices(cfg);
                    break;
                case EventAction::SetVoltageWeight: cfg.g(static_cast<Eigen::Index>(ev.i)) = ev.value; break;
                case EventAction::SetDelay: cfg.tau = ev.value; break;
            }
            trace.events.push_back({t, describe(ev)});
        }

        e = di + du;
        if (!closure.solve(e, cfg.v_ref, cfg.load_power, u_L, cur)) {
            trace.outcome = Outcome::Infeasible;
            trace.stop_reason = "bus closure infeasible";
            trace.end_time = t;
            break;
        }
        if (!std::isfinite(u_L) || u_L <= 0.0 || u_L >= 2.0 * cfg.v_ref || !cur.allFinite()) {
            trace.outcome = Outcome::Diverged;
            trace.stop_reason = "bus voltage left (0, 2 v_ref)";
            trace.end_time = t;
            break;
        }
        trace.max_power_residual =
            std::max(trace.max_power_residual, std::abs(u_L * cur.sum() - cfg.load_power) / cfg.load_power);
        present.head(n) = cur;
        present(n) = u_L;
        history.push(present);

        if (step % static_cast<long>(scenario.decimation) == 0 || step == steps) {
            trace.samples.push_back({t, u_L, cur, cur.cwiseProduct(cfg.r).array() + u_L, di, du});
        }
        if (step == steps) {
            trace.end_time = t;
            const SimSample& last = trace.samples.back();
            const bool settled = voltage_error(last.u_L, cfg.v_ref) <= kVoltageTolerance &&
                                 sharing_error(last.i, cfg.k) <= kSharingTolerance;
            trace.outcome = settled ? Outcome::Converged : Outcome::RunningStable;
            trace.stop_reason = "reached t_end";
            break;
        }

        bool ok = stage(t, di, du, kdi[0], kdu[0]);
        si = di + 0.5 * dt * kdi[0];
        su = du + 0.5 * dt * kdu[0];
        ok = ok && stage(t + 0.5 * dt, si, su, kdi[1], kdu[1]);
        si = di + 0.5 * dt * kdi[1];
        su = du + 0.5 * dt * kdu[1];
        ok = ok && stage(t + 0.5 * dt, si, su, kdi[2], kdu[2]);
        si = di + dt * kdi[2];
        su = du + dt * kdu[2];
        ok = ok && stage(t + dt, si, su, kdi[3], kdu[3]);
        if (!ok) {
            trace.outcome = Outcome::Infeasible;
            trace.stop_reason = failure;
            trace.end_time = t;
            break;
        }
        di += (dt / 6.0) * (kdi[0] + 2.0 * kdi[1] + 2.0 * kdi[2] + kdi[3]);
        du += (dt / 6.0) * (kdu[0] + 2.0 * kdu[1] + 2.0 * kdu[2] + kdu[3]);
        if (!di.allFinite() || !du.allFinite()) {
            trace.outcome = Outcome::Diverged;
            trace.stop_reason = "nonfinite state";
            trace.end_time = t + dt;
            break;
        }
    }
    return trace;
}

double sharing_error(const Eigen::VectorXd& currents, const Eigen::VectorXd& k) {
    const Eigen::ArrayXd ratio = currents.array() / k.array();
    const double mean = ratio.mean();
    if (mean == 0.0) {
        return (ratio != 0.0).any() ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return (ratio - mean).abs().maxCoeff() / std::abs(mean);
}

double voltage_error(double u_L, double v_ref) {
    return std::abs(u_L - v_ref) / v_ref;
}

double voltage_envelope(const SimulationTrace& trace, double t0, double t1) {
    double worst = 0.0;
    for (const SimSample& s : trace.samples) {
        if (s.t >= t0 && s.t <= t1) {
            worst = std::max(worst, std::abs(s.u_L - trace.v_ref));
        }
    }
    return worst;
}

const SimSample& sample_at(const SimulationTrace& trace, double time) {
    if (trace.samples.empty() || trace.samples.front().t > time) {
        throw Error(ErrorKind::InvalidInput, "no sample at or before the requested time");
    }
    auto it = std::upper_bound(trace.samples.begin(), trace.samples.end(), time,
                               [](double t, const SimSample& s) { return t < s.t; });
    return *std::prev(it);
}

void write_csv(const SimulationTrace& trace, std::ostream& out) {
    const Eigen::Index n = trace.k.size();
    out << "t,u_L";
    for (const char* prefix : {"i_", "u_", "di_", "du_"}) {
        for (Eigen::Index j = 1; j <= n; ++j) out << ',' << prefix << j;
    }
    out << '\n';
    out.precision(10);
    for (const SimSample& s : trace.samples) {
        out << s.t << ',' << s.u_L;
        for (const Eigen::VectorXd* v : {&s.i, &s.u, &s.delta_i, &s.delta_u}) {
            for (Eigen::Index j = 0; j < n; ++j) out << ',' << (*v)(j);
        }
        out << '\n';
    }
}

LinearTrace linear_dde_run(const Eigen::MatrixXd& j1, double tau, const Eigen::VectorXd& x0,
                           double t_end, double dt, std::size_t decimation) {
    if (!(dt > 0.0) || !(t_end > 0.0) || decimation == 0) {
        throw Error(ErrorKind::InvalidInput, "dt, t_end and decimation must be positive");
    }
    if (tau < 0.0 || (tau > 0.0 && dt > tau / 10.0)) {
        throw Error(ErrorKind::InvalidInput, "dt must not exceed tau/10");
    }
    if (j1.rows() != j1.cols() || j1.rows() != x0.size()) {
        throw Error(ErrorKind::InvalidInput, "J1 and x0 sizes differ");
    }
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    // Grid values and slopes for Hermite interpolation of x(t - tau).
    std::vector<Eigen::VectorXd> xs, fs;
    xs.reserve(static_cast<std::size_t>(steps) + 1);
    fs.reserve(static_cast<std::size_t>(steps) + 1);

    auto lagged = [&](double t) -> Eigen::VectorXd {
        if (t <= 0.0) return x0;
        const double u = t / dt;
        auto k = static_cast<long>(std::floor(u));
        const double s = u - static_cast<double>(k);
        const auto last = static_cast<long>(xs.size()) - 1;
        if (k >= last) return xs.back();
        const Eigen::VectorXd& p0 = xs[static_cast<std::size_t>(k)];
        const Eigen::VectorXd& p1 = xs[static_cast<std::size_t>(k) + 1];
        const Eigen::VectorXd& m0 = fs[static_cast<std::size_t>(k)];
        const Eigen::VectorXd& m1 = fs[static_cast<std::size_t>(k) + 1];
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * dt * m0 + (-2 * s3 + 3 * s2) * p1 +
               (s3 - s2) * dt * m1;
    };
    auto rate = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return tau > 0.0 ? Eigen::VectorXd(-j1 * lagged(t - tau)) : Eigen::VectorXd(-j1 * x);
    };

    LinearTrace out;
    Eigen::VectorXd x = x0;
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * dt;
        xs.push_back(x);
        fs.push_back(rate(t, x));
        if (step % static_cast<long>(decimation) == 0 || step == steps) {
            out.samples.push_back({t, x, x.norm()});
        }
        if (step == steps || !x.allFinite()) break;
        const Eigen::VectorXd k1 = fs.back();
        const Eigen::VectorXd k2 = rate(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = rate(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = rate(t + dt, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

LinearTrace linear_dde_run(const SmallSignalModel& model, double tau, const Eigen::VectorXd& x0,
                           double t_end, double dt, std::size_t decimation) {
    return linear_dde_run(model.J1, tau, x0, t_end, dt, decimation);
}

double envelope_growth_rate(const LinearTrace& trace) {
    if (trace.samples.size() < 8) {
        throw Error(ErrorKind::InvalidInput, "trace too short for an envelope estimate");
    }
    const double t_end = trace.samples.back().t;
    double third = 0.0;
    double last = 0.0;
    for (const LinearSample& s : trace.samples) {
        if (s.t >= 0.5 * t_end && s.t < 0.75 * t_end) third = std::max(third, s.norm);
        if (s.t >= 0.75 * t_end) last = std::max(last, s.norm);
    }
    if (!(third > 0.0) || !(last > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::log(last / third) / (0.25 * t_end);
}

}  // namespace dcgrid
