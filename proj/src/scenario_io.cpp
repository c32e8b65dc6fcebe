#include "dcgrid/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dcgrid/error.hpp"

namespace dcgrid {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& message) {
    throw Error(ErrorKind::Schema, path + ": " + message);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) {
        schema(path, "expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        schema(path.empty() ? key : path + "." + key, "missing");
    }
    return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        schema(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        schema(path, "must be finite");
    }
    return v;
}

std::size_t index1(const json& j, std::size_t n, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 1 ||
        static_cast<std::size_t>(j.get<long long>()) > n) {
        std::ostringstream msg;
        msg << "expected a DG index in 1.." << n;
        schema(path, msg.str());
    }
    return static_cast<std::size_t>(j.get<long long>()) - 1;
}

enum class Sign { Positive, NonNegative };

double checked(const json& j, const std::string& path, Sign sign) {
    const double v = number(j, path);
    if (sign == Sign::Positive && !(v > 0.0)) schema(path, "must be positive");
    if (sign == Sign::NonNegative && !(v >= 0.0)) schema(path, "must be nonnegative");
    return v;
}

Eigen::VectorXd vector(const json& j, std::size_t n, const std::string& path, Sign sign) {
    if (!j.is_array() || j.size() != n) {
        std::ostringstream msg;
        msg << "expected an array of " << n << " numbers";
        schema(path, msg.str());
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        v(static_cast<Eigen::Index>(i)) = checked(j[i], path + "[" + std::to_string(i + 1) + "]", sign);
    }
    return v;
}

CommGraph parse_comm(const json& comm, std::size_t n) {
    if (const json* edges = optional_field(comm, "edges")) {
        if (!edges->is_array()) schema("comm.edges", "expected an array");
        std::vector<Edge> list;
        for (std::size_t e = 0; e < edges->size(); ++e) {
            const std::string p = "comm.edges[" + std::to_string(e + 1) + "]";
            const json& item = (*edges)[e];
            Edge edge;
            edge.i = index1(field(item, "i", p), n, p + ".i");
            edge.j = index1(field(item, "j", p), n, p + ".j");
            if (edge.i == edge.j) schema(p, "self loops are not allowed");
            edge.weight = checked(field(item, "w", p), p + ".w", Sign::NonNegative);
            list.push_back(edge);
        }
        return CommGraph::from_edges(n, list);
    }
    if (const json* matrix = optional_field(comm, "matrix")) {
        if (!matrix->is_array() || matrix->size() != n) schema("comm.matrix", "expected n rows");
        Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::VectorXd row =
                vector((*matrix)[i], n, "comm.matrix[" + std::to_string(i + 1) + "]", Sign::NonNegative);
            w.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }
        if (!w.isApprox(w.transpose(), 0.0)) schema("comm.matrix", "must be symmetric");
        if (w.diagonal().any()) schema("comm.matrix", "diagonal must be zero");
        return CommGraph::from_dense(w);
    }
    schema("comm", "needs edges or matrix");
}

Event parse_event(const json& item, std::size_t n, const std::string& p) {
    Event e;
    e.time = checked(field(item, "t", p), p + ".t", Sign::NonNegative);
    const json& action = field(item, "action", p);
    if (!action.is_string()) schema(p + ".action", "expected a string");
    const auto parsed = parse_event_action(action.get<std::string>());
    if (!parsed) schema(p + ".action", "unknown action '" + action.get<std::string>() + "'");
    e.action = *parsed;
    switch (e.action) {
        case EventAction::SetLink: {
            e.i = index1(field(item, "i", p), n, p + ".i");
            e.j = index1(field(item, "j", p), n, p + ".j");
            if (e.i == e.j) schema(p, "link endpoints must differ");
            const json* w = optional_field(item, "w");
            e.value = checked(w ? *w : field(item, "value", p), p + ".w", Sign::NonNegative);
            break;
        }
        case EventAction::SetVoltageWeight:
            e.i = index1(field(item, "i", p), n, p + ".i");
            e.value = checked(field(item, "value", p), p + ".value", Sign::NonNegative);
            break;
        case EventAction::SetLoad:
            e.value = checked(field(item, "value", p), p + ".value", Sign::Positive);
            break;
        case EventAction::SetDelay:
            e.value = checked(field(item, "value", p), p + ".value", Sign::NonNegative);
            break;
        default: break;
    }
    return e;
}

json vec_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json tau_json(double tau) {
    return std::isinf(tau) ? json("inf") : json(tau);
}

}  // namespace

ScenarioFile parse_scenario(const json& doc) {
    if (!doc.is_object()) schema("$", "expected a JSON object");
    ScenarioFile file;
    if (const json* name = optional_field(doc, "name"); name && name->is_string()) {
        file.name = name->get<std::string>();
    }
    if (const json* d = optional_field(doc, "description"); d && d->is_string()) {
        file.description = d->get<std::string>();
    }

    const json& net = field(doc, "network", "");
    const json& nj = field(net, "n", "network");
    if (!nj.is_number_integer() || nj.get<long long>() < 1) schema("network.n", "expected a positive integer");
    const auto n = static_cast<std::size_t>(nj.get<long long>());

    MicrogridConfig& cfg = file.scenario.config;
    cfg.r = vector(field(net, "r", "network"), n, "network.r", Sign::Positive);
    cfg.c = vector(field(net, "c", "network"), n, "network.c", Sign::NonNegative);
    cfg.k = vector(field(net, "k", "network"), n, "network.k", Sign::Positive);
    cfg.g = vector(field(net, "g", "network"), n, "network.g", Sign::NonNegative);
    cfg.v_ref = checked(field(net, "v_ref", "network"), "network.v_ref", Sign::Positive);
    cfg.load_power = checked(field(net, "load_power", "network"), "network.load_power", Sign::Positive);
    cfg.comm = parse_comm(field(doc, "comm", ""), n);

    const json& control = field(doc, "control", "");
    cfg.b1 = checked(field(control, "b1", "control"), "control.b1", Sign::NonNegative);
    cfg.b2 = checked(field(control, "b2", "control"), "control.b2", Sign::NonNegative);
    cfg.tau = checked(field(control, "tau", "control"), "control.tau", Sign::NonNegative);
    Scenario& sc = file.scenario;
    if (const json* mode = optional_field(control, "delay_mode")) {
        const auto parsed = mode->is_string() ? parse_delay_mode(mode->get<std::string>()) : std::nullopt;
        if (!parsed) schema("control.delay_mode", "expected \"uniform\" or \"neighbor\"");
        sc.delay_mode = *parsed;
    }
    if (const json* en = optional_field(control, "distributed_enabled")) {
        if (!en->is_boolean()) schema("control.distributed_enabled", "expected a boolean");
        sc.distributed_enabled = en->get<bool>();
    }

    if (const json* sim = optional_field(doc, "sim")) {
        sc.t_end = checked(field(*sim, "t_end", "sim"), "sim.t_end", Sign::Positive);
        sc.dt = checked(field(*sim, "dt", "sim"), "sim.dt", Sign::Positive);
        if (const json* dec = optional_field(*sim, "decimation")) {
            if (!dec->is_number_integer() || dec->get<long long>() < 1) {
                schema("sim.decimation", "expected a positive integer");
            }
            sc.decimation = static_cast<std::size_t>(dec->get<long long>());
        }
        if (const json* init = optional_field(*sim, "initial")) {
            const json& mode = field(*init, "mode", "sim.initial");
            if (mode == "droop") {
                sc.initial.mode = InitialMode::Droop;
            } else if (mode == "equilibrium") {
                sc.initial.mode = InitialMode::Equilibrium;
            } else {
                schema("sim.initial.mode", "expected \"droop\" or \"equilibrium\"");
            }
            if (const json* p = optional_field(*init, "load_power")) {
                sc.initial.load_power = checked(*p, "sim.initial.load_power", Sign::Positive);
            }
            if (const json* d = optional_field(*init, "perturbation")) {
                Eigen::VectorXd v(static_cast<Eigen::Index>(n));
                if (!d->is_array() || d->size() != n) schema("sim.initial.perturbation", "expected n numbers");
                for (std::size_t i = 0; i < n; ++i) {
                    v(static_cast<Eigen::Index>(i)) =
                        number((*d)[i], "sim.initial.perturbation[" + std::to_string(i + 1) + "]");
                }
                sc.initial.perturbation = v;
            }
        }
        if (const json* events = optional_field(*sim, "events")) {
            if (!events->is_array()) schema("sim.events", "expected an array");
            for (std::size_t e = 0; e < events->size(); ++e) {
                sc.events.push_back(parse_event((*events)[e], n, "sim.events[" + std::to_string(e + 1) + "]"));
            }
        }
    }

    if (const json* an = optional_field(doc, "analysis")) {
        if (const json* t = optional_field(*an, "eigen_tol")) {
            file.analysis.eigen_tol = checked(*t, "analysis.eigen_tol", Sign::Positive);
        }
        if (const json* t = optional_field(*an, "inertia_tol")) {
            file.analysis.inertia_tol = checked(*t, "analysis.inertia_tol", Sign::Positive);
        }
    }

    try {
        sc.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Schema, std::string("scenario: ") + e.what());
    }
    return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

json to_json(const ScenarioFile& file) {
    const Scenario& sc = file.scenario;
    const MicrogridConfig& cfg = sc.config;
    json edges = json::array();
    for (const Edge& e : cfg.comm.edges()) {
        edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"w", e.weight}});
    }
    json events = json::array();
    for (const Event& e : sc.events) {
        json item{{"t", e.time}, {"action", std::string(to_string(e.action))}};
        switch (e.action) {
            case EventAction::SetLink:
                item["i"] = e.i + 1;
                item["j"] = e.j + 1;
                item["w"] = e.value;
                break;
            case EventAction::SetVoltageWeight:
                item["i"] = e.i + 1;
                item["value"] = e.value;
                break;
            case EventAction::SetLoad:
            case EventAction::SetDelay: item["value"] = e.value; break;
            default: break;
        }
        events.push_back(item);
    }
    json initial{{"mode", sc.initial.mode == InitialMode::Droop ? "droop" : "equilibrium"}};
    if (sc.initial.load_power) initial["load_power"] = *sc.initial.load_power;
    if (sc.initial.perturbation.size() > 0) initial["perturbation"] = vec_json(sc.initial.perturbation);

    return json{
        {"name", file.name},
        {"description", file.description},
        {"network",
         {{"n", cfg.size()},
          {"r", vec_json(cfg.r)},
          {"c", vec_json(cfg.c)},
          {"k", vec_json(cfg.k)},
          {"g", vec_json(cfg.g)},
          {"v_ref", cfg.v_ref},
          {"load_power", cfg.load_power}}},
        {"comm", {{"edges", edges}}},
        {"control",
         {{"b1", cfg.b1},
          {"b2", cfg.b2},
          {"tau", cfg.tau},
          {"delay_mode", std::string(to_string(sc.delay_mode))},
          {"distributed_enabled", sc.distributed_enabled}}},
        {"sim",
         {{"t_end", sc.t_end},
          {"dt", sc.dt},
          {"decimation", sc.decimation},
          {"initial", initial},
          {"events", events}}},
        {"analysis", {{"eigen_tol", file.analysis.eigen_tol}, {"inertia_tol", file.analysis.inertia_tol}}},
    };
}

json to_json(const StabilityReport& report) {
    json modes = json::array();
    for (const ModalEigen& m : report.spectrum.modes) {
        modes.push_back({{"re", m.value.real()},
                         {"im", m.value.imag()},
                         {"theta", m.angle},
                         {"magnitude", m.magnitude}});
    }
    json out{
        {"load_power", report.load_power},
        {"p_sup", report.p_sup},
        {"cond28", report.cond28},
        {"delta1", report.delta1},
        {"eigenvalues", modes},
        {"positive_stable", report.spectrum.positive_stable},
        {"zero_mode", report.spectrum.has_zero_mode},
        {"min_re", report.spectrum.min_real()},
        {"tau", report.tau},
        {"tau_max", tau_json(report.margin.tau_max)},
        {"delay_unstable", report.margin.unstable},
        {"certificate", report.certificate},
        {"oracle_stable", report.oracle_stable},
        {"verdict", std::string(to_string(report.verdict))},
        {"notes", report.notes},
    };
    if (report.gain) {
        out["gamma1"] = report.gain->gamma1;
        out["gamma62"] = report.gain->gamma62;
        out["bound62"] = report.gain->bound62;
    } else {
        out["gamma1"] = nullptr;
        out["gamma62"] = nullptr;
        out["bound62"] = nullptr;
    }
    out["delta2"] = report.delta2 ? json(*report.delta2) : json(nullptr);
    out["alpha_beta_n"] = report.alpha_beta_n ? json(*report.alpha_beta_n) : json(nullptr);
    return out;
}

json summary_json(const SimulationTrace& trace) {
    json out{{"outcome", std::string(to_string(trace.outcome))},
             {"stop_reason", trace.stop_reason},
             {"end_time", trace.end_time},
             {"max_power_residual", trace.max_power_residual}};
    if (!trace.samples.empty()) {
        const SimSample& last = trace.samples.back();
        out["final_u_L"] = last.u_L;
        out["final_ratios"] = vec_json(last.i.cwiseQuotient(trace.k));
        out["voltage_error"] = voltage_error(last.u_L, trace.v_ref);
        out["sharing_error"] = sharing_error(last.i, trace.k);
    }
    return out;
}

json events_json(const SimulationTrace& trace) {
    json out = json::array();
    for (const LoggedEvent& e : trace.events) {
        out.push_back({{"t", e.time}, {"event", e.description}});
    }
    return out;
}

}  // namespace dcgrid
