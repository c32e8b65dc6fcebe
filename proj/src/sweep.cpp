#include "dcgrid/sweep.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "dcgrid/error.hpp"

namespace dcgrid {

namespace {

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::InvalidInput, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::string bool_text(bool b) {
    return b ? "true" : "false";
}

}  // namespace

std::optional<SweepParam> parse_sweep_param(std::string_view name) noexcept {
    if (name == "P" || name == "load_power") return SweepParam::LoadPower;
    if (name == "tau") return SweepParam::Tau;
    if (name == "b1") return SweepParam::B1;
    if (name == "b2") return SweepParam::B2;
    return std::nullopt;
}

std::string_view to_string(SweepParam param) noexcept {
    switch (param) {
        case SweepParam::LoadPower: return "P";
        case SweepParam::Tau: return "tau";
        case SweepParam::B1: return "b1";
        case SweepParam::B2: return "b2";
    }
    return "?";
}

SweepRange parse_sweep_range(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (b == std::string_view::npos) {
        throw Error(ErrorKind::InvalidInput, "range must be lo:hi:steps");
    }
    SweepRange r;
    r.lo = parse_double(text.substr(0, a));
    r.hi = parse_double(text.substr(a + 1, b - a - 1));
    const double steps = parse_double(text.substr(b + 1));
    if (steps < 2 || steps != std::floor(steps)) {
        throw Error(ErrorKind::InvalidInput, "steps must be an integer >= 2");
    }
    if (!(r.hi > r.lo)) {
        throw Error(ErrorKind::InvalidInput, "range needs lo < hi");
    }
    r.steps = static_cast<std::size_t>(steps);
    return r;
}

std::vector<SweepPoint> sweep(const MicrogridConfig& base, SweepParam param, const SweepRange& range,
                              const AnalysisOptions& options) {
    std::vector<SweepPoint> points;
    points.reserve(range.steps);
    for (std::size_t s = 0; s < range.steps; ++s) {
        const double value =
            range.lo + (range.hi - range.lo) * static_cast<double>(s) / static_cast<double>(range.steps - 1);
        MicrogridConfig cfg = base;
        switch (param) {
            case SweepParam::LoadPower: cfg.load_power = value; break;
            case SweepParam::Tau: cfg.tau = value; break;
            case SweepParam::B1: cfg.b1 = value; break;
            case SweepParam::B2: cfg.b2 = value; break;
        }
        SweepPoint p;
        p.value = value;
        try {
            const StabilityReport rep = full_report(cfg, options);
            p.verdict = rep.verdict;
            p.cond28 = rep.cond28;
            p.certificate = rep.certificate;
            p.tau_max = rep.margin.tau_max;
            p.min_real = rep.spectrum.min_real();
        } catch (const Error& e) {
            p.error = e.what();
        }
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<Flip> find_flips(const std::vector<SweepPoint>& points) {
    std::vector<Flip> flips;
    for (std::size_t s = 1; s < points.size(); ++s) {
        const SweepPoint& a = points[s - 1];
        const SweepPoint& b = points[s];
        if (!a.error.empty() || !b.error.empty()) continue;
        if (a.verdict != b.verdict) {
            flips.push_back({"verdict", a.value, b.value, std::string(to_string(a.verdict)),
                             std::string(to_string(b.verdict))});
        }
        if (a.cond28 != b.cond28) {
            flips.push_back({"cond28", a.value, b.value, bool_text(a.cond28), bool_text(b.cond28)});
        }
        if (a.certificate != b.certificate) {
            flips.push_back(
                {"certificate", a.value, b.value, bool_text(a.certificate), bool_text(b.certificate)});
        }
    }
    return flips;
}

void write_sweep_csv(const std::vector<SweepPoint>& points, SweepParam param, std::ostream& out) {
    out.precision(10);
    out << to_string(param) << ",verdict,cond28,certificate,tau_max,min_re,error\n";
    for (const SweepPoint& p : points) {
        out << p.value << ',';
        if (p.error.empty()) {
            out << to_string(p.verdict) << ',' << bool_text(p.cond28) << ',' << bool_text(p.certificate)
                << ',';
            if (std::isinf(p.tau_max)) {
                out << "inf";
            } else {
                out << p.tau_max;
            }
            out << ',' << p.min_real << ",\n";
        } else {
            out << ",,,,,\"" << p.error << "\"\n";
        }
    }
    for (const Flip& f : find_flips(points)) {
        out << "# flip " << f.column << ' ' << f.from << " -> " << f.to << " between " << f.lo << " and "
            << f.hi << '\n';
    }
}

}  // namespace dcgrid
