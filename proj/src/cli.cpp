#include "dcgrid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

#include "dcgrid/error.hpp"
#include "dcgrid/sampling.hpp"
#include "dcgrid/scenario_io.hpp"
#include "dcgrid/simulator.hpp"

namespace dcgrid::cli {

namespace {

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream f(path);
    if (!f) {
        throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
    }
    f << doc.dump(2) << '\n';
}

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
    return path.parent_path() / (path.stem().string() + suffix);
}

void print_report(const std::string& name, const StabilityReport& rep, std::ostream& out) {
    out << std::setprecision(6);
    if (!name.empty()) out << "scenario: " << name << '\n';
    out << "load " << rep.load_power << " W, P_sup " << rep.p_sup << " W, load condition "
        << (rep.cond28 ? "holds" : "fails") << " (margin " << rep.delta1 << " W)\n";
    if (rep.gain) {
        out << "gamma1 " << rep.gain->gamma1 << ", gamma62 " << rep.gain->gamma62 << ", b1 bound "
            << rep.gain->bound62 << " (margin " << *rep.delta2 << ")\n";
    }
    out << "eigenvalues of J1:";
    for (const ModalEigen& m : rep.spectrum.modes) {
        out << ' ' << m.value.real();
        if (m.value.imag() != 0.0) out << (m.value.imag() > 0 ? "+" : "") << m.value.imag() << 'i';
    }
    out << "\nmin Re " << rep.spectrum.min_real() << ", tau " << rep.tau << " s, tau_max ";
    if (std::isinf(rep.margin.tau_max)) {
        out << "inf";
    } else {
        out << rep.margin.tau_max;
    }
    out << " s\n";
    for (const std::string& note : rep.notes) out << "note: " << note << '\n';
    out << "verdict: " << to_string(rep.verdict) << '\n';
}

}  // namespace

int exit_code(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::CertifiedStable: return kExitCertified;
        case Verdict::OracleStableUncertified:
        case Verdict::Marginal: return kExitUncertified;
        case Verdict::Unstable: return kExitUnstable;
    }
    return kExitError;
}

int cmd_analyze(const std::filesystem::path& scenario, const AnalyzeOptions& options, std::ostream& out,
                std::ostream& err) {
    try {
        const ScenarioFile file = load_scenario(scenario);
        AnalysisOptions ao;
        ao.eigen_tol = options.tol.value_or(file.analysis.eigen_tol);
        const StabilityReport rep = full_report(file.scenario.config, ao);
        print_report(file.name, rep, out);
        const nlohmann::json doc = to_json(rep);
        if (options.out) {
            write_json_file(*options.out, doc);
        } else {
            out << doc.dump(2) << '\n';
        }
        return exit_code(rep.verdict);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

int cmd_simulate(const std::filesystem::path& scenario, const SimulateOptions& options, std::ostream& out,
                 std::ostream& err) {
    try {
        ScenarioFile file = load_scenario(scenario);
        Scenario& sc = file.scenario;
        if (options.dt) sc.dt = *options.dt;
        if (options.t_end) sc.t_end = *options.t_end;
        const SimulationTrace trace = run(sc);

        std::ofstream csv(options.out);
        if (!csv) {
            throw Error(ErrorKind::InvalidInput, "cannot write " + options.out.string());
        }
        write_csv(trace, csv);
        const nlohmann::json summary = summary_json(trace);
        write_json_file(sibling(options.out, ".events.json"), events_json(trace));
        write_json_file(sibling(options.out, ".summary.json"), summary);

        for (const LoggedEvent& e : trace.events) {
            out << "t=" << e.time << " s: " << e.description << '\n';
        }
        out << summary.dump(2) << '\n';
        const bool failed = trace.outcome == Outcome::Diverged || trace.outcome == Outcome::Infeasible;
        return failed ? kExitUnstable : kExitCertified;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

int cmd_sweep(const std::filesystem::path& scenario, const SweepOptions& options, std::ostream& out,
              std::ostream& err) {
    try {
        const auto param = parse_sweep_param(options.param);
        if (!param) {
            throw Error(ErrorKind::InvalidInput, "unknown sweep parameter '" + options.param + "'");
        }
        const SweepRange range = parse_sweep_range(options.range);
        const ScenarioFile file = load_scenario(scenario);
        AnalysisOptions ao;
        ao.eigen_tol = options.tol.value_or(file.analysis.eigen_tol);
        const std::vector<SweepPoint> points = sweep(file.scenario.config, *param, range, ao);
        if (options.out) {
            std::ofstream f(*options.out);
            if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + options.out->string());
            write_sweep_csv(points, *param, f);
            for (const Flip& flip : find_flips(points)) {
                out << "flip " << flip.column << ' ' << flip.from << " -> " << flip.to << " between "
                    << flip.lo << " and " << flip.hi << '\n';
            }
        } else {
            write_sweep_csv(points, *param, out);
        }
        return kExitCertified;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
    try {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> fraction(0.2, 1.8);
        std::uniform_real_distribution<double> margin(1.01, 3.0);
        std::size_t mismatches = 0;
        std::size_t certified = 0;
        std::size_t unsound = 0;
        for (std::size_t trial = 0; trial < options.trials; ++trial) {
            double f = fraction(rng);
            while (std::abs(f - 1.0) <= 1e-3) f = fraction(rng);
            MicrogridConfig cfg = random_config(rng, f);
            if (cfg.load_power >= 0.999 * cz_singular_load(cfg)) {
                --trial;
                continue;
            }
            const SmallSignalModel model = linearize(cfg);

            // Sign of the product of the nonzero J2 eigenvalues against the load condition.
            std::vector<Complex> mu = eigenvalues(model.J2);
            std::sort(mu.begin(), mu.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
            double product = 1.0;
            for (std::size_t i = 1; i < mu.size(); ++i) product *= mu[i].real();
            if ((product > 0.0) != max_load(cfg).cond28) ++mismatches;

            if (!max_load(cfg).cond28) continue;
            try {
                const GainBound gb = gain_bound(diagonalize_j2(model), cfg.b2);
                cfg.b1 = gb.bound62 * margin(rng);
                if (!(cfg.b1 > 0.0)) continue;
                ++certified;
                if (!eigen_classify(linearize(cfg)).positive_stable) ++unsound;
            } catch (const Error&) {
                continue;
            }
        }
        out << "trials " << options.trials << ", load-condition mismatches " << mismatches
            << ", certified configs " << certified << ", certified but unstable " << unsound << '\n';
        return mismatches == 0 && unsound == 0 ? kExitCertified : kExitUnstable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace dcgrid::cli
