#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcgrid/stability.hpp"

namespace dcgrid {

enum class SweepParam { LoadPower, Tau, B1, B2 };

[[nodiscard]] std::optional<SweepParam> parse_sweep_param(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(SweepParam param) noexcept;

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t steps = 2;
};

/// "lo:hi:steps"; throws Error{InvalidInput}.
[[nodiscard]] SweepRange parse_sweep_range(std::string_view text);

struct SweepPoint {
    double value = 0.0;
    Verdict verdict = Verdict::Unstable;
    bool cond28 = false;
    bool certificate = false;
    double tau_max = 0.0;
    double min_real = 0.0;
    std::string error;  // non-empty if the analysis threw
};

/// Neighbouring grid points where a column changes value.
struct Flip {
    std::string column;  // "verdict", "cond28" or "certificate"
    double lo = 0.0;
    double hi = 0.0;
    std::string from;
    std::string to;
};

[[nodiscard]] std::vector<SweepPoint> sweep(const MicrogridConfig& base, SweepParam param,
                                            const SweepRange& range,
                                            const AnalysisOptions& options = {});

[[nodiscard]] std::vector<Flip> find_flips(const std::vector<SweepPoint>& points);

/// value,verdict,cond28,certificate,tau_max,min_re rows, then "# flip ..." lines.
void write_sweep_csv(const std::vector<SweepPoint>& points, SweepParam param, std::ostream& out);

}  // namespace dcgrid
