#pragma once

#include <cstddef>
#include <random>

#include "dcgrid/plant.hpp"

namespace dcgrid {

/// Ranges for randomized microgrid configurations used by property checks.
struct RandomConfigSpec {
    std::size_t n_min = 2;
    std::size_t n_max = 5;
    double r_lo = 0.1, r_hi = 3.0;
    double c_lo = 0.0, c_hi = 10.0;
    double k_lo = 0.5, k_hi = 3.0;
    double w_lo = 0.1, w_hi = 2.0;
    double extra_edge_probability = 0.4;
    double v_lo = 50.0, v_hi = 400.0;
    double b_lo = 0.1, b_hi = 50.0;
};

/// Random config on a connected graph (a spanning path plus random chords),
/// with at least one positive voltage weight. load_power is set to
/// load_fraction * P_sup.
[[nodiscard]] MicrogridConfig random_config(std::mt19937_64& rng, double load_fraction,
                                            const RandomConfigSpec& spec = {});

}  // namespace dcgrid
