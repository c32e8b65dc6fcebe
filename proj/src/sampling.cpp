#include "dcgrid/sampling.hpp"

#include <algorithm>

#include "dcgrid/stability.hpp"

namespace dcgrid {

MicrogridConfig random_config(std::mt19937_64& rng, double load_fraction, const RandomConfigSpec& spec) {
    std::uniform_int_distribution<std::size_t> pick_n(spec.n_min, spec.n_max);
    const std::size_t n = pick_n(rng);
    const auto ni = static_cast<Eigen::Index>(n);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    MicrogridConfig cfg;
    cfg.r.resize(ni);
    cfg.c.resize(ni);
    cfg.k.resize(ni);
    cfg.g.resize(ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        cfg.r(i) = uniform(spec.r_lo, spec.r_hi);
        cfg.c(i) = uniform(spec.c_lo, spec.c_hi);
        cfg.k(i) = uniform(spec.k_lo, spec.k_hi);
        cfg.g(i) = std::bernoulli_distribution(0.5)(rng) ? uniform(0.0, 1.0) : 0.0;
    }
    if (cfg.g.maxCoeff() <= 0.0) {
        cfg.g(std::uniform_int_distribution<Eigen::Index>(0, ni - 1)(rng)) = uniform(0.1, 1.0);
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    cfg.comm.weights = Eigen::MatrixXd::Zero(ni, ni);
    for (std::size_t i = 1; i < n; ++i) {
        cfg.comm.set_link(order[i - 1], order[i], uniform(spec.w_lo, spec.w_hi));
    }
    std::bernoulli_distribution chord(spec.extra_edge_probability);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (cfg.comm.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0 && chord(rng)) {
                cfg.comm.set_link(i, j, uniform(spec.w_lo, spec.w_hi));
            }
        }
    }

    cfg.v_ref = uniform(spec.v_lo, spec.v_hi);
    cfg.b1 = uniform(spec.b_lo, spec.b_hi);
    cfg.b2 = uniform(spec.b_lo, spec.b_hi);
    cfg.tau = 0.0;
    cfg.load_power = 1.0;
    cfg.load_power = load_fraction * max_load(cfg).p_sup;
    return cfg;
}

}  // namespace dcgrid
