#include "dcgrid/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dcgrid/error.hpp"

namespace dcgrid {

namespace {

double ones_quadratic(const Eigen::MatrixXd& m) {
    return m.sum();
}

}  // namespace

MaxLoad max_load(const MicrogridConfig& config) {
    const double sum_k = config.k.sum();
    const double weighted = config.k.cwiseProduct(config.k).dot(config.r + config.c);
    MaxLoad out;
    out.p_sup = config.v_ref * config.v_ref * sum_k * sum_k / weighted;
    out.cond28 = config.load_power < out.p_sup;
    return out;
}

DiagonalizationResult diagonalize_j2(const SmallSignalModel& model) {
    const Eigen::Index n = model.size();
    if (n < 2) {
        throw Error(ErrorKind::InvalidInput, "diagonalization needs at least two DGs");
    }
    if (ones_quadratic(model.Q) >= 0.0) {
        throw Error(ErrorKind::HypothesisViolated, "1^T Q 1 >= 0: load at or above P_sup");
    }
    const Eigen::Index m = n - 1;

    // Orthogonal P1 with P1 KLK P1^T = diag(Lambda1, 0), zero mode last.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> klk(model.KLK);
    if (klk.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure, "eigendecomposition of K L K failed");
    }
    Eigen::MatrixXd p1(n, n);
    p1.topRows(m) = klk.eigenvectors().rightCols(m).transpose();
    p1.row(m) = klk.eigenvectors().col(0).transpose();
    const Eigen::VectorXd lambda1 = klk.eigenvalues().tail(m);
    if (lambda1.minCoeff() <= 0.0) {
        throw Error(ErrorKind::DegenerateSpectrum, "K L K has a repeated zero eigenvalue");
    }

    const Eigen::MatrixXd mm = p1 * model.CZ_inv * p1.transpose();
    const Eigen::MatrixXd m11 = mm.topLeftCorner(m, m);
    const Eigen::VectorXd m12 = mm.topRightCorner(m, 1);
    const Eigen::VectorXd sqrt_l = lambda1.cwiseSqrt();

    // M11 Lambda1 is similar to the symmetric Lambda1^1/2 M11 Lambda1^1/2.
    const Eigen::MatrixXd s = sqrt_l.asDiagonal() * m11 * sqrt_l.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(0.5 * (s + s.transpose()));
    if (sym.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure, "eigendecomposition of M11 Lambda1 failed");
    }
    Eigen::VectorXd mu(m);
    Eigen::MatrixXd v(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        mu(i) = sym.eigenvalues()(m - 1 - i);
        v.col(i) = sym.eigenvectors().col(m - 1 - i);
    }

    const double scale = std::max(1.0, spectral_norm(model.J2));
    const double spacing = kDegenerateSpacing * scale;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (std::abs(mu(i)) < spacing || (i > 0 && mu(i - 1) - mu(i) < spacing)) {
            throw Error(ErrorKind::DegenerateSpectrum, "J2 eigenvalues are not distinct");
        }
    }

    const Eigen::MatrixXd p2_inv = sqrt_l.cwiseInverse().asDiagonal() * v;
    Eigen::MatrixXd p3_inv = Eigen::MatrixXd::Identity(n, n);
    p3_inv.topLeftCorner(m, m) = p2_inv;
    const Eigen::RowVectorXd h = m12.transpose() * lambda1.asDiagonal() * p2_inv;
    Eigen::MatrixXd p4 = Eigen::MatrixXd::Identity(n, n);
    p4.bottomLeftCorner(1, m) = h * mu.cwiseInverse().asDiagonal();

    Eigen::MatrixXd p6 = p1.transpose() * p3_inv * p4;
    for (Eigen::Index j = 0; j < n; ++j) {
        p6.col(j).normalize();
        Eigen::Index arg = 0;
        p6.col(j).cwiseAbs().maxCoeff(&arg);
        if (p6(arg, j) < 0.0) {
            p6.col(j) *= -1.0;
        }
    }

    DiagonalizationResult out;
    const auto lu = p6.partialPivLu();
    Eigen::MatrixXd similar = lu.solve(model.J2 * p6);
    similar.diagonal().setZero();
    out.residual = similar.cwiseAbs().maxCoeff();
    out.P6 = std::move(p6);
    out.mu = std::move(mu);
    out.alpha = model.r_L * lu.solve(model.CZ_inv * model.g);
    out.beta = out.P6.transpose() * Eigen::VectorXd::Ones(n);
    return out;
}

double alpha_beta_closed_form(const SmallSignalModel& model) {
    const Eigen::VectorXd k = model.K.diagonal().cwiseInverse();
    return model.r_L * k.dot(model.g) * k.sum() / ones_quadratic(model.Q);
}

GainBound gain_bound(const DiagonalizationResult& diag, double b2) {
    const Eigen::Index m = diag.mu.size();
    const double an = diag.alpha(m);
    const double bn = diag.beta(m);
    const double abn = an * bn;
    if (!(abn > 0.0)) {
        throw Error(ErrorKind::HypothesisViolated,
                    "alpha_n beta_n <= 0: no voltage feedback or load above P_sup");
    }
    GainBound out;
    double sum62 = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double mu = diag.mu(i);
        if (!(mu > 0.0)) {
            throw Error(ErrorKind::BoundUndefined, "J2 has a nonpositive nonzero eigenvalue");
        }
        const double ai = diag.alpha(i);
        const double bi = diag.beta(i);
        const double ab = ai * bi;
        out.gamma1 -= std::min(ab, 0.0) / mu;

        double eps = 1.0;
        double eta = ai;
        double xi = bi;
        if (ab > 0.0) {
            const double arg = an * bi / (bn * ai);
            if (!(arg > 0.0)) {
                throw Error(ErrorKind::InternalInconsistency, "weight argument is not positive");
            }
            eps = std::sqrt(arg);
        } else if (ab == 0.0) {
            eta = 0.0;
            xi = 0.0;
        }
        const double d = an * xi - eps * eta * bn;
        sum62 += d * d / (abn * mu * eps);
    }
    out.gamma62 = 0.25 * sum62;
    out.bound62 = b2 * out.gamma62;
    return out;
}

std::vector<Complex> Spectrum::values() const {
    std::vector<Complex> out;
    out.reserve(modes.size());
    for (const auto& mode : modes) {
        out.push_back(mode.value);
    }
    return out;
}

double Spectrum::min_real() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& mode : modes) {
        lo = std::min(lo, mode.value.real());
    }
    return lo;
}

Spectrum eigen_classify(const SmallSignalModel& model, double tol) {
    Spectrum out;
    out.zero_band = tol * std::max(1.0, spectral_norm(model.J1));
    out.positive_stable = true;
    for (const Complex& z : eigenvalues(model.J1)) {
        ModalEigen mode{z, std::abs(z), std::arg(z)};
        if (mode.magnitude <= out.zero_band) {
            out.has_zero_mode = true;
        }
        if (z.real() <= out.zero_band) {
            out.positive_stable = false;
        }
        out.modes.push_back(mode);
    }
    return out;
}

DelayMargin delay_margin(std::span<const Complex> spectrum, double zero_band) {
    if (spectrum.empty()) {
        throw Error(ErrorKind::InvalidInput, "empty spectrum");
    }
    DelayMargin out;
    out.tau_max = std::numeric_limits<double>::infinity();
    for (const Complex& z : spectrum) {
        const double mag = std::abs(z);
        if (mag <= zero_band) {
            out.marginal = true;
            continue;
        }
        if (z.real() <= 0.0) {
            out.unstable = true;
            continue;
        }
        const double angle = std::arg(z);
        out.tau_max = std::min(out.tau_max, (std::numbers::pi - 2.0 * std::abs(angle)) / (2.0 * mag));
    }
    if (out.unstable) {
        out.tau_max = 0.0;
    }
    return out;
}

bool lemma6_check(double b, double angle) {
    return std::numbers::pi / 2.0 - b > std::abs(angle);
}

Complex dominant_delay_root(Complex chi, double tau, int branches) {
    if (!(tau > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "tau must be positive");
    }
    if (chi == Complex{}) {
        return Complex{};
    }
    // s = z / tau with z + w e^{-z} = 0, w = tau chi; z = W_k(-w).
    const Complex w = tau * chi;
    const Complex x = -w;
    auto refine = [&](Complex z, bool& ok) {
        for (int it = 0; it < 100; ++it) {
            const Complex e = w * std::exp(-z);
            const Complex f = z + e;
            const Complex df = 1.0 - e;
            if (std::abs(df) < 1e-300) {
                break;
            }
            const Complex step = f / df;
            z -= step;
            if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
                break;
            }
        }
        ok = std::isfinite(z.real()) && std::isfinite(z.imag()) &&
             std::abs(z + w * std::exp(-z)) <= 1e-9 * std::max(1.0, std::abs(z));
        return z;
    };

    Complex best{-std::numeric_limits<double>::infinity(), 0.0};
    bool found = false;
    for (int k = -branches; k <= branches; ++k) {
        std::vector<Complex> seeds;
        const Complex l1 = std::log(x) + Complex{0.0, 2.0 * std::numbers::pi * k};
        seeds.push_back(l1 - std::log(l1));
        if (k == 0) {
            seeds.push_back(x);
            seeds.push_back(std::log(1.0 + x));
        }
        for (const Complex& seed : seeds) {
            bool ok = false;
            const Complex z = refine(seed, ok);
            if (ok && z.real() > best.real()) {
                best = z;
                found = true;
            }
        }
    }
    if (!found) {
        throw Error(ErrorKind::NumericalFailure, "no characteristic root converged");
    }
    return best / tau;
}

std::string_view to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::CertifiedStable: return "certified-stable";
        case Verdict::OracleStableUncertified: return "oracle-stable-uncertified";
        case Verdict::Unstable: return "unstable";
        case Verdict::Marginal: return "marginal";
    }
    return "unknown";
}

StabilityReport full_report(const MicrogridConfig& config, const AnalysisOptions& options) {
    config.validate();
    StabilityReport rep;
    rep.load_power = config.load_power;
    rep.tau = config.tau;
    const MaxLoad ml = max_load(config);
    rep.p_sup = ml.p_sup;
    rep.cond28 = ml.cond28;
    rep.delta1 = ml.p_sup - config.load_power;

    const SmallSignalModel model = linearize(config);
    if (rep.cond28) {
        try {
            const DiagonalizationResult diag = diagonalize_j2(model);
            const Eigen::Index m = diag.mu.size();
            rep.alpha_beta_n = diag.alpha(m) * diag.beta(m);
            rep.gain = gain_bound(diag, config.b2);
            rep.delta2 = config.b1 - rep.gain->bound62;
        } catch (const Error& e) {
            rep.notes.emplace_back(e.what());
        }
    } else {
        rep.notes.emplace_back("load at or above P_sup: gain certificate not applicable");
    }

    rep.spectrum = eigen_classify(model, options.eigen_tol);
    const std::vector<Complex> values = rep.spectrum.values();
    rep.margin = delay_margin(values, rep.spectrum.zero_band);

    const bool delay_ok = config.tau < rep.margin.tau_max;
    rep.certificate = rep.cond28 && rep.delta2.has_value() && *rep.delta2 > 0.0 && delay_ok;
    rep.oracle_stable = rep.spectrum.positive_stable && !rep.margin.unstable && delay_ok;

    if (rep.spectrum.has_zero_mode && !rep.margin.unstable) {
        rep.verdict = Verdict::Marginal;
    } else if (rep.certificate && rep.oracle_stable) {
        rep.verdict = Verdict::CertifiedStable;
    } else if (rep.oracle_stable) {
        rep.verdict = Verdict::OracleStableUncertified;
    } else {
        rep.verdict = Verdict::Unstable;
    }
    if (rep.certificate && !rep.oracle_stable) {
        rep.notes.emplace_back("internal inconsistency: certificate holds but J1 is not positive stable");
    }
    return rep;
}

}  // namespace dcgrid
