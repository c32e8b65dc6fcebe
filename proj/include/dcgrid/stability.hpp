#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcgrid/matrixkit.hpp"
#include "dcgrid/plant.hpp"

namespace dcgrid {

struct MaxLoad {
    double p_sup = 0.0;  // W
    bool cond28 = false; // load_power < p_sup
};

/// P_sup = v_ref^2 (sum k_i)^2 / sum k_i^2 (r_i + c_i). Above it J2 has a
/// negative eigenvalue.
[[nodiscard]] MaxLoad max_load(const MicrogridConfig& config);

/// Similarity P6^-1 J2 P6 = diag(mu_2..mu_n, 0) with unit-norm columns, plus the
/// projections of the voltage-feedback term onto that eigenbasis.
struct DiagonalizationResult {
    Eigen::MatrixXd P6;
    Eigen::VectorXd mu;     // nonzero eigenvalues of J2, descending
    Eigen::VectorXd alpha;  // r_L P6^-1 (C+Z)^-1 g
    Eigen::VectorXd beta;   // P6^T 1
    double residual = 0.0;  // max |off-diagonal| of P6^-1 J2 P6
};

inline constexpr double kDegenerateSpacing = 1e-10;

/// Throws Error{HypothesisViolated} when 1^T Q 1 >= 0 (load at or above P_sup),
/// Error{DegenerateSpectrum} when two mu's (or a mu and zero) are closer than
/// 1e-10 ||J2||.
[[nodiscard]] DiagonalizationResult diagonalize_j2(const SmallSignalModel& model);

/// 1^T Q 1 expressed through the transformed vectors (alpha_n beta_n side of the
/// determinant identity): r_L (sum k_i g_i)(sum k_i) / 1^T Q 1.
[[nodiscard]] double alpha_beta_closed_form(const SmallSignalModel& model);

struct GainBound {
    /// Clipped-sum threshold: -sum_i min(alpha_i beta_i, 0) / mu_{i+1}.
    double gamma1 = 0.0;
    /// Lyapunov/determinant threshold per unit b2: bound62 / b2.
    double gamma62 = 0.0;
    /// Sufficient lower bound on b1 at the given b2.
    double bound62 = 0.0;
};

/// Throws Error{HypothesisViolated} when alpha_n beta_n <= 0, Error{BoundUndefined}
/// when some mu <= 0, Error{InternalInconsistency} if a weight's square-root argument
/// is not positive.
[[nodiscard]] GainBound gain_bound(const DiagonalizationResult& diag, double b2);

struct ModalEigen {
    Complex value;
    double magnitude = 0.0;  // Theta
    double angle = 0.0;      // theta in (-pi, pi]
};

struct Spectrum {
    std::vector<ModalEigen> modes;  // ascending real part
    bool positive_stable = false;
    bool has_zero_mode = false;
    double zero_band = 0.0;

    [[nodiscard]] std::vector<Complex> values() const;
    [[nodiscard]] double min_real() const;
};

inline constexpr double kSpectrumTolerance = 1e-9;

/// All eigenvalues of J1; |Re| <= tol * max(1, ||J1||_2) is a zero mode.
[[nodiscard]] Spectrum eigen_classify(const SmallSignalModel& model,
                                      double tol = kSpectrumTolerance);

struct DelayMargin {
    double tau_max = 0.0;
    bool unstable = false;  // some nonzero eigenvalue with Re <= 0
    bool marginal = false;  // zero modes excluded from the minimum
};

/// tau_max = min (pi - 2|theta_i|) / (2 Theta_i) over nonzero eigenvalues when all
/// real parts are positive, 0 otherwise. |chi| <= zero_band marks a zero mode.
/// Throws Error{InvalidInput} for an empty spectrum.
[[nodiscard]] DelayMargin delay_margin(std::span<const Complex> spectrum, double zero_band = 0.0);

/// Zeros of z + b e^{i angle} e^{-z} all lie in the open left half-plane iff
/// pi/2 - b > |angle|.
[[nodiscard]] bool lemma6_check(double b, double angle);

/// Rightmost root s of s + chi e^{-s tau} = 0 (tau > 0), located by Newton
/// refinement from every Lambert-W branch seed in [-branches, branches].
[[nodiscard]] Complex dominant_delay_root(Complex chi, double tau, int branches = 4);

enum class Verdict { CertifiedStable, OracleStableUncertified, Unstable, Marginal };

[[nodiscard]] std::string_view to_string(Verdict verdict) noexcept;

struct AnalysisOptions {
    double eigen_tol = kSpectrumTolerance;
};

struct StabilityReport {
    double load_power = 0.0;
    double p_sup = 0.0;
    bool cond28 = false;
    double delta1 = 0.0;  // p_sup - P
    std::optional<GainBound> gain;
    std::optional<double> delta2;  // b1 - bound62
    std::optional<double> alpha_beta_n;
    Spectrum spectrum;
    DelayMargin margin;
    double tau = 0.0;
    bool certificate = false;
    bool oracle_stable = false;
    Verdict verdict = Verdict::Unstable;
    std::vector<std::string> notes;  // sub-operation failures
};

/// max_load -> linearize -> diagonalize_j2 -> gain_bound -> eigen_classify ->
/// delay_margin. Certificate failures leave the corresponding fields empty and are
/// recorded in notes; errors in linearize or the eigensolver propagate.
[[nodiscard]] StabilityReport full_report(const MicrogridConfig& config,
                                          const AnalysisOptions& options = {});

}  // namespace dcgrid
