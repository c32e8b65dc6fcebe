#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dcgrid {

using Complex = std::complex<double>;

/// Eigenvalue counts by sign of the real part.
struct Inertia {
    int n_plus = 0;
    int n_minus = 0;
    int n_zero = 0;

    [[nodiscard]] int order() const noexcept { return n_plus + n_minus + n_zero; }
    friend bool operator==(const Inertia&, const Inertia&) = default;
};

inline constexpr double kInertiaTolerance = 1e-9;

/// Largest singular value.
[[nodiscard]] double spectral_norm(const Eigen::MatrixXd& a);

/// Eigenvalues of a general real matrix read off the blocks of its real Schur form,
/// sorted by real part, then imaginary part.
[[nodiscard]] std::vector<Complex> eigenvalues(const Eigen::MatrixXd& a);

/// Ascending spectrum of a symmetric matrix.
[[nodiscard]] Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

/// |Re lambda| <= tol * max(1, ||A||_2) counts as zero.
[[nodiscard]] Inertia inertia_of(const Eigen::MatrixXd& a, double tol = kInertiaTolerance);

[[nodiscard]] Inertia inertia_of(std::span<const Complex> spectrum, double zero_band);

/// Lambda = diag(c_1..c_{n-1}, 0) together with the rank-one factors a, b.
struct RankOneDiag {
    Eigen::VectorXd c;  // n-1 nonzero entries
    Eigen::VectorXd a;  // n
    Eigen::VectorXd b;  // n

    [[nodiscard]] Eigen::Index order() const noexcept { return a.size(); }
    void validate() const;
};

/// det(Lambda + a b^T) = a_n b_n prod c_i.
[[nodiscard]] double det_lemma5_m1(const RankOneDiag& m);

/// det(Lambda + a b^T + b a^T) = prod c_i (2 a_n b_n - sum (a_n b_i - a_i b_n)^2 / c_i).
[[nodiscard]] double det_lemma5_m2(const RankOneDiag& m);

/// Spectral data of J6 = b1 diag(mu_2..mu_n, 0) + b2 alpha beta^T.
struct SecularData {
    std::span<const double> mu;     // n-1 entries
    std::span<const double> alpha;  // n
    std::span<const double> beta;   // n
    double b1 = 1.0;
    double b2 = 1.0;
};

/// 1 - b2 sum_i alpha_i beta_i / (lambda - b1 mu_{i+1}) - b2 alpha_n beta_n / lambda.
/// Throws Error{Pole} when lambda sits on 0 or on some b1 mu_i.
[[nodiscard]] Complex secular_eval(Complex lambda, const SecularData& data);

/// lambda * prod (lambda - b1 mu_i) * secular(lambda), expanded so it is pole free.
/// Its zeros are the eigenvalues of J6.
[[nodiscard]] Complex characteristic_eval(Complex lambda, const SecularData& data);

}  // namespace dcgrid
