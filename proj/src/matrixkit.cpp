#include "dcgrid/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dcgrid/error.hpp"

namespace dcgrid {

double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::InvalidInput, "eigenvalues need a square matrix");
    }
    if (!a.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "matrix has nonfinite entries");
    }
    const Eigen::Index n = a.rows();
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 0) {
        return out;
    }

    Eigen::RealSchur<Eigen::MatrixXd> schur(a, /*computeU=*/false);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure, "real Schur decomposition did not converge");
    }
    const Eigen::MatrixXd& t = schur.matrixT();
    for (Eigen::Index i = 0; i < n;) {
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            // 2x2 diagonal block
            const double p = 0.5 * (t(i, i) + t(i + 1, i + 1));
            const double h = 0.5 * (t(i, i) - t(i + 1, i + 1));
            const double disc = h * h + t(i, i + 1) * t(i + 1, i);
            if (disc < 0.0) {
                const double w = std::sqrt(-disc);
                out.emplace_back(p, w);
                out.emplace_back(p, -w);
            } else {
                const double w = std::sqrt(disc);
                out.emplace_back(p + w, 0.0);
                out.emplace_back(p - w, 0.0);
            }
            i += 2;
        } else {
            out.emplace_back(t(i, i), 0.0);
            i += 1;
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) {
            return x.real() < y.real();
        }
        return x.imag() < y.imag();
    });
    return out;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
    }
    Eigen::VectorXd values = solver.eigenvalues();
    std::stable_sort(values.begin(), values.end());
    return values;
}

Inertia inertia_of(std::span<const Complex> spectrum, double zero_band) {
    Inertia in;
    for (const Complex& z : spectrum) {
        if (std::abs(z.real()) <= zero_band) {
            ++in.n_zero;
        } else if (z.real() > 0.0) {
            ++in.n_plus;
        } else {
            ++in.n_minus;
        }
    }
    return in;
}

Inertia inertia_of(const Eigen::MatrixXd& a, double tol) {
    const std::vector<Complex> spectrum = eigenvalues(a);
    return inertia_of(spectrum, tol * std::max(1.0, spectral_norm(a)));
}

void RankOneDiag::validate() const {
    const Eigen::Index n = a.size();
    if (n < 1 || b.size() != n || c.size() != n - 1) {
        throw Error(ErrorKind::InvalidInput, "RankOneDiag needs |a| = |b| = n and |c| = n - 1");
    }
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (c(i) == 0.0) {
            std::ostringstream msg;
            msg << "c(" << i << ") must be nonzero";
            throw Error(ErrorKind::InvalidInput, msg.str());
        }
    }
}

double det_lemma5_m1(const RankOneDiag& m) {
    m.validate();
    const Eigen::Index last = m.order() - 1;
    return m.a(last) * m.b(last) * m.c.prod();
}

double det_lemma5_m2(const RankOneDiag& m) {
    m.validate();
    const Eigen::Index last = m.order() - 1;
    const double an = m.a(last);
    const double bn = m.b(last);
    double correction = 0.0;
    for (Eigen::Index i = 0; i < last; ++i) {
        const double cross = an * m.b(i) - m.a(i) * bn;
        correction += cross * cross / m.c(i);
    }
    return m.c.prod() * (2.0 * an * bn - correction);
}

namespace {

void check_secular(const SecularData& d) {
    if (d.alpha.size() != d.beta.size() || d.alpha.empty() || d.mu.size() + 1 != d.alpha.size()) {
        throw Error(ErrorKind::InvalidInput, "secular data needs |alpha| = |beta| = |mu| + 1");
    }
}

bool near(Complex lambda, Complex pole) {
    return std::abs(lambda - pole) <= 1e-12 * std::max(1.0, std::abs(pole));
}

}  // namespace

Complex secular_eval(Complex lambda, const SecularData& d) {
    check_secular(d);
    const std::size_t m = d.mu.size();
    if (near(lambda, 0.0)) {
        throw Error(ErrorKind::Pole, "lambda coincides with the zero pole");
    }
    Complex sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Complex pole = d.b1 * d.mu[i];
        if (near(lambda, pole)) {
            std::ostringstream msg;
            msg << "lambda coincides with b1*mu[" << i << "] = " << pole.real();
            throw Error(ErrorKind::Pole, msg.str());
        }
        sum += d.alpha[i] * d.beta[i] / (lambda - pole);
    }
    sum += d.alpha[m] * d.beta[m] / lambda;
    return 1.0 - d.b2 * sum;
}

Complex characteristic_eval(Complex lambda, const SecularData& d) {
    check_secular(d);
    const std::size_t m = d.mu.size();
    Complex all = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        all *= lambda - d.b1 * d.mu[j];
    }
    Complex result = lambda * all - d.b2 * d.alpha[m] * d.beta[m] * all;
    for (std::size_t i = 0; i < m; ++i) {
        Complex others = lambda;
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) {
                others *= lambda - d.b1 * d.mu[j];
            }
        }
        result -= d.b2 * d.alpha[i] * d.beta[i] * others;
    }
    return result;
}

}  // namespace dcgrid
