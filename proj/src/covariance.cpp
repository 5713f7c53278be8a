#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "dynreserve/log.hpp"
#include "dynreserve/scenario_engine.hpp"

namespace dynreserve {

void CopulaParams::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("copula theta must lie in [0,1]");
    }
    if (!(omega >= 0.0)) {
        throw std::invalid_argument("copula omega must be non-negative");
    }
    if (!(jitter >= 0.0)) {
        throw std::invalid_argument("copula jitter must be non-negative");
    }
}

Matrix lag_correlation(std::size_t horizon, const CopulaParams& params) {
    params.validate();
    if (horizon == 0) {
        throw std::invalid_argument("correlation matrix needs a horizon of at least one");
    }
    const auto n = static_cast<Eigen::Index>(horizon);
    Matrix corr = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double lag = static_cast<double>(j - i);
            const double value = std::max(params.theta - (lag - 1.0) * params.omega, 0.0);
            corr(i, j) = value;
            corr(j, i) = value;
        }
    }
    return corr;
}

namespace {

double min_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Matrix floor_spectrum(const Matrix& a, double floor) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    const Eigen::VectorXd w = solver.eigenvalues().cwiseMax(floor);
    const Matrix& v = solver.eigenvectors();
    return v * w.asDiagonal() * v.transpose();
}

void make_unit_symmetric(Matrix& a) {
    const Matrix sym = (a + a.transpose()) * 0.5;
    a = sym;
    a.diagonal().setOnes();
}

Matrix repair_eigen_clip(const Matrix& corr, double jitter) {
    Matrix b = floor_spectrum(corr, jitter);
    const Eigen::VectorXd d = b.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) /= d(i) * d(j);
    }
    make_unit_symmetric(b);
    return b;
}

// Nearest matrix with spectrum >= floor whose diagonal and first off-diagonal
// match corr. Semismooth Newton on the dual, with CG for the Newton system.
class BandedNearest {
public:
    BandedNearest(const Matrix& corr, double floor)
        : n_(corr.rows()), floor_(floor), shifted_(corr - floor * Matrix::Identity(n_, n_)),
          b_(2 * n_ - 1) {
        for (Eigen::Index i = 0; i < n_; ++i) b_(i) = corr(i, i) - floor;
        for (Eigen::Index i = 0; i + 1 < n_; ++i) b_(n_ + i) = corr(i, i + 1);
    }

    Matrix solve() {
        constexpr int kMaxNewton = 200;
        constexpr double kTolerance = 1e-12;
        Eigen::VectorXd y = Eigen::VectorXd::Zero(b_.size());
        State s = evaluate(y);
        for (int it = 0; it < kMaxNewton; ++it) {
            const Eigen::VectorXd g = s.grad;
            const double gmax = g.cwiseAbs().maxCoeff();
            if (gmax < kTolerance) break;
            const Matrix omega = divided_differences(s.w);
            const double gnorm = g.norm();
            const double reg = std::min(1e-6, gnorm);
            const Eigen::VectorXd dir = conjugate_gradient(s, omega, reg, g, gnorm);
            const double slope = g.dot(dir);
            double t = 1.0;
            State next;
            while (true) {
                next = evaluate(y + t * dir);
                if (next.f <= s.f + 1e-4 * t * slope ||
                    next.grad.cwiseAbs().maxCoeff() < 0.9 * gmax || t < 1e-10) {
                    break;
                }
                t *= 0.5;
            }
            y += t * dir;
            s = std::move(next);
        }
        Matrix x = s.z;
        x.diagonal().array() += floor_;
        return x;
    }

private:
    struct State {
        Eigen::VectorXd w;
        Matrix v;
        Matrix z;
        Eigen::VectorXd grad;
        double f = 0.0;
    };

    Matrix adjoint(const Eigen::VectorXd& y) const {
        Matrix m = Matrix::Zero(n_, n_);
        for (Eigen::Index i = 0; i < n_; ++i) m(i, i) = y(i);
        for (Eigen::Index i = 0; i + 1 < n_; ++i) {
            m(i, i + 1) = 0.5 * y(n_ + i);
            m(i + 1, i) = 0.5 * y(n_ + i);
        }
        return m;
    }

    Eigen::VectorXd band(const Matrix& m) const {
        Eigen::VectorXd out(b_.size());
        for (Eigen::Index i = 0; i < n_; ++i) out(i) = m(i, i);
        for (Eigen::Index i = 0; i + 1 < n_; ++i) out(n_ + i) = m(i, i + 1);
        return out;
    }

    State evaluate(const Eigen::VectorXd& y) const {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(shifted_ + adjoint(y));
        State s;
        s.w = solver.eigenvalues();
        s.v = solver.eigenvectors();
        const Eigen::VectorXd wp = s.w.cwiseMax(0.0);
        s.z = s.v * wp.asDiagonal() * s.v.transpose();
        s.grad = band(s.z) - b_;
        s.f = 0.5 * wp.squaredNorm() - b_.dot(y);
        return s;
    }

    Matrix divided_differences(const Eigen::VectorXd& w) const {
        Matrix omega = Matrix::Zero(n_, n_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (w(i) > 0.0 && w(j) > 0.0) {
                    omega(i, j) = 1.0;
                } else if (w(i) > 0.0) {
                    omega(i, j) = w(i) / (w(i) - w(j));
                } else if (w(j) > 0.0) {
                    omega(i, j) = w(j) / (w(j) - w(i));
                }
            }
        }
        return omega;
    }

    Eigen::VectorXd conjugate_gradient(const State& s, const Matrix& omega, double reg,
                                       const Eigen::VectorXd& g, double gnorm) const {
        auto hess = [&](const Eigen::VectorXd& h) {
            const Matrix m = s.v.transpose() * adjoint(h) * s.v;
            const Matrix back = s.v * omega.cwiseProduct(m) * s.v.transpose();
            return Eigen::VectorXd(band(back) + reg * h);
        };
        const double stop = std::max(std::min(0.1, gnorm) * gnorm * 1e-2, 1e-16);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(g.size());
        Eigen::VectorXd r = -g;
        Eigen::VectorXd p = r;
        double rs = r.squaredNorm();
        for (Eigen::Index k = 0; k < 4 * n_; ++k) {
            const Eigen::VectorXd hp = hess(p);
            const double curvature = p.dot(hp);
            if (!(curvature > 0.0)) break;
            const double a = rs / curvature;
            x += a * p;
            r -= a * hp;
            const double rn = r.squaredNorm();
            if (std::sqrt(rn) < stop) break;
            p = r + (rn / rs) * p;
            rs = rn;
        }
        return x;
    }

    Eigen::Index n_;
    double floor_;
    Matrix shifted_;
    Eigen::VectorXd b_;
};

Matrix repair_preserve_lag1(const Matrix& corr, double floor) {
    const Eigen::Index n = corr.rows();
    Matrix y = BandedNearest(corr, floor).solve();
    y = (y + y.transpose()) * 0.5;
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i, i) = corr(i, i);
        if (i + 1 < n) {
            y(i, i + 1) = corr(i, i + 1);
            y(i + 1, i) = corr(i + 1, i);
        }
    }
    make_unit_symmetric(y);
    return y;
}

bool cholesky_succeeds(const Matrix& a) {
    try {
        (void)cholesky(a);
        return true;
    } catch (const std::domain_error&) {
        return false;
    }
}

}  // namespace

Matrix repair_correlation(const Matrix& corr, double jitter, CovarianceRepair method) {
    if (corr.rows() != corr.cols() || corr.rows() == 0) {
        throw std::invalid_argument("correlation matrix must be square and non-empty");
    }
    const double floor = std::max(jitter, 1e-14);
    if (min_eigenvalue(corr) >= floor && cholesky_succeeds(corr)) {
        return corr;
    }
    if (method == CovarianceRepair::preserve_lag1) {
        // The floor is raised when round-off after the last band restore leaves
        // the result only semi-definite.
        double f = floor;
        for (int attempt = 0; attempt < 6; ++attempt, f *= 100.0) {
            Matrix y = repair_preserve_lag1(corr, f);
            if (min_eigenvalue(y) > 0.0 && cholesky_succeeds(y)) return y;
        }
        log::warn("lag-1 preserving repair did not reach a positive definite matrix; "
                  "falling back to eigenvalue clipping");
    }
    Matrix b = repair_eigen_clip(corr, floor);
    if (!(min_eigenvalue(b) > 0.0) || !cholesky_succeeds(b)) {
        b = repair_eigen_clip(corr, 1e-8);
    }
    return b;
}

Matrix build_covariance(std::size_t horizon, const CopulaParams& params) {
    return repair_correlation(lag_correlation(horizon, params), params.jitter, params.repair);
}

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("cholesky needs a square matrix");
    }
    const Eigen::Index n = a.rows();
    Matrix c = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) diag -= c(j, k) * c(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw std::domain_error("matrix not positive definite");
        }
        const double pivot = std::sqrt(diag);
        c(j, j) = pivot;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double sum = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) sum -= c(i, k) * c(j, k);
            c(i, j) = sum / pivot;
        }
    }
    return c;
}

}  // namespace dynreserve
