#include "hdtele/metrics.hpp"

#include "hdtele/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace hdtele {

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
    if (amplitudes.size() < 2) throw InvalidArgument("state dimension must be at least 2");
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalise a zero state");
    return StateVector(amplitudes / n, Trusted{});
}

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() < 2) throw InvalidArgument("state dimension must be at least 2");
    if (std::abs(amp_.norm() - 1.0) > 1e-12) throw InvalidArgument("state vector is not normalised");
}

StateVector StateVector::basis(int dim, int index) {
    if (index < 0 || index >= dim) throw InvalidArgument("basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(index) = 1.0;
    return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() < 2) throw InvalidArgument("density matrix must be square, d >= 2");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidArgument("density matrix is not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > 1e-12) throw InvalidArgument("density matrix trace is not 1");
    if (min_eigenvalue() < -1e-10) throw InvalidArgument("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    if (dim < 2) throw InvalidArgument("dimension must be at least 2");
    return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / double(dim));
}

DensityMatrix DensityMatrix::isotropic(const StateVector& psi, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("mixing weight must lie in [0, 1]");
    const int d = psi.dim();
    Eigen::MatrixXcd m = p * psi.amplitudes() * psi.amplitudes().adjoint() +
                         (1.0 - p) / d * Eigen::MatrixXcd::Identity(d, d);
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity_pure(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("dimension mismatch");
    return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

double fidelity_mixed(const DensityMatrix& rho, const StateVector& target) {
    if (rho.dim() != target.dim()) throw InvalidArgument("dimension mismatch");
    const double f = target.amplitudes().dot(rho.matrix() * target.amplitudes()).real();
    return std::clamp(f, 0.0, 1.0);
}

double classical_bound(int d) {
    if (d < 2) throw InvalidArgument("dimension must be at least 2");
    return 2.0 / (d + 1.0);
}

MonteCarloEstimate haar_mc_classical_fidelity(int d, ClassicalStrategy strategy, long samples, std::uint64_t seed) {
    if (d < 2) throw InvalidArgument("dimension must be at least 2");
    if (samples < 10000) throw InvalidArgument("at least 1e4 samples are required");
    constexpr long batch = 4096;
    const long batches = (samples + batch - 1) / batch;
    std::vector<double> sums(batches, 0.0);
    std::vector<double> sq(batches, 0.0);
    parallel_for(static_cast<std::size_t>(batches), [&](std::size_t b) {
        std::mt19937_64 rng(derive_seed(seed, b));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const long count = std::min(batch, samples - static_cast<long>(b) * batch);
        double s = 0.0;
        double s2 = 0.0;
        for (long i = 0; i < count; ++i) {
            const StateVector psi = haar_state(d, rng);
            double f;
            if (strategy == ClassicalStrategy::fixed_guess) {
                f = std::norm(psi[0]);
            } else {
                // Born-rule outcome of a computational-basis measurement
                const double u = uni(rng);
                double acc = 0.0;
                int outcome = d - 1;
                for (int k = 0; k < d; ++k) {
                    acc += std::norm(psi[k]);
                    if (u < acc) {
                        outcome = k;
                        break;
                    }
                }
                f = std::norm(psi[outcome]);
            }
            s += f;
            s2 += f * f;
        }
        sums[b] = s;
        sq[b] = s2;
    });
    double s = 0.0;
    double s2 = 0.0;
    for (long b = 0; b < batches; ++b) {
        s += sums[b];
        s2 += sq[b];
    }
    const double mean = s / samples;
    const double var = std::max(0.0, s2 / samples - mean * mean) * samples / (samples - 1.0);
    return {mean, std::sqrt(var / samples), samples};
}

double similarity(const std::vector<double>& c_exp, const std::vector<double>& c_th) {
    if (c_exp.size() != c_th.size()) throw InvalidArgument("similarity inputs differ in length");
    double diff = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < c_exp.size(); ++i) {
        if (c_exp[i] < 0.0 || c_th[i] < 0.0) throw InvalidArgument("similarity inputs must be non-negative");
        diff += std::abs(c_exp[i] - c_th[i]);
        total += c_exp[i] + c_th[i];
    }
    if (!(total > 0.0)) throw InvalidArgument("similarity inputs are all zero");
    return 1.0 - diff / total;
}

double visibility(double p_max, double p_min) {
    if (p_max < 0.0 || p_min < 0.0) throw InvalidArgument("probabilities must be non-negative");
    if (p_max + p_min == 0.0) throw InvalidArgument("visibility undefined for two zero probabilities");
    return std::abs(p_max - p_min) / (p_max + p_min);
}

}  // namespace hdtele
