#pragma once

#include "hdtele/numerics.hpp"

#include <Eigen/Dense>

#include <string>

namespace hdtele {

// Unit-norm pure state of dimension >= 2.
class StateVector {
public:
    // Normalises `amplitudes`; throws on a zero vector or dimension below 2.
    static StateVector normalized(Eigen::VectorXcd amplitudes);
    // Requires unit norm within 1e-12.
    explicit StateVector(Eigen::VectorXcd amplitudes);

    static StateVector basis(int dim, int index);

    int dim() const noexcept { return static_cast<int>(amp_.size()); }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }
    cplx operator[](int i) const { return amp_(i); }

private:
    struct Trusted {};
    StateVector(Eigen::VectorXcd amplitudes, Trusted) : amp_(std::move(amplitudes)) {}
    Eigen::VectorXcd amp_;
};

// Hermitian, unit trace, positive semidefinite (eigenvalues >= -1e-10).
class DensityMatrix {
public:
    explicit DensityMatrix(Eigen::MatrixXcd rho);

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(int dim);
    // p |psi><psi| + (1 - p) I / d
    static DensityMatrix isotropic(const StateVector& psi, double p);

    int dim() const noexcept { return static_cast<int>(rho_.rows()); }
    const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    double min_eigenvalue() const;

private:
    Eigen::MatrixXcd rho_;
};

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace hdtele
