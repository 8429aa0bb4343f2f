#pragma once

#include "hdtele/states.hpp"

#include <cstdint>
#include <vector>

namespace hdtele {

// |<a|b>|^2
double fidelity_pure(const StateVector& a, const StateVector& b);

// <psi|rho|psi>
double fidelity_mixed(const DensityMatrix& rho, const StateVector& target);

// 2 / (d + 1), the best average fidelity of a measure-and-prepare channel.
double classical_bound(int d);

enum class ClassicalStrategy {
    optimal_projective,  // measure in a fixed basis, prepare the outcome state
    fixed_guess,         // ignore the input, always prepare e_0
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

// Haar-averaged fidelity of a classical strategy. Samples are drawn in fixed
// batches whose seeds derive from `seed`, so the result does not depend on
// the number of threads.
MonteCarloEstimate haar_mc_classical_fidelity(int d, ClassicalStrategy strategy, long samples, std::uint64_t seed);

// Haar-random pure state from normalised complex Gaussians.
template <class Rng>
StateVector haar_state(int d, Rng& rng);

// 1 - sum |e - t| / (sum e + sum t)
double similarity(const std::vector<double>& c_exp, const std::vector<double>& c_th);

// |p_max - p_min| / (p_max + p_min)
double visibility(double p_max, double p_min);

}  // namespace hdtele

#include <random>

namespace hdtele {

template <class Rng>
StateVector haar_state(int d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cplx(re, im);
    }
    return StateVector::normalized(std::move(v));
}

}  // namespace hdtele
