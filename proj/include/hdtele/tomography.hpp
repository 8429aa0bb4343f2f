#pragma once

#include "hdtele/csv.hpp"
#include "hdtele/states.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hdtele {

enum class ProjectorScheme {
    mub_complete,           // d + 1 mutually unbiased bases, d in {2, 3, 4}
    pairwise_overcomplete,  // computational basis plus (|j> + c|k>)/sqrt2, c in {1, -1, i, -i}
};

struct Projector {
    StateVector state;
    std::string label;
};

std::vector<Projector> projector_set(int d, ProjectorScheme scheme);

struct ProjectionRecord {
    StateVector projector;
    std::string label;
    double counts = 0.0;
    double duration = 1.0;  // seconds
};

struct CountOptions {
    double duration = 1.0;
    bool poisson = false;
    std::uint64_t seed = 0;
};

// Expected counts total_counts <m|rho|m> + accidental_rate * duration, or a
// Poisson draw around them when enabled.
std::vector<ProjectionRecord> simulate_counts(const DensityMatrix& rho, const std::vector<Projector>& projectors,
                                              double total_counts, double accidental_rate,
                                              const CountOptions& opts = {});

enum class ReconstructionMethod { linear_inversion, max_likelihood };

struct MleOptions {
    double tolerance = 1e-10;
    long max_iterations = 10000;
};

struct MleResult {
    DensityMatrix rho;
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Iterative R rho R likelihood maximisation, started from the linear-inversion
// estimate. residual is the relative optimality gap lambda_max(R) / tr(R rho) - 1,
// with R the likelihood gradient; an estimate that already meets the tolerance
// is returned after 0 iterations.
MleResult reconstruct_mle(const std::vector<ProjectionRecord>& records, int d, const MleOptions& opts = {});

// Throws InvalidArgument for a rank-deficient projector set and
// ConvergenceError when the likelihood iteration misses its tolerance.
DensityMatrix reconstruct(const std::vector<ProjectionRecord>& records, int d, ReconstructionMethod method);

// Restricts rho to the listed basis indices, renormalises the trace and
// returns the overlap with `target` (a state on that subspace).
double subspace_fidelity(const DensityMatrix& rho, const std::vector<int>& keep, const StateVector& target);

// d rows of re_0, im_0, re_1, im_1, ...
Table density_table(const DensityMatrix& rho);

}  // namespace hdtele
