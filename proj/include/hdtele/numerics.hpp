#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace hdtele {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule of the given order on [-1, 1].
QuadratureRule gauss_legendre(int order);

// Composite Gauss-Legendre rule on [a, b] with equal panels.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order = 16);

// Runs body(i) for i in [0, count) on a small thread pool. Each index is
// handed to exactly one worker; callers write results into slot i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Deterministic child seed for batch `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Angle reduced to [0, 2*pi).
double wrap_angle(double phi);

bool is_power_of_two(long n);
long next_power_of_two(long n);

}  // namespace hdtele
