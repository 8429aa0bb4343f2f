#include "hdtele/error.hpp"
#include "hdtele/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace hdtele;

namespace {

StateVector vec(std::initializer_list<cplx> a) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (cplx c : a) v(i++) = c;
    return StateVector::normalized(v);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("pure fidelity") {
    const auto a = vec({1.0, 1.0});
    CHECK(fidelity_pure(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity_pure(StateVector::basis(3, 0), StateVector::basis(3, 2)) == 0.0);
    CHECK(fidelity_pure(a, StateVector::basis(2, 0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(fidelity_pure(a, StateVector::basis(3, 0)), InvalidArgument);
}

TEST_CASE("pure fidelity is symmetric and phase blind") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 6;
        const auto a = haar_state(d, rng);
        const auto b = haar_state(d, rng);
        const double f = fidelity_pure(a, b);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-15);
        CHECK(fidelity_pure(b, a) == doctest::Approx(f).epsilon(1e-13));
        const StateVector ap(a.amplitudes() * std::exp(cplx(0.0, 0.37 * trial)));
        CHECK(fidelity_pure(ap, b) == doctest::Approx(f).epsilon(1e-12));
    }
}

TEST_CASE("mixed fidelity") {
    const auto psi = vec({1.0, cplx(0.0, 2.0), -1.0});
    CHECK(fidelity_mixed(DensityMatrix::pure(psi), psi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity_mixed(DensityMatrix::maximally_mixed(3), psi) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(fidelity_mixed(DensityMatrix::isotropic(psi, 0.7), psi) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK_THROWS_AS(fidelity_mixed(DensityMatrix::maximally_mixed(2), psi), InvalidArgument);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
    bad(0, 1) = cplx(0.0, 0.1);
    CHECK_THROWS_AS(DensityMatrix{bad}, InvalidArgument);
}

TEST_CASE("classical bound") {
    CHECK(classical_bound(2) == 2.0 / 3.0);
    CHECK(classical_bound(3) == 0.5);
    CHECK(classical_bound(9) == doctest::Approx(0.2).epsilon(1e-15));
    for (int d = 2; d < 40; ++d) CHECK(classical_bound(d + 1) < classical_bound(d));
    CHECK_THROWS_AS(classical_bound(1), InvalidArgument);
}

TEST_CASE("Haar Monte Carlo reaches the classical bound") {
    for (int d : {2, 3, 4}) {
        const auto est = haar_mc_classical_fidelity(d, ClassicalStrategy::optimal_projective, 100000, 11);
        CHECK(est.samples == 100000);
        CHECK(est.std_error > 0.0);
        CHECK(std::abs(est.mean - 2.0 / (d + 1)) <= 0.005);
        CHECK(std::abs(est.mean - 2.0 / (d + 1)) <= 3.0 * est.std_error);
    }
}

TEST_CASE("Haar Monte Carlo fixed guess gives 1/d") {
    for (int d : {2, 3, 5}) {
        const auto est = haar_mc_classical_fidelity(d, ClassicalStrategy::fixed_guess, 20000, 3);
        CHECK(std::abs(est.mean - 1.0 / d) <= 3.0 * est.std_error);
    }
}

TEST_CASE("Haar Monte Carlo is reproducible") {
    const auto a = haar_mc_classical_fidelity(3, ClassicalStrategy::optimal_projective, 10000, 5);
    const auto b = haar_mc_classical_fidelity(3, ClassicalStrategy::optimal_projective, 10000, 5);
    const auto c = haar_mc_classical_fidelity(3, ClassicalStrategy::optimal_projective, 10000, 6);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean != c.mean);
    CHECK_THROWS_AS(haar_mc_classical_fidelity(3, ClassicalStrategy::optimal_projective, 100, 5), InvalidArgument);
}

TEST_CASE("similarity") {
    CHECK(similarity({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}) == 1.0);
    CHECK(similarity({1, 0}, {0, 1}) == 0.0);
    CHECK(similarity({0.6, 0.4}, {0.5, 0.5}) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(similarity({3, 7}, {3, 7}) == 1.0);
    CHECK_THROWS_AS(similarity({1, 2}, {1}), InvalidArgument);
    CHECK_THROWS_AS(similarity({0, 0}, {0, 0}), InvalidArgument);
    // mass held fixed, L1 distance growing
    double prev = 2.0;
    for (double e = 0.0; e <= 0.5; e += 0.05) {
        const double s = similarity({0.5 + e, 0.5 - e}, {0.5, 0.5});
        CHECK(s < prev);
        CHECK(s >= 0.0);
        prev = s;
    }
}

TEST_CASE("visibility") {
    CHECK(visibility(0.3, 0.0) == 1.0);
    CHECK(visibility(0.4, 0.4) == 0.0);
    CHECK(visibility(0.925, 0.075) == doctest::Approx(0.85).epsilon(1e-14));
    CHECK(visibility(0.075, 0.925) == doctest::Approx(0.85).epsilon(1e-14));
    CHECK_THROWS_AS(visibility(0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(visibility(-0.1, 0.2), InvalidArgument);
}

}  // TEST_SUITE
