#include "hdtele/capacity.hpp"
#include "hdtele/error.hpp"
#include "hdtele/metrics.hpp"
#include "hdtele/noise.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hdtele;

namespace {

CoincidenceRecord rec(double s, double b) {
    CoincidenceRecord r;
    r.label = "x";
    r.signal = s;
    r.background = b;
    return r;
}

// noiseless interference fringe cos^2(ell chi) on 65 points
std::vector<double> fringe(int ell) {
    std::vector<double> out;
    for (int k = 0; k <= 64; ++k) out.push_back(std::pow(std::cos(ell * pi * k / 64.0), 2));
    return out;
}

double curve_vis(const std::vector<double>& c) {
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    return visibility(*hi, *lo);
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("background subtraction") {
    const auto a = background_subtract(rec(120.0, 0.0));
    CHECK(a.value == 120.0);
    CHECK_FALSE(a.clamped);
    CHECK(background_subtract(rec(120.0, 20.0)).value == 100.0);
    const auto c = background_subtract(rec(5.0, 8.0));
    CHECK(c.value == 0.0);
    CHECK(c.clamped);
    // idempotent once the background is gone
    const auto once = background_subtract(rec(77.5, 12.25));
    CHECK(background_subtract(rec(once.value, 0.0)).value == once.value);
    CHECK_THROWS_AS(background_subtract(rec(-1.0, 0.0)), InvalidArgument);
    CHECK_THROWS_AS(background_subtract(rec(1.0, -1.0)), InvalidArgument);
    auto w = rec(10.0, 1.0);
    w.background_window_ns = 1.0;
    CHECK_THROWS_AS(background_subtract(w), InvalidArgument);
    w = rec(10.0, 1.0);
    w.offset_ns = 300.0;
    CHECK(background_subtract(w).value == 9.0);
}

TEST_CASE("uniform floor removal restores the fringe visibility") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    for (int ell : {1, 2, 3}) {
        const auto clean = fringe(ell);
        for (int trial = 0; trial < 5; ++trial) {
            const double scale = 1000.0 * u(rng);
            const double b = 100.0 * u(rng);
            std::vector<double> raw, sub, ref;
            for (double c : clean) {
                raw.push_back(scale * c + b);
                sub.push_back(background_subtract(rec(scale * c + b, b)).value);
                ref.push_back(scale * c);
            }
            CHECK(curve_vis(raw) < curve_vis(ref));
            CHECK(curve_vis(sub) == doctest::Approx(curve_vis(ref)).epsilon(1e-12));
        }
    }
}

TEST_CASE("raw 0.85 fringe corrects above 0.94") {
    const auto clean = fringe(1);
    // V = 1 / (1 + 2 f) for a unit fringe on a floor f
    const double f = (1.0 / 0.85 - 1.0) / 2.0;
    std::vector<double> raw, sub;
    for (double c : clean) {
        raw.push_back(c + f);
        sub.push_back(background_subtract(rec(c + f, f)).value);
    }
    CHECK(curve_vis(raw) == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(curve_vis(sub) >= 0.94);
}

TEST_CASE("procrustean weights") {
    const auto flat = procrustean_weights({0.3, 0.3, 0.3});
    for (double w : flat.weights) CHECK(w == 1.0);
    CHECK(flat.throughput == doctest::Approx(1.0).epsilon(1e-15));
    const auto two = procrustean_weights({4.0, 1.0});
    CHECK(two.weights == std::vector<double>{0.25, 1.0});
    CHECK(apply_weights({4.0, 1.0}, two) == std::vector<double>{1.0, 1.0});
    CHECK(two.throughput == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(procrustean_weights({}), InvalidArgument);
    CHECK_THROWS_AS(procrustean_weights({1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(procrustean_weights({1.0, -2.0}), InvalidArgument);
    CHECK_THROWS_AS(apply_weights({1.0}, two), InvalidArgument);
}

TEST_CASE("procrustean output is flat") {
    std::mt19937_64 rng(9);
    std::lognormal_distribution<double> ln(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> d(1 + trial % 17);
        for (double& v : d) v = ln(rng);
        const auto w = procrustean_weights(d);
        const auto out = apply_weights(d, w);
        const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
        CHECK(*hi / *lo <= 1.0 + 1e-12);
        for (double t : w.weights) {
            CHECK(t > 0.0);
            CHECK(t <= 1.0);
        }
        CHECK(w.throughput > 0.0);
        CHECK(w.throughput <= 1.0 + 1e-15);
    }
}

TEST_CASE("flattening the simulated diagonal gives K = mode count") {
    const auto diag = modal_diagonal(with_alpha_beta(OpticalConfig{}, 2.7, 1.1), Basis::vortex);
    REQUIRE(diag.size() == 11);
    CHECK(schmidt_from_spectrum(diag) < 10.0);
    const auto flat = apply_weights(diag, procrustean_weights(diag));
    CHECK(schmidt_from_spectrum(flat) == doctest::Approx(11.0).epsilon(1e-9));
}

TEST_CASE("conversion strength") {
    const auto base = representative_efficiency();
    const double s = conversion_sigma(base);
    CHECK(s > 0.0);
    auto p = base;
    p.flux_per_area *= 4.0;
    CHECK(conversion_sigma(p) == doctest::Approx(2.0 * s).epsilon(1e-14));
    p = base;
    p.chi2 *= 2.0;
    CHECK(conversion_sigma(p) == doctest::Approx(2.0 * s).epsilon(1e-14));
    p = base;
    p.n_B *= 4.0;
    CHECK(conversion_sigma(p) == doctest::Approx(0.5 * s).epsilon(1e-14));
    // single-pair regime over a 5 mm crystal
    CHECK(s < 1.0);
    CHECK(s * 5e-3 < 1e-2);
    // hand evaluation: chi2 sqrt(hbar w_p w_B w_C F / (8 eps0 c^3 n^3))
    const double hbar = 1.054571817e-34, eps0 = 8.8541878128e-12, c = 299792458.0;
    const double want = base.chi2 * std::sqrt(hbar * base.omega_p * base.omega_B * base.omega_C * base.flux_per_area /
                                              (8.0 * eps0 * c * c * c * base.n_p * base.n_B * base.n_C));
    CHECK(s == doctest::Approx(want).epsilon(1e-9));
    p = base;
    p.chi2 = 0.0;
    CHECK_THROWS_AS(conversion_sigma(p), InvalidArgument);
    p = base;
    p.omega_C = -1.0;
    CHECK_THROWS_AS(conversion_sigma(p), InvalidArgument);
}

}  // TEST_SUITE
