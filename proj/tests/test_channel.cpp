#include "oracles.hpp"

#include "hdtele/capacity.hpp"
#include "hdtele/channel.hpp"
#include "hdtele/error.hpp"

#include <doctest.h>

using namespace hdtele;

namespace {

OpticalConfig defaults() { return OpticalConfig{}; }

double a_coef(double lambda, double n) { return lambda / (4.0 * oracle::pi * n); }

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("delta_kz") {
    const OpticalConfig c = defaults();
    CHECK(delta_kz({0, 0}, {0, 0}, c, Role::SPDC) == 0.0);
    const Vec2 q{3e3, -2e3};
    const double q2 = 13e6;
    CHECK(delta_kz(q, {-q.x, -q.y}, c, Role::SPDC) ==
          doctest::Approx((a_coef(c.lambda_B, c.n_B) + a_coef(c.lambda_C, c.n_C)) * q2).epsilon(1e-14));
    // hand evaluation: (1565 - 532) nm * 1e8 / (4 pi 1.8)
    CHECK(delta_kz({1e4, 0}, {0, 0}, c, Role::SPDC) == doctest::Approx(4.566862672609108).epsilon(1e-13));
    OpticalConfig d = c;
    d.lambda_A = 1550e-9;
    d.lambda_C = 1.0 / (1.0 / 532e-9 - 1.0 / 1550e-9);
    CHECK(delta_kz({1e4, 0}, {0, 0}, d, Role::SFG) ==
          doctest::Approx((1550e-9 - 532e-9) * 1e8 / (4.0 * oracle::pi * 1.8)).epsilon(1e-13));
}

TEST_CASE("config validation") {
    OpticalConfig c = defaults();
    c.w_0 = 0.0;
    CHECK_THROWS_AS(validate(c), InvalidArgument);
    c = defaults();
    c.lambda_C = 900e-9;
    CHECK_THROWS_AS(validate(c), InvalidArgument);
    c = defaults();
    c.n_B = 0.9;
    CHECK_THROWS_AS(validate(c), InvalidArgument);
    CHECK_NOTHROW(validate(defaults()));
}

TEST_CASE("pair amplitude at the symmetric point and the sinc zero") {
    const OpticalConfig c = defaults();
    const double N = pair_normalization(c, Role::SPDC, PhaseMatching::sinc);
    const Vec2 q{5e3, 1e3};
    const Vec2 mq{-q.x, -q.y};
    const double x = 0.5 * c.L_p * delta_kz(q, mq, c, Role::SPDC);
    CHECK(std::abs(pair_amplitude(q, mq, c, Role::SPDC, PhaseMatching::sinc) - N * std::sin(x) / x) < 1e-12 * N);
    // 0.5 L dk = pi on the anti-diagonal
    const double cq = a_coef(c.lambda_B, c.n_B) + a_coef(c.lambda_C, c.n_C);
    const double r = std::sqrt(2.0 * oracle::pi / (c.L_p * cq));
    CHECK(std::abs(pair_amplitude({r, 0}, {-r, 0}, c, Role::SPDC, PhaseMatching::sinc)) < 1e-12 * N);
    CHECK(phase_matching(oracle::pi, PhaseMatching::sinc, c.gamma_sinc) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gaussian phase matching within 2% of sinc for x <= 0.3") {
    const double g = defaults().gamma_sinc;
    for (int i = 0; i <= 30; ++i) {
        const double x = 0.01 * i;
        const double s = phase_matching(x, PhaseMatching::sinc, g);
        const double e = phase_matching(x, PhaseMatching::gaussian, g);
        CHECK(std::abs(e - s) / s <= 0.02);
    }
}

TEST_CASE("pair normalisation matches a direct radial quadrature") {
    // After completing the square in q_X the inner integral is one-dimensional:
    // int d^2u PM^2(L/2 (B + C u^2)) = (2 pi / (L C)) int_{L B / 2}^inf PM^2.
    for (Role role : {Role::SPDC, Role::SFG}) {
        OpticalConfig c = defaults();
        c.L_D = 2e-3;
        const double L = role == Role::SPDC ? c.L_p : c.L_D;
        const double w = role == Role::SPDC ? c.w_p : c.w_D;
        const double cx = role == Role::SPDC ? a_coef(c.lambda_B, c.n_B) : a_coef(c.lambda_A, c.n_A);
        const double cc = a_coef(c.lambda_C, c.n_C);
        const double ap = a_coef(c.lambda_p, c.n_p);
        const double C = cx + cc;
        const double Bc = -ap + cx * cc / C;
        auto tail = [&](double x0) {
            // int_{x0}^inf sinc^2, with the 1 / (2 X) far tail
            const double X = 4000.0;
            auto s2 = [](double x) { return x == 0.0 ? 1.0 : std::pow(std::sin(x) / x, 2); };
            return oracle::simpson(s2, x0, X, 400000) + 1.0 / (2.0 * X);
        };
        const double smax = 12.0 / w;
        const double inv = oracle::simpson(
            [&](double S) {
                return 2.0 * oracle::pi * S * std::exp(-w * w * S * S / 2.0) * (2.0 * oracle::pi / (L * C)) *
                       tail(0.5 * L * Bc * S * S);
            },
            0.0, smax, 200);
        const double N = pair_normalization(c, role, PhaseMatching::sinc);
        CHECK(N * N * inv == doctest::Approx(1.0).epsilon(2e-4));
    }
    OpticalConfig z = defaults();
    z.L_p = 0.0;
    CHECK(pair_normalization(z, Role::SPDC, PhaseMatching::sinc) == 1.0);
}

TEST_CASE("thin kernel peak, 1/e point and plane-wave limit") {
    const OpticalConfig c = defaults();
    const ClosedThin k = kernel_thin(c);
    const double wd2 = c.w_D * c.w_D;
    const double wp2 = c.w_p * c.w_p;
    const double Ns = pair_normalization(c, Role::SPDC, PhaseMatching::sinc);
    const double Nd = pair_normalization(c, Role::SFG, PhaseMatching::sinc);
    CHECK(k.width_a == doctest::Approx(wd2 * wp2 / (4.0 * (wd2 + wp2))).epsilon(1e-15));
    CHECK(k({1e3, 2e3}, {1e3, 2e3}) == doctest::Approx(Ns * Nd / (oracle::pi * (wd2 + wp2))).epsilon(1e-13));
    const double d = 2.0 * std::sqrt(wd2 + wp2) / (c.w_D * c.w_p);
    CHECK(k({d, 0}, {0, 0}) == doctest::Approx(k.amplitude * std::exp(-1.0)).epsilon(1e-13));
    // depends only on |qB - qA|
    CHECK(k({1e3, 0}, {0, 0}) == k({-1e3, 0}, {0, 0}));
    CHECK(k({0, 7e2}, {0, 0}) == k({0, 0}, {0, 7e2}));
    OpticalConfig wide = c;
    wide.w_D = 1e3;
    CHECK(kernel_thin(wide).width_a == doctest::Approx(wp2 / 4.0).epsilon(1e-12));
}

TEST_CASE("near-delta kernel acts as identity on a Gaussian") {
    OpticalConfig c = defaults();
    c.w_p = c.w_D = 20e-3;
    c.w_0 = 200e-6;
    const ClosedThin k = kernel_thin(c);
    const MomentumGrid g = default_grid(c);
    const auto s = mode_spectrum(Gauss{c.w_0}, g);
    const cplx e = kernel_element(k, s, s);
    // a delta kernel of mass amplitude * pi / a gives exactly that value
    const double unit = k.amplitude * oracle::pi / k.width_a;
    CHECK(std::abs(std::norm(e) / (unit * unit) - 1.0) < 1e-3);
}

TEST_CASE("grid FFT path matches the brute-force 4D sum") {
    const OpticalConfig c = defaults();
    const ClosedThin k = kernel_thin(c);
    const MomentumGrid g(32, 9.0 / c.w_0);
    const ModeSpec pa = LG{1, 0, c.w_0};
    const ModeSpec pb = make_superposition({{1.0, LG{1, 0, c.w_0}}, {0.5, HG{1, 1, c.w_0}}});
    const auto sa = mode_spectrum(pa, g);
    const auto sb = mode_spectrum(pb, g);
    auto sample = [&](const AngularSpectrum& s) {
        return [&s](double x, double y) {
            const int i = static_cast<int>(std::lround((x + s.grid.q_max()) / s.grid.dq() - 0.5));
            const int j = static_cast<int>(std::lround((y + s.grid.q_max()) / s.grid.dq() - 0.5));
            return s.samples(i, j);
        };
    };
    const cplx ref = oracle::thin_element_direct(sample(sa), sample(sb), k.amplitude, k.width_a, g.q_max(), g.n());
    const cplx got = kernel_element(k, sa, sb, ElementMethod::grid);
    CHECK(std::abs(got - ref) <= 1e-12 * std::abs(ref));
}

TEST_CASE("grid path needs a resolved kernel") {
    OpticalConfig c = defaults();
    c.w_p = c.w_D = 6e-3;
    const MomentumGrid g(64, 9.0 / c.w_0);
    const auto s = mode_spectrum(Gauss{c.w_0}, g);
    CHECK_THROWS_AS(kernel_element(kernel_thin(c), s, s, ElementMethod::grid), GridError);
}

TEST_CASE("OAM selection rule, polar and grid paths") {
    const OpticalConfig c = defaults();
    const ClosedThin k = kernel_thin(c);
    const MomentumGrid g = default_grid(c);
    const auto l1 = mode_spectrum(LG{1, 0, c.w_0}, g);
    const auto l2 = mode_spectrum(LG{2, 0, c.w_0}, g);
    for (ElementMethod m : {ElementMethod::polar, ElementMethod::grid}) {
        const double diag = std::abs(kernel_element(k, l1, l1, m));
        CHECK(std::abs(kernel_element(k, l1, l2, m)) <= 1e-8 * diag);
    }
}

TEST_CASE("polar and grid paths agree on smooth modes") {
    const OpticalConfig c = defaults();
    const ClosedThin k = kernel_thin(c);
    const MomentumGrid g = default_grid(c, 256);
    for (const ModeSpec& m : {ModeSpec(LG{0, 0, c.w_0}), ModeSpec(LG{2, 1, c.w_0}), ModeSpec(LG{-3, 0, c.w_0})}) {
        const auto s = mode_spectrum(m, g);
        const cplx a = kernel_element(k, s, s, ElementMethod::polar);
        const cplx b = kernel_element(k, s, s, ElementMethod::grid);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
    }
}

TEST_CASE("modal map is Hermitian over an LG set") {
    const OpticalConfig c = defaults();
    const MomentumGrid g = default_grid(c);
    std::vector<AngularSpectrum> s;
    for (int ell = -2; ell <= 2; ++ell)
        for (int p = 0; p <= 1; ++p) s.push_back(mode_spectrum(LG{ell, p, c.w_0}, g));
    for (ElementMethod m : {ElementMethod::polar, ElementMethod::grid}) {
        const Eigen::MatrixXcd M = kernel_matrix(kernel_thin(c), s, s, m);
        CHECK((M - M.adjoint()).cwiseAbs().maxCoeff() <= 1e-8 * M.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("quadrature kernel converges to the thin kernel as L shrinks") {
    double prev = std::numeric_limits<double>::infinity();
    for (double L : {5e-3, 0.5e-3, 5e-6}) {
        OpticalConfig c = defaults();
        c.L_p = c.L_D = L;
        const MomentumGrid g(64, 9.0 / c.w_0);
        const auto s = mode_spectrum(Gauss{c.w_0}, g);
        const cplx thin = kernel_element(kernel_thin(c), s, s, ElementMethod::grid);
        const cplx quad = kernel_element(QuadratureKernel{c, g, 1e-2}, s, s);
        const double err = std::abs(quad - thin) / std::abs(thin);
        MESSAGE("L = " << L << " relative error " << err);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("quadrature kernel reports a missed tolerance") {
    const OpticalConfig c = defaults();
    const MomentumGrid g(32, 9.0 / c.w_0);
    const auto s = mode_spectrum(Gauss{c.w_0}, g);
    CHECK_THROWS_AS(kernel_element(QuadratureKernel{c, g, 1e-15}, s, s), ConvergenceError);
}

TEST_CASE("crosstalk at alpha 2.7, beta 1.1") {
    const OpticalConfig c = with_alpha_beta(defaults(), 2.7, 1.1);
    const auto modes = basis_modes(Basis::vortex, c.w_0, 5);
    const auto m = crosstalk_matrix(kernel_thin(c), modes, modes, Normalization::raw, default_grid(c));
    const double dmax = m.P.diagonal().maxCoeff();
    for (int i = 0; i < m.P.rows(); ++i)
        for (int j = 0; j < m.P.cols(); ++j) {
            CHECK(m.P(i, j) >= 0.0);
            if (i != j) CHECK(m.P(i, j) <= 1e-6 * dmax);
        }
    std::vector<double> d27;
    for (int i = 0; i < 11; ++i) d27.push_back(m.P(i, i));
    const OpticalConfig c41 = with_alpha_beta(defaults(), 4.1, 1.1);
    const auto m41 = crosstalk_matrix(kernel_thin(c41), basis_modes(Basis::vortex, c41.w_0, 5),
                                      basis_modes(Basis::vortex, c41.w_0, 5), Normalization::raw, default_grid(c41));
    std::vector<double> d41;
    for (int i = 0; i < 11; ++i) d41.push_back(m41.P(i, i));
    CHECK(oracle::schmidt(d41) > oracle::schmidt(d27));
}

TEST_CASE("column normalisation") {
    const OpticalConfig c = defaults();
    const std::vector<ModeSpec> prepared{LG{1, 0, c.w_0}};
    const std::vector<ModeSpec> detected{LG{1, 0, c.w_0}, LG{1, 1, c.w_0}, HG{1, 0, c.w_0}};
    const auto m = crosstalk_matrix(kernel_thin(c), prepared, detected, Normalization::per_column, default_grid(c));
    CHECK(m.P.col(0).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.prepared.at(0) == "lg:ell=1,p=0");
    CHECK_THROWS_AS(crosstalk_matrix(kernel_thin(c), {}, detected, Normalization::raw, default_grid(c)),
                    InvalidArgument);
}

TEST_CASE("thin crystal ratio") {
    const OpticalConfig c = defaults();
    const auto r = thin_crystal_ratio(c);
    CHECK(r.spdc == doctest::Approx(7.39e-3).epsilon(1e-3));
    CHECK_FALSE(r.flagged);
    OpticalConfig small = c;
    small.w_p *= 0.01;
    const auto s = thin_crystal_ratio(small);
    CHECK(s.spdc == doctest::Approx(r.spdc * 1e4).epsilon(1e-12));
    CHECK(s.flagged);
    OpticalConfig zero = c;
    zero.L_p = zero.L_D = 0.0;
    CHECK(thin_crystal_ratio(zero).spdc == 0.0);
    CHECK(thin_crystal_ratio(zero).sfg == 0.0);
}

TEST_CASE("default grid resolves the kernel and the modes") {
    for (double alpha : {1.0, 3.0, 12.0})
        for (double beta : {0.5, 1.0, 4.1}) {
            const OpticalConfig c = with_alpha_beta(defaults(), alpha, beta);
            const MomentumGrid g = default_grid(c);
            CHECK(g.dq() <= kernel_sigma(kernel_thin(c)));
            CHECK_NOTHROW(g.require_waist(c.w_0));
        }
}

}  // TEST_SUITE
