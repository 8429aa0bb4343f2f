#include "oracles.hpp"

#include "hdtele/error.hpp"
#include "hdtele/mode_text.hpp"
#include "hdtele/modes.hpp"

#include <doctest.h>

using namespace hdtele;

namespace {
constexpr double w0 = 200e-6;

MomentumGrid grid(int n = 128) { return MomentumGrid::for_waists({w0}, n); }
}  // namespace

TEST_SUITE("modes") {

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(MomentumGrid(48, 1e4), InvalidArgument);
    CHECK_THROWS_AS(MomentumGrid(16, 1e4), InvalidArgument);
    CHECK_THROWS_AS(MomentumGrid(64, -1.0), InvalidArgument);
    const MomentumGrid g(64, 1e5);
    CHECK(g.dq() == doctest::Approx(2e5 / 64));
    CHECK(g.coord(0) == doctest::Approx(-1e5 + g.dq() / 2));
    // window too small for a 200 um Gaussian
    CHECK_THROWS_AS(MomentumGrid(64, 6.0 / w0).require_waist(w0), GridError);
    CHECK_NOTHROW(grid().require_waist(w0));
}

TEST_CASE("gaussian spectrum is the normalised exp(-w^2 q^2 / 4)") {
    const auto s = mode_spectrum(Gauss{w0}, grid());
    CHECK(s.normalized);
    CHECK(std::abs(inner_product(s, s) - 1.0) < 1e-9);
    const int n = s.grid.n();
    const double q = s.grid.coord(n / 2);
    const double ratio = std::abs(s.samples(n / 2, n / 2 + 5)) / std::abs(s.samples(n / 2, n / 2));
    const double q5 = s.grid.coord(n / 2 + 5);
    CHECK(ratio == doctest::Approx(std::exp(-w0 * w0 * (q5 * q5 - q * q) / 4.0)).epsilon(1e-12));
}

TEST_CASE("LG +1 and -1 are orthogonal on the grid") {
    const auto a = mode_spectrum(LG{1, 0, w0}, grid());
    const auto b = mode_spectrum(LG{-1, 0, w0}, grid());
    CHECK(std::abs(inner_product(a, b)) < 1e-10);
}

TEST_CASE("HG parity orthogonality and conjugate symmetry") {
    const auto a = mode_spectrum(HG{0, 1, w0}, grid());
    const auto b = mode_spectrum(HG{1, 0, w0}, grid());
    CHECK(std::abs(inner_product(a, b)) < 1e-10);
    const auto c = mode_spectrum(LG{2, 1, w0}, grid());
    const auto d = mode_spectrum(PhaseVortex{2, w0}, grid());
    CHECK(std::abs(inner_product(c, d) - std::conj(inner_product(d, c))) < 1e-14);
}

TEST_CASE("inner product rejects mismatched grids") {
    const auto a = mode_spectrum(Gauss{w0}, grid(64));
    const auto b = mode_spectrum(Gauss{w0}, grid(128));
    CHECK_THROWS_AS(inner_product(a, b), GridError);
}

TEST_CASE("LG_1 vs vortex_1 overlap matches the radial oracle") {
    const double ref = oracle::lg_vortex_overlap(0, 1, w0);
    const cplx analytic = mode_overlap(LG{1, 0, w0}, PhaseVortex{1, w0});
    CHECK(std::abs(analytic.imag()) < 1e-12);
    CHECK(analytic.real() > 0.0);
    CHECK(analytic.real() == doctest::Approx(ref).epsilon(1e-9));
    // the grid sum sees the vortex singularity at q = 0; it still agrees closely
    const cplx sampled = inner_product(mode_spectrum(LG{1, 0, w0}, grid(256)), mode_spectrum(PhaseVortex{1, w0}, grid(256)));
    CHECK(std::abs(sampled.imag()) < 1e-10);
    CHECK(sampled.real() == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("vortex_2 power captured by LG_{2,p}, p <= 8") {
    double ours = 0.0;
    double ref = 0.0;
    for (int p = 0; p <= 8; ++p) {
        const double o = oracle::lg_vortex_overlap(p, 2, w0);
        ref += o * o;
        ours += std::norm(mode_overlap(LG{2, p, w0}, PhaseVortex{2, w0}));
        CHECK(std::abs(mode_overlap(LG{2, p, w0}, PhaseVortex{2, w0})) == doctest::Approx(std::abs(o)).epsilon(1e-8));
    }
    CHECK(ours == doctest::Approx(ref).epsilon(1e-9));
    CHECK(ours < 1.0);
    CHECK(ours > 0.9);
}

TEST_CASE("LG and HG orthonormality") {
    std::vector<ModeSpec> lg;
    for (int ell = -5; ell <= 5; ++ell)
        for (int p = 0; p <= 3; ++p) lg.push_back(LG{ell, p, w0});
    double worst = 0.0;
    for (std::size_t i = 0; i < lg.size(); ++i)
        for (std::size_t j = 0; j < lg.size(); ++j)
            worst = std::max(worst, std::abs(mode_overlap(lg[i], lg[j]) - (i == j ? 1.0 : 0.0)));
    CHECK(worst <= 1e-8);

    std::vector<ModeSpec> hg;
    for (int n = 0; n <= 6; ++n)
        for (int m = 0; n + m <= 6; ++m) hg.push_back(HG{n, m, w0});
    const MomentumGrid g = grid(256);
    std::vector<AngularSpectrum> s;
    for (const auto& m : hg) s.push_back(mode_spectrum(m, g));
    worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            worst = std::max(worst, std::abs(inner_product(s[i], s[j]) - (i == j ? 1.0 : 0.0)));
    CHECK(worst <= 1e-8);
}

TEST_CASE("grid too coarse for the mode is reported") {
    // LG_{0,40} spreads far past a window sized for the fundamental
    CHECK_THROWS_AS(mode_spectrum(LG{0, 40, w0}, grid(64)), GridError);
    CHECK_THROWS_AS(mode_spectrum(LG{0, -1, w0}, grid()), InvalidArgument);
    CHECK_THROWS_AS(mode_spectrum(FracOAM{0.3, 0.0, w0}, grid()), InvalidArgument);
}

TEST_CASE("superposition coefficients are normalised") {
    const ModeSpec s = make_superposition({{3.0, LG{1, 0, w0}}, {cplx(0.0, 4.0), LG{-1, 0, w0}}});
    const auto& t = std::get<Superposition>(s.value).terms;
    CHECK(std::norm(t[0].coeff) + std::norm(t[1].coeff) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(t[0].coeff - 0.6) < 1e-15);
    CHECK_THROWS_AS(make_superposition({}), InvalidArgument);
}

TEST_CASE("oam_decompose of eigenmodes") {
    const auto lg3 = oam_decompose(mode_spectrum(LG{3, 0, w0}, grid()), -6, 6);
    CHECK(lg3.at(3) == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& [ell, p] : lg3)
        if (ell != 3) CHECK(p < 1e-9);
    const auto g = oam_decompose(mode_spectrum(Gauss{w0}, grid()), -6, 6);
    CHECK(g.at(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("half-charge step phase matches the Fourier oracle") {
    const auto spec = fractional_probe(1, 0.0, grid(), w0);
    const auto p = oam_decompose(spec, -40, 40);
    double total = 0.0;
    for (int ell = -40; ell <= 40; ++ell) {
        CHECK(std::abs(p.at(ell) - oracle::step_phase_power_dft(0.5, ell)) < 1e-6);
        CHECK(std::abs(p.at(ell) - oracle::step_phase_power_exact(0.5, ell)) < 1e-6);
        total += p.at(ell);
    }
    CHECK(total <= 1.0 + 1e-9);
    CHECK(total > 0.99);
}

TEST_CASE("fractional probe normalisation and closed-form OAM amplitudes") {
    for (int n : {1, 3, 5}) {
        const auto u = fractional_probe(n, 0.3, grid(), w0);
        CHECK(std::abs(inner_product(u, u) - 1.0) < 1e-9);
        const auto oam = fractional_probe_oam(n, 0.3, -3 * n, 3 * n);
        const auto dec = oam_decompose(u, -3 * n, 3 * n);
        for (const auto& [ell, a] : oam) CHECK(std::abs(std::norm(a) - dec.at(ell)) < 1e-5);
    }
    CHECK_THROWS_AS(fractional_probe(2, 0.0, grid(), w0), InvalidArgument);
    CHECK_THROWS_AS(fractional_probe(-1, 0.0, grid(), w0), InvalidArgument);
}

TEST_CASE("n = 1 probe is a single half-charge mask") {
    const auto a = fractional_probe(1, 0.0, grid(), w0);
    const auto b = mode_spectrum(FracOAM{0.5, 0.0, w0}, grid());
    CHECK(std::abs(inner_product(a, b)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rotation multiplies the ell coefficient by exp(i ell chi)") {
    for (int ell : {-3, 1, 4}) {
        const auto v = mode_spectrum(PhaseVortex{ell, w0}, grid());
        const double chi = 0.37;
        const auto r = rotate(v, chi);
        const cplx ratio = inner_product(v, r);
        CHECK(std::abs(ratio - std::exp(cplx(0.0, ell * chi))) < 1e-8);
    }
}

TEST_CASE("decomposition total power of normalised spectra") {
    const ModeSpec sup = make_superposition({{1.0, LG{2, 1, w0}}, {cplx(0.0, 1.0), PhaseVortex{-1, w0}}});
    for (const ModeSpec& m : {ModeSpec(LG{-2, 2, w0}), ModeSpec(HG{2, 1, w0}), sup}) {
        const auto p = oam_decompose(mode_spectrum(m, grid(256)), -20, 20);
        double total = 0.0;
        for (const auto& [ell, v] : p) total += v;
        CHECK(total >= 1.0 - 1e-6);
        CHECK(total <= 1.0 + 1e-9);
    }
}

TEST_CASE("mode size factor") {
    CHECK(mode_size_factor(0) == 1.0);
    CHECK(mode_size_factor(-3) == doctest::Approx(2.0));
}

TEST_CASE("mode text round trip") {
    for (const std::string t : {"lg:ell=1,p=0", "hg:n=2,m=0", "gauss", "vortex:ell=-2", "frac:M=1.5,offset=0.5"}) {
        const ModeSpec m = parse_mode(t, w0);
        CHECK(format_mode(m) == t);
        CHECK(format_mode(parse_mode(format_mode(m, true), 1.0), true) == format_mode(m, true));
    }
    const ModeSpec s = parse_mode("sup:(0.707,lg:ell=1)+(0.707i,lg:ell=-1)", w0);
    const auto& terms = std::get<Superposition>(s.value).terms;
    REQUIRE(terms.size() == 2);
    CHECK(std::abs(terms[1].coeff - cplx(0.0, std::sqrt(0.5))) < 1e-12);
    CHECK(std::get<LG>(parse_mode("lg:ell=1,w_um=50", w0).value).waist == doctest::Approx(50e-6));
    CHECK(parse_complex("1-0.5i") == cplx(1.0, -0.5));
    CHECK(parse_complex("-i") == cplx(0.0, -1.0));
    CHECK_THROWS_AS(parse_mode("lg:ell=x", w0), ParseError);
    CHECK_THROWS_AS(parse_mode("nope", w0), ParseError);
    CHECK_THROWS_AS(parse_mode("sup:(1,lg:ell=1", w0), ParseError);
}

}  // TEST_SUITE
