#include "hdtele/modes.hpp"

#include "fft.hpp"
#include "hdtele/csv.hpp"
#include "hdtele/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hdtele {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// momentum-space waist of a mode with position waist w
double momentum_waist(double w) { return 2.0 / w; }

double gauss_envelope(double r, double w) {
    const double W = momentum_waist(w);
    return std::sqrt(2.0 / pi) / W * std::exp(-r * r / (W * W));
}

double hermite_norm(int n) {
    // sqrt(2^n n!)
    return std::sqrt(std::ldexp(std::tgamma(n + 1.0), n));
}

bool is_half_integer_multiple(double M) {
    const double twice = 2.0 * M;
    return std::abs(twice - std::round(twice)) < 1e-12;
}

// Azimuthal factor of a separable mode, piecewise c * exp(i k phi) on [0, 2 pi).
struct AzPiece {
    double start;
    double end;
    double k;
    cplx factor;
};

struct Separable {
    RadialProfile radial;
    std::vector<AzPiece> az;
};

std::optional<Separable> separable_form(const ModeSpec& spec) {
    return std::visit(
        overloaded{
            [](const LG& m) -> std::optional<Separable> {
                return Separable{{true, m.p, std::abs(m.ell), m.waist},
                                 {{0.0, two_pi, double(m.ell), 1.0}}};
            },
            [](const Gauss& m) -> std::optional<Separable> {
                return Separable{{false, 0, 0, m.waist}, {{0.0, two_pi, 0.0, 1.0}}};
            },
            [](const PhaseVortex& m) -> std::optional<Separable> {
                return Separable{{false, 0, 0, m.waist}, {{0.0, two_pi, double(m.ell), 1.0}}};
            },
            [](const FracOAM& m) -> std::optional<Separable> {
                const double a = wrap_angle(m.offset);
                Separable s{{false, 0, 0, m.waist}, {}};
                if (a > 0.0)
                    s.az.push_back({0.0, a, m.M, std::exp(cplx(0.0, m.M * (two_pi - a)))});
                s.az.push_back({a, two_pi, m.M, std::exp(cplx(0.0, -m.M * a))});
                return s;
            },
            [](const auto&) -> std::optional<Separable> { return std::nullopt; },
        },
        spec.value);
}

cplx azimuthal_overlap(const std::vector<AzPiece>& a, const std::vector<AzPiece>& b) {
    std::vector<double> cuts{0.0, two_pi};
    for (const auto& p : a) cuts.push_back(p.start);
    for (const auto& p : b) cuts.push_back(p.start);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto piece_at = [](const std::vector<AzPiece>& v, double x) -> const AzPiece& {
        for (const auto& p : v)
            if (x >= p.start && x < p.end) return p;
        return v.back();
    };
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (hi <= lo) continue;
        const double mid = 0.5 * (lo + hi);
        const AzPiece& pa = piece_at(a, mid);
        const AzPiece& pb = piece_at(b, mid);
        const cplx c = std::conj(pa.factor) * pb.factor;
        const double dk = pb.k - pa.k;
        if (std::abs(dk) < 1e-14)
            total += c * (hi - lo);
        else
            total += c * (std::exp(cplx(0.0, dk * hi)) - std::exp(cplx(0.0, dk * lo))) / cplx(0.0, dk);
    }
    return total;
}

double radial_extent(const std::vector<RadialProfile>& profiles) {
    double inv = 0.0;
    int order = 0;
    for (const auto& p : profiles) {
        const double W = momentum_waist(p.waist);
        inv += 1.0 / (W * W);
        order = std::max(order, 2 * p.p + p.abs_ell);
    }
    return (10.0 + 0.5 * order) / std::sqrt(inv);
}

double radial_overlap(const RadialProfile& a, const RadialProfile& b) {
    const double rmax = radial_extent({a, b});
    const QuadratureRule rule = composite_gauss_legendre(0.0, rmax, 64, 16);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = rule.nodes[i];
        s += rule.weights[i] * r * a(r) * b(r);
    }
    return s;
}

bool contains_fractional(const ModeSpec& spec) {
    return std::visit(overloaded{
                          [](const FracOAM&) { return true; },
                          [](const Superposition& s) {
                              return std::any_of(s.terms.begin(), s.terms.end(),
                                                 [](const SuperTerm& t) { return contains_fractional(t.mode); });
                          },
                          [](const auto&) { return false; },
                      },
                      spec.value);
}

// Brute-force polar quadrature for pairs without a separable form.
cplx polar_overlap(const ModeSpec& a, const ModeSpec& b) {
    const auto wa = mode_waists(a);
    const auto wb = mode_waists(b);
    double wmin = std::numeric_limits<double>::max();
    for (double w : wa) wmin = std::min(wmin, w);
    for (double w : wb) wmin = std::min(wmin, w);
    const double rmax = 14.0 * momentum_waist(wmin) / std::sqrt(2.0);
    const QuadratureRule rule = composite_gauss_legendre(0.0, rmax, 64, 16);
    const int nphi = (contains_fractional(a) || contains_fractional(b)) ? 4096 : 512;
    cplx total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = rule.nodes[i];
        cplx ring = 0.0;
        for (int j = 0; j < nphi; ++j) {
            const double phi = two_pi * (j + 0.5) / nphi;
            ring += std::conj(mode_value_polar(a, r, phi)) * mode_value_polar(b, r, phi);
        }
        total += rule.weights[i] * r * ring * (two_pi / nphi);
    }
    return total;
}

// Catmull-Rom weights for fractional offset t in [0, 1).
void cubic_weights(double t, double w[4]) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace

MomentumGrid::MomentumGrid(int n, double q_max) : n_(n), q_max_(q_max) {
    if (n < 32 || !is_power_of_two(n))
        throw InvalidArgument("grid size must be a power of two >= 32, got " + std::to_string(n));
    if (!(q_max > 0.0) || !std::isfinite(q_max)) throw InvalidArgument("grid q_max must be positive");
}

MomentumGrid MomentumGrid::for_waists(const std::vector<double>& waists, int n) {
    if (waists.empty()) throw InvalidArgument("no waists given for grid");
    const double wmin = *std::min_element(waists.begin(), waists.end());
    if (!(wmin > 0.0)) throw InvalidArgument("waists must be positive");
    return MomentumGrid(n, 9.0 / wmin);
}

void MomentumGrid::require_waist(double waist) const {
    const double edge = std::exp(-waist * waist * q_max_ * q_max_ / 4.0);
    if (edge > 1e-8)
        throw GridError("momentum window too small for waist " + std::to_string(waist) +
                        " (edge amplitude " + std::to_string(edge) + ")");
}

double RadialProfile::operator()(double r) const {
    if (!laguerre) return gauss_envelope(r, waist);
    const double W = momentum_waist(waist);
    const double C = std::sqrt(2.0 * std::tgamma(p + 1.0) / (pi * std::tgamma(p + abs_ell + 1.0))) / W;
    const double x = 2.0 * r * r / (W * W);
    return C * std::pow(std::sqrt(2.0) * r / W, abs_ell) *
           std::assoc_laguerre(static_cast<unsigned>(p), static_cast<unsigned>(abs_ell), x) *
           std::exp(-r * r / (W * W));
}

ModeSpec make_superposition(std::vector<SuperTerm> terms) {
    if (terms.empty()) throw InvalidArgument("superposition needs at least one term");
    double norm2 = 0.0;
    for (const auto& t : terms) norm2 += std::norm(t.coeff);
    if (!(norm2 > 0.0)) throw InvalidArgument("superposition coefficients are all zero");
    const double s = 1.0 / std::sqrt(norm2);
    for (auto& t : terms) t.coeff *= s;
    return Superposition{std::move(terms)};
}

cplx mode_value_polar(const ModeSpec& spec, double r, double phi) {
    return std::visit(
        overloaded{
            [&](const LG& m) -> cplx {
                const RadialProfile R{true, m.p, std::abs(m.ell), m.waist};
                return R(r) * std::exp(cplx(0.0, m.ell * phi));
            },
            [&](const HG& m) -> cplx {
                const double W = momentum_waist(m.waist);
                const double x = std::sqrt(2.0) * r * std::cos(phi) / W;
                const double y = std::sqrt(2.0) * r * std::sin(phi) / W;
                return std::hermite(static_cast<unsigned>(m.n), x) * std::hermite(static_cast<unsigned>(m.m), y) *
                       std::exp(-r * r / (W * W)) * std::sqrt(2.0 / pi) / W / (hermite_norm(m.n) * hermite_norm(m.m));
            },
            [&](const Gauss& m) -> cplx { return gauss_envelope(r, m.waist); },
            [&](const PhaseVortex& m) -> cplx {
                return gauss_envelope(r, m.waist) * std::exp(cplx(0.0, m.ell * phi));
            },
            [&](const FracOAM& m) -> cplx {
                return gauss_envelope(r, m.waist) * std::exp(cplx(0.0, m.M * wrap_angle(phi - m.offset)));
            },
            [&](const Superposition& s) -> cplx {
                cplx v = 0.0;
                for (const auto& t : s.terms) v += t.coeff * mode_value_polar(t.mode, r, phi);
                return v;
            },
        },
        spec.value);
}

cplx mode_value(const ModeSpec& spec, double qx, double qy) {
    return mode_value_polar(spec, std::hypot(qx, qy), std::atan2(qy, qx));
}

std::vector<double> mode_waists(const ModeSpec& spec) {
    return std::visit(overloaded{
                          [](const Superposition& s) {
                              std::vector<double> out;
                              for (const auto& t : s.terms) {
                                  auto w = mode_waists(t.mode);
                                  out.insert(out.end(), w.begin(), w.end());
                              }
                              return out;
                          },
                          [](const auto& m) { return std::vector<double>{m.waist}; },
                      },
                      spec.value);
}

void validate(const ModeSpec& spec) {
    auto check_waist = [](double w) {
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("mode waist must be positive");
    };
    std::visit(overloaded{
                   [&](const LG& m) {
                       if (m.p < 0) throw InvalidArgument("LG radial index must be non-negative");
                       check_waist(m.waist);
                   },
                   [&](const HG& m) {
                       if (m.n < 0 || m.m < 0) throw InvalidArgument("HG indices must be non-negative");
                       check_waist(m.waist);
                   },
                   [&](const Gauss& m) { check_waist(m.waist); },
                   [&](const PhaseVortex& m) { check_waist(m.waist); },
                   [&](const FracOAM& m) {
                       if (!is_half_integer_multiple(m.M))
                           throw InvalidArgument("fractional charge must be a multiple of 1/2");
                       check_waist(m.waist);
                   },
                   [&](const Superposition& s) {
                       if (s.terms.empty()) throw InvalidArgument("superposition needs at least one term");
                       for (const auto& t : s.terms) validate(t.mode);
                   },
               },
               spec.value);
}

cplx mode_overlap(const ModeSpec& a, const ModeSpec& b) {
    if (const auto* s = std::get_if<Superposition>(&a.value)) {
        cplx v = 0.0;
        for (const auto& t : s->terms) v += std::conj(t.coeff) * mode_overlap(t.mode, b);
        return v;
    }
    if (const auto* s = std::get_if<Superposition>(&b.value)) {
        cplx v = 0.0;
        for (const auto& t : s->terms) v += t.coeff * mode_overlap(a, t.mode);
        return v;
    }
    const auto sa = separable_form(a);
    const auto sb = separable_form(b);
    if (sa && sb) return radial_overlap(sa->radial, sb->radial) * azimuthal_overlap(sa->az, sb->az);
    const auto* ha = std::get_if<HG>(&a.value);
    const auto* hb = std::get_if<HG>(&b.value);
    if (ha && hb && ha->waist == hb->waist) return (ha->n == hb->n && ha->m == hb->m) ? 1.0 : 0.0;
    return polar_overlap(a, b);
}

double analytic_norm(const ModeSpec& spec) {
    if (std::holds_alternative<Superposition>(spec.value))
        return std::sqrt(std::max(0.0, mode_overlap(spec, spec).real()));
    return 1.0;
}

double mode_size_factor(int ell) { return std::sqrt(std::abs(ell) + 1.0); }

cplx AngularSpectrum::value_polar(double r, double phi) const {
    if (source) return source_scale * mode_value_polar(*source, r, phi + source_rotation);
    const double qx = r * std::cos(phi);
    const double qy = r * std::sin(phi);
    const int n = grid.n();
    const double fx = (qx + grid.q_max()) / grid.dq() - 0.5;
    const double fy = (qy + grid.q_max()) / grid.dq() - 0.5;
    if (fx < -1.0 || fy < -1.0 || fx > n || fy > n) return 0.0;
    const int ix = static_cast<int>(std::floor(fx));
    const int iy = static_cast<int>(std::floor(fy));
    double wx[4];
    double wy[4];
    cubic_weights(fx - ix, wx);
    cubic_weights(fy - iy, wy);
    cplx v = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int x = ix - 1 + a;
        if (x < 0 || x >= n) continue;
        for (int b = 0; b < 4; ++b) {
            const int y = iy - 1 + b;
            if (y < 0 || y >= n) continue;
            v += wx[a] * wy[b] * samples(x, y);
        }
    }
    return v;
}

AngularSpectrum mode_spectrum(const ModeSpec& spec, const MomentumGrid& grid) {
    validate(spec);
    for (double w : mode_waists(spec)) grid.require_waist(w);
    const int n = grid.n();
    AngularSpectrum out{grid, Eigen::MatrixXcd(n, n), true, spec, 1.0, 0.0};
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) out.samples(ix, iy) = mode_value(spec, grid.coord(ix), grid.coord(iy));
    const double dq2 = grid.dq() * grid.dq();
    const double grid_norm2 = out.samples.squaredNorm() * dq2;
    const double exact = analytic_norm(spec);
    if (!(exact > 0.0)) throw InvalidArgument("mode has zero norm");
    const double exact2 = exact * exact;
    if (std::abs(grid_norm2 / exact2 - 1.0) > 0.01)
        throw GridError("grid too coarse: sampled norm deviates by " +
                        format_number(100.0 * std::abs(grid_norm2 / exact2 - 1.0)) + "%");
    out.samples /= std::sqrt(grid_norm2);
    out.source_scale = 1.0 / exact;
    return out;
}

cplx inner_product(const AngularSpectrum& a, const AngularSpectrum& b) {
    if (!(a.grid == b.grid)) throw GridError("inner product of spectra on different grids");
    const double dq2 = a.grid.dq() * a.grid.dq();
    return (a.samples.conjugate().cwiseProduct(b.samples)).sum() * dq2;
}

AngularSpectrum rotate(const AngularSpectrum& f, double chi) {
    AngularSpectrum out = f;
    const int n = f.grid.n();
    if (f.source) out.source_rotation = f.source_rotation + chi;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            const double qx = f.grid.coord(ix);
            const double qy = f.grid.coord(iy);
            out.samples(ix, iy) = f.value_polar(std::hypot(qx, qy), std::atan2(qy, qx) + chi);
        }
    if (f.normalized) {
        const double norm2 = out.samples.squaredNorm() * f.grid.dq() * f.grid.dq();
        if (norm2 > 0.0) out.samples /= std::sqrt(norm2);
    }
    return out;
}

ModeSpec fractional_probe_spec(int n_index, double theta, double waist) {
    if (n_index < 1 || n_index % 2 == 0)
        throw InvalidArgument("probe index must be a positive odd integer, got " + std::to_string(n_index));
    std::vector<SuperTerm> terms;
    const double M = 0.5 * n_index;
    for (int k = 0; k < n_index; ++k)
        terms.push_back({1.0, FracOAM{M, wrap_angle(two_pi * k / n_index + theta), waist}});
    return make_superposition(std::move(terms));
}

AngularSpectrum fractional_probe(int n_index, double theta, const MomentumGrid& grid, double waist) {
    return mode_spectrum(fractional_probe_spec(n_index, theta, waist), grid);
}

std::map<int, cplx> fractional_probe_oam(int n_index, double theta, int ell_min, int ell_max) {
    if (n_index < 1 || n_index % 2 == 0)
        throw InvalidArgument("probe index must be a positive odd integer, got " + std::to_string(n_index));
    std::map<int, cplx> out;
    for (int ell = ell_min; ell <= ell_max; ++ell) {
        if (ell % n_index != 0) {
            out[ell] = 0.0;
            continue;
        }
        const int j = ell / n_index;
        out[ell] = cplx(0.0, 2.0 / (pi * (1.0 - 2.0 * j))) * std::exp(cplx(0.0, -ell * theta));
    }
    return out;
}

std::map<int, double> oam_decompose(const AngularSpectrum& f, int ell_min, int ell_max, const OamOptions& opts) {
    if (ell_max < ell_min) throw InvalidArgument("empty OAM range");
    const int N = opts.phi_samples;
    if (N < 8) throw InvalidArgument("too few azimuthal samples");
    if (ell_max - ell_min >= N) throw InvalidArgument("OAM range wider than the azimuthal sampling");
    const QuadratureRule rule = composite_gauss_legendre(0.0, f.grid.q_max(), opts.radial_panels, 16);
    const std::size_t nr = rule.nodes.size();
    std::vector<std::vector<double>> ring_power(nr, std::vector<double>(ell_max - ell_min + 1, 0.0));
    parallel_for(nr, [&](std::size_t i) {
        detail::FftwBuffer buf(N);
        detail::FftwPlan plan(buf, N, 0, FFTW_FORWARD);
        const double r = rule.nodes[i];
        for (int j = 0; j < N; ++j) buf[j] = f.value_polar(r, two_pi * (j + 0.5) / N);
        plan.execute();
        for (int ell = ell_min; ell <= ell_max; ++ell) {
            const int k = ((ell % N) + N) % N;
            ring_power[i][ell - ell_min] = std::norm(buf[k] / double(N));
        }
    });
    std::map<int, double> out;
    for (int ell = ell_min; ell <= ell_max; ++ell) {
        double s = 0.0;
        for (std::size_t i = 0; i < nr; ++i) s += rule.weights[i] * rule.nodes[i] * ring_power[i][ell - ell_min];
        out[ell] = two_pi * s;
    }
    return out;
}

std::optional<std::vector<OamTerm>> oam_expansion(const ModeSpec& spec) {
    using Result = std::optional<std::vector<OamTerm>>;
    return std::visit(overloaded{
                          [](const LG& m) -> Result {
                              return std::vector<OamTerm>{{m.ell, 1.0, {true, m.p, std::abs(m.ell), m.waist}}};
                          },
                          [](const Gauss& m) -> Result {
                              return std::vector<OamTerm>{{0, 1.0, {false, 0, 0, m.waist}}};
                          },
                          [](const PhaseVortex& m) -> Result {
                              return std::vector<OamTerm>{{m.ell, 1.0, {false, 0, 0, m.waist}}};
                          },
                          [](const Superposition& s) -> Result {
                              std::vector<OamTerm> out;
                              for (const auto& t : s.terms) {
                                  auto sub = oam_expansion(t.mode);
                                  if (!sub) return std::nullopt;
                                  for (auto& term : *sub) {
                                      term.coeff *= t.coeff;
                                      out.push_back(term);
                                  }
                              }
                              return out;
                          },
                          [](const auto&) -> Result { return std::nullopt; },
                      },
                      spec.value);
}

}  // namespace hdtele
