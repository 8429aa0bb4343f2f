#include "hdtele/channel.hpp"

#include "fft.hpp"
#include "gsl_util.hpp"
#include "hdtele/error.hpp"
#include "hdtele/mode_text.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace hdtele {

namespace {

struct RoleConsts {
    double L;
    double w;
    double cx;  // lambda_X / (4 pi n_X)
    double cc;  // lambda_C / (4 pi n_C)
    double a;   // lambda_p / (4 pi n_p)
};

RoleConsts role_consts(const OpticalConfig& c, Role role) {
    const double k = 1.0 / (4.0 * pi);
    if (role == Role::SPDC) return {c.L_p, c.w_p, k * c.lambda_B / c.n_B, k * c.lambda_C / c.n_C, k * c.lambda_p / c.n_p};
    return {c.L_D, c.w_D, k * c.lambda_A / c.n_A, k * c.lambda_C / c.n_C, k * c.lambda_p / c.n_p};
}

// integral of sinc^2 over [0, x], x >= 0
double sinc_sq_integral(double x) {
    if (x == 0.0) return 0.0;
    const double s = std::sin(x);
    return gsl_sf_Si(2.0 * x) - s * s / x;
}

// integral of PM(z)^2 over [z0, inf)
double pm_tail(double z0, PhaseMatching approx, double gamma) {
    if (approx == PhaseMatching::gaussian)
        return std::sqrt(pi / (8.0 * gamma)) * std::erfc(std::sqrt(2.0 * gamma) * z0);
    return z0 >= 0.0 ? 0.5 * pi - sinc_sq_integral(z0) : 0.5 * pi + sinc_sq_integral(-z0);
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

void check_same_grid(const std::vector<AngularSpectrum>& a, const MomentumGrid& g) {
    for (const auto& s : a)
        if (!(s.grid == g)) throw GridError("kernel element needs spectra on one grid");
}

// ---- closed kernel via FFT convolution ----

Eigen::MatrixXcd thin_matrix_grid(const ClosedThin& k, const std::vector<AngularSpectrum>& projs,
                                  const std::vector<AngularSpectrum>& inputs) {
    const MomentumGrid& g = inputs.front().grid;
    check_same_grid(projs, g);
    check_same_grid(inputs, g);
    const double dq = g.dq();
    if (dq > kernel_sigma(k))
        throw GridError("grid too coarse for the channel kernel: dq = " + std::to_string(dq) +
                        " exceeds kernel width " + std::to_string(kernel_sigma(k)));
    const int n = g.n();
    const int m = 2 * n;
    detail::FftwBuffer kern(static_cast<std::size_t>(m) * m);
    detail::FftwBuffer work(static_cast<std::size_t>(m) * m);
    {
        detail::FftwPlan plan(kern, m, m, FFTW_FORWARD);
        for (int i = 0; i < m; ++i) {
            const int di = i < n ? i : i - m;
            for (int j = 0; j < m; ++j) {
                const int dj = j < n ? j : j - m;
                const double d2 = (double(di) * di + double(dj) * dj) * dq * dq;
                kern[static_cast<std::size_t>(i) * m + j] = k.amplitude * std::exp(-k.width_a * d2);
            }
        }
        plan.execute();
    }
    detail::FftwPlan fwd(work, m, m, FFTW_FORWARD);
    detail::FftwPlan bwd(work, m, m, FFTW_BACKWARD);
    Eigen::MatrixXcd out(projs.size(), inputs.size());
    const double scale = dq * dq * dq * dq / (double(m) * m);
    Eigen::MatrixXcd conv(n, n);
    for (std::size_t c = 0; c < inputs.size(); ++c) {
        std::fill(work.data(), work.data() + work.size(), cplx(0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) work[static_cast<std::size_t>(i) * m + j] = inputs[c].samples(i, j);
        fwd.execute();
        for (std::size_t t = 0; t < work.size(); ++t) work[t] *= kern[t];
        bwd.execute();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) conv(i, j) = work[static_cast<std::size_t>(i) * m + j];
        for (std::size_t r = 0; r < projs.size(); ++r)
            out(r, c) = projs[r].samples.conjugate().cwiseProduct(conv).sum() * scale;
    }
    return out;
}

// ---- closed kernel via radial Bessel quadrature ----

struct ExpandedMode {
    std::vector<OamTerm> terms;
};

std::optional<ExpandedMode> expand(const AngularSpectrum& s) {
    if (!s.source) return std::nullopt;
    auto terms = oam_expansion(*s.source);
    if (!terms) return std::nullopt;
    for (auto& t : *terms) t.coeff *= s.source_scale * std::exp(cplx(0.0, t.ell * s.source_rotation));
    return ExpandedMode{std::move(*terms)};
}

// exp(-x) I_n(x) for n = 0..lmax. Far above the turning point the upward
// recurrence is stable and much cheaper than the continued fraction GSL runs.
void scaled_bessel_i(int lmax, double x, double* out) {
    if (x > std::max(50.0, 2.0 * lmax * lmax)) {
        out[0] = gsl_sf_bessel_I0_scaled(x);
        if (lmax >= 1) out[1] = gsl_sf_bessel_I1_scaled(x);
        for (int n = 1; n < lmax; ++n) out[n + 1] = out[n - 1] - (2.0 * n / x) * out[n];
        return;
    }
    gsl_sf_bessel_In_scaled_array(0, lmax, x, out);
}

Eigen::MatrixXcd thin_matrix_polar(const ClosedThin& k, const std::vector<ExpandedMode>& projs,
                                   const std::vector<ExpandedMode>& inputs) {
    detail::gsl_quiet();
    const double a = k.width_a;
    double rmax = 0.0;
    double scale_min = std::numeric_limits<double>::max();
    std::set<int> ells;
    auto scan = [&](const std::vector<ExpandedMode>& modes) {
        for (const auto& m : modes)
            for (const auto& t : m.terms) {
                const double W = 2.0 / t.radial.waist;
                const int order = 2 * t.radial.p + t.radial.abs_ell;
                rmax = std::max(rmax, (7.0 + 0.5 * order) * W);
                scale_min = std::min(scale_min, W / std::sqrt(order + 1.0));
                ells.insert(t.ell);
            }
    };
    scan(projs);
    scan(inputs);
    const double ridge = a > 0.0 ? 1.0 / std::sqrt(a) : std::numeric_limits<double>::max();
    const double h = 0.5 * std::min(ridge, scale_min);
    const int panels = std::clamp(static_cast<int>(std::ceil(rmax / h)), 8, 1000);
    const QuadratureRule rule = composite_gauss_legendre(0.0, rmax, panels, 16);
    const std::size_t nr = rule.nodes.size();
    const double band = 8.0 * ridge;

    int lmax = 0;
    for (int l : ells) lmax = std::max(lmax, std::abs(l));
    const std::vector<int> ell_list(ells.begin(), ells.end());

    // per-ell weighted radial vectors: v(node) = w r R(r) c
    auto build = [&](const std::vector<ExpandedMode>& modes) {
        std::vector<std::vector<Eigen::VectorXcd>> v(ell_list.size(),
                                                     std::vector<Eigen::VectorXcd>(modes.size()));
        for (std::size_t li = 0; li < ell_list.size(); ++li)
            for (std::size_t mi = 0; mi < modes.size(); ++mi) v[li][mi] = Eigen::VectorXcd::Zero(nr);
        for (std::size_t mi = 0; mi < modes.size(); ++mi)
            for (const auto& t : modes[mi].terms) {
                const std::size_t li = std::lower_bound(ell_list.begin(), ell_list.end(), t.ell) - ell_list.begin();
                for (std::size_t i = 0; i < nr; ++i) {
                    const double r = rule.nodes[i];
                    v[li][mi](i) += rule.weights[i] * r * t.radial(r) * t.coeff;
                }
            }
        return v;
    };
    const auto pv = build(projs);
    const auto iv = build(inputs);

    // G[ell][input](i) = sum_j M_ell(i, j) iv(j)
    std::vector<std::vector<Eigen::VectorXcd>> G(ell_list.size(),
                                                 std::vector<Eigen::VectorXcd>(inputs.size()));
    for (auto& row : G)
        for (auto& v : row) v = Eigen::VectorXcd::Zero(nr);
    // (ell, input) combinations that carry any weight
    std::vector<std::pair<std::size_t, std::size_t>> active;
    for (std::size_t li = 0; li < ell_list.size(); ++li)
        for (std::size_t c = 0; c < inputs.size(); ++c)
            if (iv[li][c].squaredNorm() > 0.0) active.emplace_back(li, c);
    std::vector<std::vector<std::vector<cplx>>> rows(nr);
    parallel_for(nr, [&](std::size_t i) {
        std::vector<double> bess(lmax + 1);
        std::vector<std::vector<cplx>> acc(ell_list.size(), std::vector<cplx>(inputs.size(), 0.0));
        const double r1 = rule.nodes[i];
        for (std::size_t j = 0; j < nr; ++j) {
            const double r2 = rule.nodes[j];
            const double d = r1 - r2;
            if (std::abs(d) > band) continue;
            const double x = 2.0 * a * r1 * r2;
            scaled_bessel_i(lmax, x, bess.data());
            const double gauss = std::exp(-a * d * d);
            for (const auto& [li, c] : active) acc[li][c] += gauss * bess[std::abs(ell_list[li])] * iv[li][c](j);
        }
        rows[i] = std::move(acc);
    });
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t li = 0; li < ell_list.size(); ++li)
            for (std::size_t c = 0; c < inputs.size(); ++c) G[li][c](i) = rows[i][li][c];

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(projs.size(), inputs.size());
    const double pref = k.amplitude * 4.0 * pi * pi;
    for (std::size_t li = 0; li < ell_list.size(); ++li)
        for (std::size_t r = 0; r < projs.size(); ++r)
            for (std::size_t c = 0; c < inputs.size(); ++c)
                out(r, c) += pref * pv[li][r].dot(G[li][c]);  // dot() conjugates the projector side
    return out;
}

// ---- full quadrature over photon C ----

Eigen::MatrixXcd quadrature_matrix(const QuadratureKernel& k, const std::vector<AngularSpectrum>& projs,
                                   const std::vector<AngularSpectrum>& inputs) {
    const MomentumGrid& g = k.grid;
    check_same_grid(projs, g);
    check_same_grid(inputs, g);
    validate(k.config);
    const int n = g.n();
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const double dq = g.dq();
    const double dq2 = dq * dq;
    const PairAmplitude spdc(k.config, Role::SPDC, k.approx);
    const PairAmplitude sfg(k.config, Role::SFG, k.approx);

    // columns are modes, rows run over (ix, iy)
    Eigen::MatrixXcd theta(n2, inputs.size());
    Eigen::MatrixXcd phi_conj(n2, projs.size());
    for (std::size_t c = 0; c < inputs.size(); ++c)
        theta.col(c) = Eigen::Map<const Eigen::VectorXcd>(inputs[c].samples.data(), n2);
    for (std::size_t c = 0; c < projs.size(); ++c)
        phi_conj.col(c) = Eigen::Map<const Eigen::VectorXcd>(projs[c].samples.data(), n2).conjugate();

    auto contract = [&](double shift) {
        constexpr std::size_t chunks = 64;
        std::vector<Eigen::MatrixXcd> partial(chunks, Eigen::MatrixXcd::Zero(projs.size(), inputs.size()));
        parallel_for(chunks, [&](std::size_t chunk) {
            Eigen::VectorXcd f_sfg(n2);
            Eigen::VectorXcd f_spdc(n2);
            for (std::size_t node = chunk; node < n2; node += chunks) {
                const int cx = static_cast<int>(node % n);
                const int cy = static_cast<int>(node / n);
                const Vec2 qc{g.coord(cx) + shift, g.coord(cy) + shift};
                for (int iy = 0; iy < n; ++iy)
                    for (int ix = 0; ix < n; ++ix) {
                        const Vec2 q{g.coord(ix), g.coord(iy)};
                        const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
                        f_sfg(idx) = std::conj(sfg(q, qc));
                        f_spdc(idx) = spdc(q, qc);
                    }
                const Eigen::VectorXcd A = theta.transpose() * f_sfg;     // per input
                const Eigen::VectorXcd B = phi_conj.transpose() * f_spdc; // per projector
                partial[chunk] += B * A.transpose();
            }
        });
        Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(projs.size(), inputs.size());
        for (const auto& p : partial) total += p;
        return Eigen::MatrixXcd(total * (dq2 * dq2 * dq2 / (4.0 * pi * pi)));
    };
    const Eigen::MatrixXcd main = contract(0.0);
    const Eigen::MatrixXcd shifted = contract(0.5 * dq);
    const double scale = main.cwiseAbs().maxCoeff();
    const double diff = (main - shifted).cwiseAbs().maxCoeff();
    if (scale > 0.0 && diff > k.tolerance * scale)
        throw ConvergenceError("channel quadrature did not reach tolerance: relative change " + std::to_string(diff / scale),
                               0, diff / scale);
    return main;
}

}  // namespace

double delta_kz(Vec2 q1, Vec2 q2, const OpticalConfig& cfg, Role role) {
    const RoleConsts rc = role_consts(cfg, role);
    const double sx = q1.x + q2.x;
    const double sy = q1.y + q2.y;
    return -rc.a * (sx * sx + sy * sy) + rc.cx * (q1.x * q1.x + q1.y * q1.y) + rc.cc * (q2.x * q2.x + q2.y * q2.y);
}

double phase_matching(double x, PhaseMatching approx, double gamma_sinc) {
    return approx == PhaseMatching::sinc ? sinc(x) : std::exp(-gamma_sinc * x * x);
}

double pair_normalization(const OpticalConfig& cfg, Role role, PhaseMatching approx) {
    validate(cfg);
    detail::gsl_quiet();
    const RoleConsts rc = role_consts(cfg, role);
    if (rc.L == 0.0) return 1.0;
    const double c = rc.cx + rc.cc;
    const double e = rc.cx * rc.cc / c - rc.a;
    const double w2 = rc.w * rc.w;
    const double gamma = cfg.gamma_sinc;
    // integral over t = |qX + qC|^2 after substituting t = 2 s / w^2
    double radial;
    const double z_scale = rc.L * e / w2;
    if (std::abs(z_scale) < 1e-14) {
        radial = (2.0 / w2) * pm_tail(0.0, approx, gamma);
    } else {
        boost::math::quadrature::exp_sinh<double> integrator;
        const double s = integrator.integrate(
            [&](double u) { return std::exp(-u) * pm_tail(z_scale * u, approx, gamma); }, 0.0,
            std::numeric_limits<double>::infinity());
        radial = (2.0 / w2) * s;
    }
    const double inv = 2.0 * pi * pi / (c * rc.L) * radial;
    return 1.0 / std::sqrt(inv);
}

PairAmplitude::PairAmplitude(const OpticalConfig& cfg, Role role, PhaseMatching approx)
    : N_(pair_normalization(cfg, role, approx)), approx_(approx) {
    const RoleConsts rc = role_consts(cfg, role);
    w2_ = rc.w * rc.w;
    L_ = rc.L;
    a_ = rc.a;
    cx_ = rc.cx;
    cc_ = rc.cc;
    gamma_ = cfg.gamma_sinc;
}

cplx PairAmplitude::operator()(Vec2 qX, Vec2 qC) const {
    const double sx = qX.x + qC.x;
    const double sy = qX.y + qC.y;
    const double s2 = sx * sx + sy * sy;
    const double dk = -a_ * s2 + cx_ * (qX.x * qX.x + qX.y * qX.y) + cc_ * (qC.x * qC.x + qC.y * qC.y);
    return N_ * std::exp(-0.25 * w2_ * s2) * phase_matching(0.5 * L_ * dk, approx_, gamma_);
}

cplx pair_amplitude(Vec2 qX, Vec2 qC, const OpticalConfig& cfg, Role role, PhaseMatching approx) {
    return PairAmplitude(cfg, role, approx)(qX, qC);
}

double ClosedThin::operator()(Vec2 qB, Vec2 qA) const {
    const double dx = qB.x - qA.x;
    const double dy = qB.y - qA.y;
    return amplitude * std::exp(-width_a * (dx * dx + dy * dy));
}

ClosedThin kernel_thin(const OpticalConfig& cfg, PhaseMatching approx) {
    validate(cfg);
    const double wp2 = cfg.w_p * cfg.w_p;
    const double wd2 = cfg.w_D * cfg.w_D;
    const double n_spdc = pair_normalization(cfg, Role::SPDC, approx);
    const double n_sfg = pair_normalization(cfg, Role::SFG, approx);
    return {n_spdc * n_sfg / (pi * (wd2 + wp2)), wd2 * wp2 / (4.0 * (wd2 + wp2))};
}

double kernel_sigma(const ClosedThin& k) { return 1.0 / std::sqrt(2.0 * k.width_a); }

Eigen::MatrixXcd kernel_matrix(const ChannelKernel& kernel, const std::vector<AngularSpectrum>& projs,
                               const std::vector<AngularSpectrum>& inputs, ElementMethod method) {
    if (projs.empty() || inputs.empty()) throw InvalidArgument("kernel matrix needs non-empty mode lists");
    if (const auto* q = std::get_if<QuadratureKernel>(&kernel)) {
        if (method == ElementMethod::polar) throw InvalidArgument("polar evaluation needs the closed kernel");
        return quadrature_matrix(*q, projs, inputs);
    }
    const auto& thin = std::get<ClosedThin>(kernel);
    if (method != ElementMethod::grid) {
        std::vector<ExpandedMode> pe;
        std::vector<ExpandedMode> ie;
        bool ok = true;
        for (const auto& s : projs) {
            auto e = expand(s);
            if (!e) { ok = false; break; }
            pe.push_back(std::move(*e));
        }
        for (const auto& s : inputs) {
            if (!ok) break;
            auto e = expand(s);
            if (!e) { ok = false; break; }
            ie.push_back(std::move(*e));
        }
        if (ok) return thin_matrix_polar(thin, pe, ie);
        if (method == ElementMethod::polar)
            throw InvalidArgument("polar evaluation needs modes with a finite OAM expansion");
    }
    return thin_matrix_grid(thin, projs, inputs);
}

cplx kernel_element(const ChannelKernel& kernel, const AngularSpectrum& proj, const AngularSpectrum& input,
                    ElementMethod method) {
    return kernel_matrix(kernel, {proj}, {input}, method)(0, 0);
}

CrosstalkMatrix crosstalk_matrix(const ChannelKernel& kernel, const std::vector<ModeSpec>& prepared,
                                 const std::vector<ModeSpec>& detected, Normalization normalization,
                                 const MomentumGrid& grid, ElementMethod method) {
    if (prepared.empty() || detected.empty()) throw InvalidArgument("crosstalk needs non-empty mode lists");
    std::vector<AngularSpectrum> in;
    std::vector<AngularSpectrum> out;
    CrosstalkMatrix cm;
    for (const auto& m : prepared) {
        in.push_back(mode_spectrum(m, grid));
        cm.prepared.push_back(format_mode(m));
    }
    for (const auto& m : detected) {
        out.push_back(mode_spectrum(m, grid));
        cm.detected.push_back(format_mode(m));
    }
    cm.P = kernel_matrix(kernel, out, in, method).cwiseAbs2();
    cm.normalization = normalization;
    if (normalization == Normalization::per_column) {
        for (Eigen::Index c = 0; c < cm.P.cols(); ++c) {
            const double s = cm.P.col(c).sum();
            if (s > 0.0) cm.P.col(c) /= s;
        }
    }
    return cm;
}

ThinCrystalRatio thin_crystal_ratio(const OpticalConfig& cfg) {
    validate(cfg);
    ThinCrystalRatio r;
    r.spdc = cfg.lambda_p * cfg.L_p / (cfg.w_p * cfg.w_p);
    r.sfg = cfg.lambda_p * cfg.L_D / (cfg.w_D * cfg.w_D);
    r.flagged = r.spdc > 0.1 || r.sfg > 0.1;
    return r;
}

MomentumGrid default_grid(const OpticalConfig& cfg, int n) {
    validate(cfg);
    const double wmin = std::min({cfg.w_0, cfg.w_p, cfg.w_D});
    const double q_max = 9.0 / wmin;
    const double sigma = kernel_sigma(ClosedThin{1.0, cfg.w_D * cfg.w_D * cfg.w_p * cfg.w_p /
                                                          (4.0 * (cfg.w_D * cfg.w_D + cfg.w_p * cfg.w_p))});
    long size = std::max<long>(n, 32);
    size = next_power_of_two(size);
    while (2.0 * q_max / size > sigma) size *= 2;
    if (size > 4096) throw GridError("thin kernel needs a grid beyond 4096 points per axis");
    return MomentumGrid(static_cast<int>(size), q_max);
}

}  // namespace hdtele
