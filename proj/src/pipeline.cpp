#include "hdtele/pipeline.hpp"

#include "hdtele/capacity.hpp"
#include "hdtele/error.hpp"
#include "hdtele/metrics.hpp"
#include "hdtele/mode_text.hpp"
#include "hdtele/noise.hpp"
#include "hdtele/probe.hpp"
#include "hdtele/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hdtele {

TeleportResult teleport_state(const OpticalConfig& cfg, const ModeSpec& input, const std::vector<ModeSpec>& basis,
                              const TeleportOptions& opts) {
    validate(cfg);
    validate(input);
    if (basis.empty()) throw InvalidArgument("empty basis");
    if (!(opts.noise_floor >= 0.0)) throw InvalidArgument("noise floor must be non-negative");
    const int d = static_cast<int>(basis.size());
    for (const auto& b : basis) validate(b);
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
            const cplx g = mode_overlap(basis[j], basis[k]);
            if (std::abs(g - cplx(j == k ? 1.0 : 0.0)) > 1e-6)
                throw InvalidArgument("basis modes are not orthonormal");
        }

    Eigen::VectorXcd a(d);
    for (int k = 0; k < d; ++k) a(k) = mode_overlap(basis[k], input);
    const double anorm = a.squaredNorm();
    if (!(anorm > 1e-12)) throw InvalidArgument("input has no weight on the basis");

    std::vector<double> waists{cfg.w_0, cfg.w_p, cfg.w_D};
    for (const auto& b : basis)
        for (double w : mode_waists(b)) waists.push_back(w);
    MomentumGrid grid = opts.grid ? *opts.grid : default_grid(cfg);
    for (double w : waists)
        if (!opts.grid && std::exp(-w * w * grid.q_max() * grid.q_max() / 4.0) > 1e-8)
            grid = MomentumGrid(grid.n(), 9.0 / *std::min_element(waists.begin(), waists.end()));

    std::vector<AngularSpectrum> spectra;
    for (const auto& b : basis) spectra.push_back(mode_spectrum(b, grid));
    const Eigen::MatrixXcd T = kernel_matrix(kernel_thin(cfg), spectra, spectra, opts.method);

    TeleportResult r;
    std::vector<double> diag(d);
    for (int k = 0; k < d; ++k) diag[k] = std::norm(T(k, k));
    if (opts.flatten) {
        const ProcrusteanWeights w = procrustean_weights(diag);
        r.weights = w.weights;
        r.throughput = w.throughput;
    } else {
        r.weights.assign(d, 1.0);
    }
    Eigen::VectorXcd filtered(d);
    for (int k = 0; k < d; ++k) filtered(k) = std::sqrt(r.weights[k]) * a(k);
    Eigen::VectorXcd out = T * filtered;
    const double onorm = out.norm();
    if (!(onorm > 0.0)) throw InvalidArgument("channel output vanishes");
    out /= onorm;

    const double f = opts.noise_floor;
    for (int j = 0; j < d; ++j) {
        r.output.push_back(out(j));
        r.prepared.push_back(std::norm(a(j)) / anorm);
        r.detected.push_back((std::norm(out(j)) + f) / (1.0 + d * f));
    }
    r.similarity = similarity(r.detected, r.prepared);
    r.fidelity = std::norm(a.dot(out)) / anorm;
    r.noisy_fidelity = (r.fidelity + f) / (1.0 + d * f);
    return r;
}

std::vector<CurvePoint> visibility_curve(double lambda_plus, double lambda_minus, int ell,
                                         const std::vector<double>& angles, double floor) {
    if (ell == 0) throw InvalidArgument("visibility curve needs ell != 0");
    if (!(floor >= 0.0)) throw InvalidArgument("floor must be non-negative");
    const double s = lambda_plus * lambda_plus + lambda_minus * lambda_minus;
    if (!(s > 0.0)) throw InvalidArgument("channel has no weight on +-ell");
    std::vector<CurvePoint> out;
    for (double chi : angles) {
        const cplx amp = lambda_plus * std::exp(cplx(0.0, ell * chi)) + lambda_minus * std::exp(cplx(0.0, -ell * chi));
        out.push_back({chi, std::norm(amp) / (2.0 * s) + floor});
    }
    return out;
}

std::vector<CurvePoint> visibility_curve(const OpticalConfig& cfg, int ell, const std::vector<double>& angles,
                                         double floor) {
    if (ell == 0) throw InvalidArgument("visibility curve needs ell != 0");
    const ClosedThin k = kernel_thin(cfg);
    const MomentumGrid grid = default_grid(cfg);
    const auto plus = mode_spectrum(PhaseVortex{ell, cfg.w_0}, grid);
    const auto minus = mode_spectrum(PhaseVortex{-ell, cfg.w_0}, grid);
    const double lp = std::abs(kernel_element(k, plus, plus));
    const double lm = std::abs(kernel_element(k, minus, minus));
    return visibility_curve(lp, lm, ell, angles, floor);
}

double curve_visibility(const std::vector<CurvePoint>& curve) {
    if (curve.empty()) throw InvalidArgument("empty curve");
    auto [lo, hi] = std::minmax_element(curve.begin(), curve.end(),
                                        [](const CurvePoint& x, const CurvePoint& y) { return x.probability < y.probability; });
    return visibility(hi->probability, lo->probability);
}

double floor_for_visibility(double pmax, double pmin, double v) {
    if (!(v > 0.0) || v > 1.0) throw InvalidArgument("target visibility must be in (0, 1]");
    const double b = ((pmax - pmin) / v - pmax - pmin) / 2.0;
    if (b < 0.0) throw InvalidArgument("curve is already below the target visibility");
    return b;
}

ModeSpec oam_test_state(int index, double waist) {
    const cplx I(0.0, 1.0);
    auto v = [&](int ell) { return ModeSpec(PhaseVortex{ell, waist}); };
    switch (index) {
        case 1: return make_superposition({{1.0, v(0)}, {1.0, v(-1)}});
        case 2: return make_superposition({{1.0, v(-1)}, {1.0, v(1)}});
        case 3: return make_superposition({{1.0, v(0)}, {-1.0, v(1)}});
        case 4: return make_superposition({{1.0, v(-2)}, {1.0, v(0)}, {1.0, v(2)}});
        case 5: return make_superposition({{1.0, v(-3)}, {-I, v(-1)}, {1.0, v(1)}, {I, v(3)}});
        default: throw InvalidArgument("OAM test states are numbered 1 to 5");
    }
}

ModeSpec hg_test_state(int index, double waist) {
    auto h = [&](int n, int m) { return SuperTerm{1.0, HG{n, m, waist}}; };
    switch (index) {
        case 1: return make_superposition({h(1, 0), h(1, 1), h(0, 1)});
        case 2: return make_superposition({h(0, 0), h(1, 0), h(1, 1), h(0, 1)});
        case 3:
            return make_superposition(
                {h(0, 0), h(2, 0), h(0, 2), h(2, 2), h(4, 0), h(0, 4), h(4, 2), h(2, 4), h(4, 4)});
        default: throw InvalidArgument("HG test states are numbered 1 to 3");
    }
}

std::vector<ModeSpec> support_basis(const ModeSpec& state) {
    if (const auto* s = std::get_if<Superposition>(&state.value)) {
        std::vector<ModeSpec> out;
        for (const auto& t : s->terms) out.push_back(t.mode);
        return out;
    }
    return {state};
}

OpticalConfig large_alpha_config(const OpticalConfig& base) { return with_alpha_beta(base, 12.0, 1.0); }

std::vector<std::string> figure_names() { return {"fig1b", "fig1cde", "fig2", "fig3a", "fig3c", "fig4", "fig5"}; }

namespace {

std::vector<double> steps(double start, double stop, double step) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v >= stop - 1e-12 * std::abs(step)) break;
        out.push_back(v);
    }
    return out;
}

Table fig1b(const OpticalConfig& cfg) {
    const auto alphas = steps(1.0, 15.5, 0.5);
    const std::vector<double> betas{0.5, 1.0, 1.1, 2.0, 4.1};
    const CapacityScan scan = capacity_scan(cfg, alphas, betas);
    const double n_ratio = cfg.n_B / cfg.n_A;
    Table t{{"alpha", "beta", "K", "alpha_0"}, {}};
    for (std::size_t b = 0; b < betas.size(); ++b)
        for (std::size_t a = 0; a < alphas.size(); ++a)
            t.add_row({alphas[a], betas[b], scan.K(b, a), alpha_threshold(betas[b], 0, n_ratio)});
    return t;
}

Table fig1cde(const OpticalConfig& cfg) {
    const double settings[3][2] = {{2.7, 4.1}, {2.7, 1.1}, {4.1, 1.1}};  // (alpha, beta)
    Table t{{"alpha", "beta", "K", "ell_prepared", "ell_detected", "P"}, {}};
    for (const auto& s : settings) {
        const OpticalConfig c = with_alpha_beta(cfg, s[0], s[1]);
        std::vector<ModeSpec> modes = basis_modes(Basis::vortex, c.w_0, 5);
        const CrosstalkMatrix m =
            crosstalk_matrix(kernel_thin(c), modes, modes, Normalization::raw, default_grid(c));
        std::vector<double> diag;
        for (int i = 0; i < m.P.rows(); ++i) diag.push_back(m.P(i, i));
        const double K = schmidt_from_spectrum(diag);
        for (int a = 0; a < m.P.cols(); ++a)
            for (int b = 0; b < m.P.rows(); ++b)
                t.add_row({s[0], s[1], K, static_cast<long long>(a - 5), static_cast<long long>(b - 5), m.P(b, a)});
    }
    return t;
}

Table fig2(const OpticalConfig& cfg) {
    // filtered channel over |ell| <= 5 with a little isotropic noise
    const OpticalConfig c = large_alpha_config(cfg);
    const auto raw = modal_diagonal(c, Basis::vortex, 5);
    const auto diag = apply_weights(raw, procrustean_weights(raw));
    std::map<int, double> P;
    for (int i = 0; i < static_cast<int>(diag.size()); ++i) P[i - 5] = diag[i];
    const DiagonalChannel chan = DiagonalChannel::from_intensities(P);
    const double K = schmidt_from_spectrum(diag);
    const auto orders = default_probe_orders();
    const auto V = probe_visibilities(chan, orders, 0.95, K);
    std::vector<std::pair<int, double>> pts;
    for (std::size_t i = 0; i < orders.size(); ++i) pts.emplace_back(orders[i], V[i]);
    const ProbeFit fit = fit_purity_dimension(pts);
    Table t{{"n", "V_n", "p_fit", "K_fit", "residual"}, {}};
    for (std::size_t i = 0; i < orders.size(); ++i)
        t.add_row({static_cast<long long>(orders[i]), V[i], fit.p_hat, fit.K_hat, fit.residual});
    return t;
}

Table fig3a(const OpticalConfig& cfg) {
    Table t{{"ell", "chi", "theta", "noiseless", "raw", "background", "subtracted"}, {}};
    for (int ell = 1; ell <= 3; ++ell) {
        std::vector<double> chis;
        for (int i = 0; i <= 64; ++i) chis.push_back(pi / ell * i / 64.0);
        const auto clean = visibility_curve(cfg, ell, chis);
        double hi = 0.0;
        double lo = 1.0;
        for (const auto& p : clean) {
            hi = std::max(hi, p.probability);
            lo = std::min(lo, p.probability);
        }
        const double b = floor_for_visibility(hi, lo, 0.85);
        for (const auto& p : clean) {
            const CoincidenceRecord rec{"", p.probability + b, b, 0.5, 0.5, 30.0};
            t.add_row({static_cast<long long>(ell), p.angle, 2.0 * ell * p.angle, p.probability, rec.signal, b,
                       background_subtract(rec).value});
        }
    }
    return t;
}

Table fig3c(const OpticalConfig& cfg, std::uint64_t seed) {
    TeleportOptions opts;
    opts.noise_floor = 0.02;
    const ModeSpec phi5 = oam_test_state(5, cfg.w_0);
    const TeleportResult r = teleport_state(cfg, phi5, support_basis(phi5), opts);
    Eigen::VectorXcd out(4);
    for (int j = 0; j < 4; ++j) out(j) = r.output[j];
    const double f = opts.noise_floor;
    const DensityMatrix rho((out * out.adjoint() + f * Eigen::MatrixXcd::Identity(4, 4)) / (1.0 + 4.0 * f));
    const DensityMatrix ideal = DensityMatrix::pure(StateVector::normalized(out));
    const auto projs = projector_set(4, ProjectorScheme::mub_complete);
    // rates per second; the sampled column integrates 10 s
    const auto expected = simulate_counts(rho, projs, 290.0, 0.0);
    const auto clean = simulate_counts(ideal, projs, 290.0, 0.0);
    const auto sampled = simulate_counts(rho, projs, 2900.0, 0.0, {10.0, true, seed});
    Table t{{"projector", "theta_1", "theta_2", "theta_3", "ideal", "expected", "sampled"}, {}};
    for (std::size_t i = 0; i < projs.size(); ++i) {
        const auto& v = projs[i].state.amplitudes();
        std::vector<Cell> row{projs[i].label};
        for (int j = 1; j < 4; ++j) row.emplace_back(wrap_angle(std::arg(v(j) / v(0))));
        if (std::abs(v(0)) < 1e-12) {
            for (int j = 1; j < 4; ++j) row[j] = 0.0;
        }
        row.emplace_back(clean[i].counts);
        row.emplace_back(expected[i].counts);
        row.emplace_back(sampled[i].counts / 10.0);
        t.add_row(std::move(row));
    }
    return t;
}

void add_states(Table& t, const OpticalConfig& cfg, const std::string& prefix, const std::vector<ModeSpec>& states) {
    for (std::size_t s = 0; s < states.size(); ++s) {
        const auto basis = support_basis(states[s]);
        TeleportOptions raw_opts;
        raw_opts.flatten = false;
        const TeleportResult raw = teleport_state(cfg, states[s], basis, raw_opts);
        const TeleportResult flat = teleport_state(cfg, states[s], basis);
        const std::string name = prefix + std::to_string(s + 1);
        for (std::size_t j = 0; j < basis.size(); ++j)
            t.add_row({name, format_mode(basis[j]), raw.prepared[j], raw.detected[j], flat.detected[j],
                       raw.similarity, flat.similarity, flat.fidelity});
    }
}

Table state_table() {
    return Table{{"state", "mode", "prepared", "detected_raw", "detected_flat", "similarity_raw", "similarity_flat",
                  "fidelity_flat"},
                 {}};
}

Table fig4(const OpticalConfig& cfg) {
    Table t = state_table();
    std::vector<ModeSpec> states;
    for (int i = 1; i <= 5; ++i) states.push_back(oam_test_state(i, cfg.w_0));
    add_states(t, cfg, "phi", states);
    return t;
}

Table fig5(const OpticalConfig& cfg) {
    Table t = state_table();
    const OpticalConfig c = large_alpha_config(cfg);
    std::vector<ModeSpec> states;
    for (int i = 1; i <= 3; ++i) states.push_back(hg_test_state(i, c.w_0));
    add_states(t, c, "gamma", states);
    return t;
}

}  // namespace

Table figure_table(const std::string& name, const OpticalConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    if (name == "fig1b") return fig1b(cfg);
    if (name == "fig1cde") return fig1cde(cfg);
    if (name == "fig2") return fig2(cfg);
    if (name == "fig3a") return fig3a(cfg);
    if (name == "fig3c") return fig3c(cfg, seed);
    if (name == "fig4") return fig4(cfg);
    if (name == "fig5") return fig5(cfg);
    throw InvalidArgument("unknown figure '" + name + "'");
}

}  // namespace hdtele
