#include "hdtele/cli.hpp"

#include "hdtele/capacity.hpp"
#include "hdtele/channel.hpp"
#include "hdtele/config.hpp"
#include "hdtele/csv.hpp"
#include "hdtele/error.hpp"
#include "hdtele/metrics.hpp"
#include "hdtele/mode_text.hpp"
#include "hdtele/noise.hpp"
#include "hdtele/pipeline.hpp"
#include "hdtele/probe.hpp"
#include "hdtele/tomography.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace hdtele {

namespace {

double to_double(const std::string& text) {
    const auto b = text.find_first_not_of(" \t");
    const std::string s = b == std::string::npos ? std::string() : text.substr(b, text.find_last_not_of(" \t") - b + 1);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) throw ParseError("bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) throw ParseError("empty number list");
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(to_double(parts[0]));
        } else if (parts.size() == 3) {
            const double start = to_double(parts[0]);
            const double stop = to_double(parts[1]);
            const double step = to_double(parts[2]);
            if (!(step > 0.0)) throw ParseError("range step must be positive in '" + item + "'");
            if (!(stop > start)) throw ParseError("empty range '" + item + "'");
            const long count = static_cast<long>(std::ceil((stop - start) / step - 1e-9));
            if (count > 100000) throw ParseError("range '" + item + "' is too long");
            for (long i = 0; i < count; ++i) out.push_back(start + i * step);
        } else {
            throw ParseError("bad list item '" + item + "' (expected x or start:stop:step)");
        }
    }
    return out;
}

namespace {

struct Common {
    std::string config;
    std::string out;
    bool json = false;
    std::uint64_t seed = 1;
};

struct Context {
    ConfigFile cfg;
    std::ostream& out;
    std::ostream& err;
    const Common& common;
};

ConfigFile load(const Common& c) {
    if (c.config.empty()) return {};
    return load_config(c.config);
}

MomentumGrid grid_for(const ConfigFile& c) {
    MomentumGrid g = default_grid(c.optics, c.grid_n.value_or(128));
    if (c.grid_qmax) g = MomentumGrid(c.grid_n.value_or(g.n()), *c.grid_qmax);
    return g;
}

// Table goes to --out when given, otherwise to stdout. Returns whether the
// table went to stdout.
bool emit(const Table& t, const Context& ctx) {
    auto write = [&](std::ostream& o) {
        if (ctx.common.json)
            write_json(o, t);
        else
            write_csv(o, t);
    };
    if (ctx.common.out.empty()) {
        write(ctx.out);
        return true;
    }
    std::ofstream f(ctx.common.out, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + ctx.common.out + "'");
    write(f);
    if (!f) throw ParseError("write to '" + ctx.common.out + "' failed");
    return false;
}

void summary(const Context& ctx, bool table_on_stdout, const std::string& line) {
    (table_on_stdout ? ctx.err : ctx.out) << line << '\n';
}

Normalization parse_normalization(const std::string& s) {
    if (s == "raw") return Normalization::raw;
    if (s == "column") return Normalization::per_column;
    throw ParseError("unknown normalization '" + s + "' (expected raw or column)");
}

std::vector<ModeSpec> parse_mode_list(const std::string& text, double waist) {
    std::vector<ModeSpec> out;
    for (const auto& s : split(text, ';'))
        if (!s.empty()) out.push_back(parse_mode(s, waist));
    if (out.empty()) throw ParseError("empty mode list");
    return out;
}

struct SelfCheck {
    std::string name;
    double value;
    bool pass;
};

std::vector<SelfCheck> selftest_suite(std::uint64_t seed) {
    std::vector<SelfCheck> out;
    const OpticalConfig cfg;

    out.push_back({"classical_bound_d3", classical_bound(3), classical_bound(3) == 0.5});

    double worst = 0.0;
    for (int d = 2; d <= 25; ++d) worst = std::max(worst, std::abs(schmidt_from_spectrum(std::vector<double>(d, 1.0)) - d));
    out.push_back({"flat_spectrum_schmidt", worst, worst < 1e-12});

    const auto mc = haar_mc_classical_fidelity(3, ClassicalStrategy::optimal_projective, 20000, seed);
    out.push_back({"haar_classical_d3", mc.mean, std::abs(mc.mean - 0.5) < 0.01});

    {
        const auto proj = projector_set(4, ProjectorScheme::mub_complete);
        double dev = 0.0;
        for (std::size_t i = 4; i < proj.size(); ++i)
            for (std::size_t j = 0; j < proj.size(); ++j)
                if (i / 4 != j / 4)
                    dev = std::max(dev, std::abs(std::norm(proj[i].state.amplitudes().dot(proj[j].state.amplitudes())) - 0.25));
        out.push_back({"mub_unbiased_d4", dev, dev < 1e-12});
    }

    {
        const StateVector psi = StateVector::normalized(Eigen::Vector3cd(1.0, 1.0, 1.0));
        const auto recs = simulate_counts(DensityMatrix::pure(psi), projector_set(3, ProjectorScheme::mub_complete), 1e4, 0.0);
        const double f = fidelity_mixed(reconstruct(recs, 3, ReconstructionMethod::max_likelihood), psi);
        out.push_back({"tomography_qutrit", f, f >= 0.999});
        const auto noisy = simulate_counts(DensityMatrix::isotropic(psi, 0.7), projector_set(3, ProjectorScheme::mub_complete), 1e4, 0.0);
        const double g = fidelity_mixed(reconstruct(noisy, 3, ReconstructionMethod::max_likelihood), psi);
        out.push_back({"tomography_isotropic", g, std::abs(g - 0.8) <= 0.01});
    }

    {
        const auto orders = default_probe_orders();
        const auto V = flat_model_visibilities(0.9, 5.0, orders);
        std::vector<std::pair<int, double>> pts;
        for (std::size_t i = 0; i < orders.size(); ++i) pts.emplace_back(orders[i], V[i]);
        const ProbeFit fit = fit_purity_dimension(pts);
        out.push_back({"probe_fit_dimension", fit.K_hat, std::abs(fit.K_hat - 5.0) <= 1.0 && std::abs(fit.p_hat - 0.9) <= 0.05});
    }

    {
        const auto diag = modal_diagonal(with_alpha_beta(cfg, 2.7, 1.1), Basis::vortex);
        const auto flat = apply_weights(diag, procrustean_weights(diag));
        const double K = schmidt_from_spectrum(flat);
        out.push_back({"procrustean_flat_K", K, std::abs(K - static_cast<double>(diag.size())) < 1e-9});
    }

    {
        std::vector<double> chis;
        for (int i = 0; i <= 32; ++i) chis.push_back(pi * i / 32.0);
        const auto clean = visibility_curve(0.8, 0.6, 1, chis);
        const double b = 0.1;
        std::vector<CurvePoint> sub;
        for (const auto& p : clean) sub.push_back({p.angle, background_subtract({"", p.probability + b, b}).value});
        const double dv = std::abs(curve_visibility(sub) - curve_visibility(clean));
        out.push_back({"background_subtraction", dv, dv < 1e-9});
    }

    {
        const auto modes = basis_modes(Basis::vortex, cfg.w_0, 5);
        const auto m = crosstalk_matrix(kernel_thin(cfg), modes, modes, Normalization::raw, default_grid(cfg));
        const double dmax = m.P.diagonal().maxCoeff();
        double off = 0.0;
        for (int i = 0; i < m.P.rows(); ++i)
            for (int j = 0; j < m.P.cols(); ++j)
                if (i != j) off = std::max(off, m.P(i, j));
        out.push_back({"oam_selection_rule", off / dmax, off <= 1e-6 * dmax});
    }

    {
        const ModeSpec phi5 = oam_test_state(5, cfg.w_0);
        const auto r = teleport_state(cfg, phi5, support_basis(phi5));
        out.push_back({"teleport_phi5_similarity", r.similarity, r.similarity >= 0.98});
    }
    return out;
}

int dispatch(const CLI::App& sub, const Context& ctx, const std::map<std::string, std::string>& defaults) {
    const std::string cmd = sub.get_name();
    const OpticalConfig& optics = ctx.cfg.optics;
    auto get = [&](const std::string& k) -> std::string {
        const CLI::Option* o = sub.get_option("--" + k);
        if (o->count() > 0) return o->as<std::string>();
        return defaults.at(cmd + "." + k);
    };
    auto flag = [&](const std::string& k) { return sub.get_option("--" + k)->count() > 0; };

    if (cmd == "bound") {
        const int d = static_cast<int>(to_double(get("d")));
        const long samples = static_cast<long>(to_double(get("mc")));
        if (samples <= 0) {
            ctx.out << format_number(classical_bound(d)) << '\n';
            return 0;
        }
        const auto strat = get("strategy") == "fixed" ? ClassicalStrategy::fixed_guess : ClassicalStrategy::optimal_projective;
        if (get("strategy") != "fixed" && get("strategy") != "optimal") throw ParseError("strategy must be optimal or fixed");
        const auto mc = haar_mc_classical_fidelity(d, strat, samples, ctx.common.seed);
        Table t{{"d", "bound", "mc_mean", "mc_std_error", "samples"}, {}};
        t.add_row({static_cast<long long>(d), classical_bound(d), mc.mean, mc.std_error, static_cast<long long>(mc.samples)});
        emit(t, ctx);
        return 0;
    }

    if (cmd == "capacity") {
        const auto alphas = parse_number_list(get("alphas"));
        const auto betas = parse_number_list(get("betas"));
        const Basis b = parse_basis(get("basis"));
        const int ell_max = static_cast<int>(to_double(get("ell-max")));
        const CapacityScan scan = capacity_scan(optics, alphas, betas, b, ell_max);
        // header row of alpha values, first column beta
        Table t{{"beta"}, {}};
        for (double a : alphas) t.columns.push_back(format_number(a));
        for (std::size_t j = 0; j < betas.size(); ++j) {
            std::vector<Cell> row{betas[j]};
            for (std::size_t i = 0; i < alphas.size(); ++i) row.emplace_back(scan.K(j, i));
            t.add_row(std::move(row));
        }
        emit(t, ctx);
        return 0;
    }

    if (cmd == "crosstalk") {
        const int ell_max = static_cast<int>(to_double(get("ell-max")));
        const std::vector<ModeSpec> modes = get("modes").empty() ? basis_modes(parse_basis(get("basis")), optics.w_0, ell_max)
                                                                 : parse_mode_list(get("modes"), optics.w_0);
        const auto m = crosstalk_matrix(kernel_thin(optics), modes, modes, parse_normalization(get("normalization")),
                                        grid_for(ctx.cfg));
        Table t{{"prepared", "detected", "P"}, {}};
        for (int a = 0; a < m.P.cols(); ++a)
            for (int b = 0; b < m.P.rows(); ++b) t.add_row({m.prepared[a], m.detected[b], m.P(b, a)});
        const bool on_stdout = emit(t, ctx);
        std::vector<double> diag;
        for (int i = 0; i < m.P.rows(); ++i) diag.push_back(m.P(i, i));
        summary(ctx, on_stdout, "K=" + format_number(schmidt_from_spectrum(diag)));
        return 0;
    }

    if (cmd == "probe") {
        const auto orders_d = parse_number_list(get("orders"));
        std::vector<int> orders;
        for (double n : orders_d) orders.push_back(static_cast<int>(n));
        const double p = to_double(get("p"));
        const double K = to_double(get("d"));
        const auto V = flat_model_visibilities(p, K, orders);
        std::vector<std::pair<int, double>> pts;
        for (std::size_t i = 0; i < orders.size(); ++i) pts.emplace_back(orders[i], V[i]);
        const ProbeFit fit = fit_purity_dimension(pts);
        Table t{{"n", "V_n", "p_fit", "K_fit", "residual"}, {}};
        for (std::size_t i = 0; i < orders.size(); ++i)
            t.add_row({static_cast<long long>(orders[i]), V[i], fit.p_hat, fit.K_hat, fit.residual});
        const bool on_stdout = emit(t, ctx);
        if (fit.indeterminate)
            summary(ctx, on_stdout, "fit indeterminate: visibilities are all ~0");
        else
            summary(ctx, on_stdout, "p=" + format_number(fit.p_hat) + " K=" + format_number(fit.K_hat));
        return 0;
    }

    if (cmd == "tomo") {
        const auto items = split(get("amps"), ',');
        Eigen::VectorXcd v(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) v(i) = parse_complex(items[i]);
        const StateVector psi = StateVector::normalized(v);
        const int d = psi.dim();
        const double p = to_double(get("p"));
        const auto scheme = get("scheme") == "pairwise" ? ProjectorScheme::pairwise_overcomplete : ProjectorScheme::mub_complete;
        if (get("scheme") != "pairwise" && get("scheme") != "mub") throw ParseError("scheme must be mub or pairwise");
        const auto method = get("method") == "linear" ? ReconstructionMethod::linear_inversion : ReconstructionMethod::max_likelihood;
        if (get("method") != "linear" && get("method") != "mle") throw ParseError("method must be mle or linear");
        CountOptions co;
        co.poisson = flag("poisson");
        co.seed = ctx.common.seed;
        const auto recs = simulate_counts(DensityMatrix::isotropic(psi, p), projector_set(d, scheme),
                                          to_double(get("counts")), to_double(get("accidental")), co);
        const DensityMatrix rho = reconstruct(recs, d, method);
        const bool on_stdout = emit(density_table(rho), ctx);
        summary(ctx, on_stdout, "fidelity=" + format_number(fidelity_mixed(rho, psi)));
        return 0;
    }

    if (cmd == "teleport") {
        const ModeSpec input = parse_mode(get("state"), optics.w_0);
        const std::vector<ModeSpec> basis = get("basis").empty() ? support_basis(input) : parse_mode_list(get("basis"), optics.w_0);
        TeleportOptions o;
        o.noise_floor = to_double(get("noise-floor"));
        o.flatten = !flag("no-flatten");
        const auto r = teleport_state(optics, input, basis, o);
        Table t{{"mode", "prepared", "detected", "weight"}, {}};
        for (std::size_t j = 0; j < basis.size(); ++j) t.add_row({format_mode(basis[j]), r.prepared[j], r.detected[j], r.weights[j]});
        const bool on_stdout = emit(t, ctx);
        summary(ctx, on_stdout,
                "similarity=" + format_number(r.similarity) + " fidelity=" + format_number(r.fidelity) +
                    " noisy_fidelity=" + format_number(r.noisy_fidelity) + " throughput=" + format_number(r.throughput));
        return 0;
    }

    if (cmd == "efficiency") {
        EfficiencyParams p = representative_efficiency();
        p.chi2 = to_double(get("chi2-pm-v")) * 1e-12;
        const double power = to_double(get("power-w"));
        const double area = pi * optics.w_p * optics.w_p / 2.0;
        const double photon = 2.0 * pi * 1.054571817e-34 * 299792458.0 / optics.lambda_p;
        p.flux_per_area = power / photon / area;
        p.omega_p = two_pi * 299792458.0 / optics.lambda_p;
        p.omega_B = two_pi * 299792458.0 / optics.lambda_B;
        p.omega_C = two_pi * 299792458.0 / optics.lambda_C;
        p.n_p = optics.n_p;
        p.n_B = optics.n_B;
        p.n_C = optics.n_C;
        const double s = conversion_sigma(p);
        Table t{{"sigma_per_m", "sigma_L"}, {}};
        t.add_row({s, s * optics.L_D});
        emit(t, ctx);
        return 0;
    }

    if (cmd == "selftest") {
        const auto checks = selftest_suite(ctx.common.seed);
        Table t{{"check", "value", "pass"}, {}};
        bool ok = true;
        for (const auto& c : checks) {
            t.add_row({c.name, c.value, static_cast<long long>(c.pass)});
            ok = ok && c.pass;
        }
        emit(t, ctx);
        return ok ? 0 : 1;
    }

    if (cmd == "figures") {
        const std::string dir = get("dir");
        std::vector<std::string> names = figure_names();
        if (!get("only").empty()) names = split(get("only"), ',');
        std::filesystem::create_directories(dir);
        for (const auto& n : names) {
            const Table t = figure_table(n, optics, ctx.common.seed);
            const std::string path = (std::filesystem::path(dir) / (n + (ctx.common.json ? ".json" : ".csv"))).string();
            std::ofstream f(path, std::ios::binary);
            if (!f) throw ParseError("cannot write '" + path + "'");
            if (ctx.common.json)
                write_json(f, t);
            else
                write_csv(f, t);
            ctx.out << path << '\n';
        }
        return 0;
    }
    throw ParseError("no subcommand given");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlinear-optics high-dimensional teleportation channel simulator.\n"
                 "Lists accept start:stop:step (stop exclusive) and comma-separated values, e.g. 1:6:0.5,8.\n"
                 "Modes: lg:ell=1,p=0  hg:n=2,m=0  gauss  vortex:ell=2  frac:M=0.5,offset=0\n"
                 "       sup:(0.707,lg:ell=1)+(0.707i,lg:ell=-1); any primitive takes w_um=<waist>.",
                 "hdtele"};
    app.require_subcommand(1);
    Common common;
    std::map<std::string, std::string> defaults;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", common.config, "key = value config file");
        s->add_option("--out", common.out, "output file (stdout when omitted)");
        s->add_flag("--json", common.json, "write JSON instead of CSV");
        s->add_option("--seed", common.seed, "random seed (u64)");
    };
    auto option = [&](CLI::App* s, const std::string& name, const std::string& def, const std::string& help) {
        defaults[s->get_name() + "." + name] = def;
        s->add_option("--" + name, help)->default_str(def);
    };
    auto add_flag = [&](CLI::App* s, const std::string& name, const std::string& help) {
        s->add_flag("--" + name, help);
    };

    auto* crosstalk = app.add_subcommand("crosstalk", "crosstalk matrix P(detected, prepared)");
    option(crosstalk, "basis", "vortex", "vortex, lg or hg");
    option(crosstalk, "ell-max", "5", "|ell| range (hg: n, m below it)");
    option(crosstalk, "modes", "", "explicit ';'-separated mode list");
    option(crosstalk, "normalization", "raw", "raw or column");

    auto* capacity = app.add_subcommand("capacity", "Schmidt number scan over alpha = w_p/w_0, beta = w_p/w_D");
    option(capacity, "alphas", "1:6:0.5", "alpha list");
    option(capacity, "betas", "1", "beta list");
    option(capacity, "basis", "vortex", "vortex, lg or hg");
    option(capacity, "ell-max", "5", "|ell| range");

    auto* probe = app.add_subcommand("probe", "fractional-OAM visibilities of a flat channel and the (p, K) fit");
    option(probe, "p", "1", "purity");
    option(probe, "d", "10", "Schmidt number of the flat channel");
    option(probe, "orders", "1:26:2", "probe orders n");

    auto* tomo = app.add_subcommand("tomo", "simulate projection counts and reconstruct the density matrix");
    option(tomo, "amps", "1,1,1", "target amplitudes, e.g. 1,i,-1");
    option(tomo, "p", "1", "isotropic purity");
    option(tomo, "scheme", "mub", "mub or pairwise");
    option(tomo, "method", "mle", "mle or linear");
    option(tomo, "counts", "10000", "total counts");
    option(tomo, "accidental", "0", "accidental rate per projector");
    add_flag(tomo, "poisson", "Poisson-sample the counts");

    auto* teleport = app.add_subcommand("teleport", "teleport a mode superposition through the channel");
    option(teleport, "state", "sup:(1,vortex:ell=-3)+(-i,vortex:ell=-1)+(1,vortex:ell=1)+(i,vortex:ell=3)", "input mode");
    option(teleport, "basis", "", "';'-separated basis (default: the modes of the state)");
    option(teleport, "noise-floor", "0", "accidental floor per projector");
    add_flag(teleport, "no-flatten", "skip Procrustean filtering");

    auto* bound = app.add_subcommand("bound", "classical fidelity bound 2/(d+1)");
    option(bound, "d", "2", "dimension");
    option(bound, "mc", "0", "Haar Monte Carlo samples (0: formula only)");
    option(bound, "strategy", "optimal", "optimal or fixed");

    auto* efficiency = app.add_subcommand("efficiency", "up-conversion coefficient sigma");
    option(efficiency, "chi2-pm-v", "10", "chi2 in pm/V");
    option(efficiency, "power-w", "1", "pump power in W");

    auto* selftest = app.add_subcommand("selftest", "invariant suite");

    auto* figures = app.add_subcommand("figures", "write every figure table");
    option(figures, "dir", "figures", "output directory");
    option(figures, "only", "", "comma-separated subset");

    for (auto* s : {crosstalk, capacity, probe, tomo, teleport, bound, efficiency, selftest, figures}) add_common(s);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        const Context ctx{load(common), out, err, common};
        return dispatch(*app.get_subcommands().front(), ctx, defaults);
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (iterations " << e.iterations() << ", residual " << format_number(e.residual())
            << ")\n";
        return 2;
    } catch (const GridError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hdtele
