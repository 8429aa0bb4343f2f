#include "hdtele/capacity.hpp"

#include "hdtele/channel.hpp"
#include "hdtele/error.hpp"

#include <cmath>
#include <numeric>

namespace hdtele {

double schmidt_from_spectrum(const std::vector<double>& P) {
    if (P.empty()) throw InvalidArgument("empty spectrum");
    double sum = 0.0;
    for (double p : P) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("spectrum entries must be finite and non-negative");
        sum += p;
    }
    if (!(sum > 0.0)) throw InvalidArgument("spectrum is all zero");
    double sq = 0.0;
    for (double p : P) sq += (p / sum) * (p / sum);
    return 1.0 / sq;
}

double schmidt_from_kernel(const OpticalConfig& cfg) {
    validate(cfg);
    const ClosedThin k{1.0, cfg.w_D * cfg.w_D * cfg.w_p * cfg.w_p / (4.0 * (cfg.w_D * cfg.w_D + cfg.w_p * cfg.w_p))};
    const double b = cfg.w_0 * cfg.w_0 / 4.0;
    const double R = std::sqrt(1.0 + 2.0 * k.width_a / b);
    const double k1 = 0.5 * (R + 1.0 / R);
    return k1 * k1;
}

double kappa_estimate(const OpticalConfig& cfg) {
    validate(cfg);
    if (!(cfg.L_p > 0.0) || !(cfg.L_D > 0.0)) throw InvalidArgument("kappa needs a non-zero crystal length");
    if (std::abs(cfg.L_p - cfg.L_D) > 1e-12 * cfg.L_p) throw InvalidArgument("kappa needs equal crystal lengths");
    const double wd2 = cfg.w_D * cfg.w_D;
    const double wp2 = cfg.w_p * cfg.w_p;
    return cfg.n_A * cfg.n_B * wd2 * wp2 /
           ((wd2 + wp2) * (cfg.n_A * cfg.lambda_B + cfg.n_B * cfg.lambda_A) * cfg.L_p);
}

Basis parse_basis(const std::string& name) {
    if (name == "vortex") return Basis::vortex;
    if (name == "lg") return Basis::lg;
    if (name == "hg") return Basis::hg;
    throw ParseError("unknown basis '" + name + "' (expected vortex, lg or hg)");
}

std::string basis_name(Basis b) {
    switch (b) {
        case Basis::vortex: return "vortex";
        case Basis::lg: return "lg";
        case Basis::hg: return "hg";
    }
    return "vortex";
}

std::vector<ModeSpec> basis_modes(Basis basis, double waist, int ell_max) {
    if (ell_max < 0) throw InvalidArgument("mode range must be non-negative");
    std::vector<ModeSpec> out;
    if (basis == Basis::hg) {
        for (int n = 0; n < std::max(ell_max, 1); ++n)
            for (int m = 0; m < std::max(ell_max, 1); ++m) out.push_back(HG{n, m, waist});
        return out;
    }
    for (int ell = -ell_max; ell <= ell_max; ++ell) {
        if (basis == Basis::vortex)
            out.push_back(PhaseVortex{ell, waist});
        else
            out.push_back(LG{ell, 0, waist});
    }
    return out;
}

std::vector<double> modal_diagonal(const OpticalConfig& cfg, Basis basis, int ell_max) {
    const ClosedThin kernel = kernel_thin(cfg);
    const MomentumGrid grid = default_grid(cfg);
    const auto modes = basis_modes(basis, cfg.w_0, ell_max);
    std::vector<AngularSpectrum> spectra;
    for (const auto& m : modes) spectra.push_back(mode_spectrum(m, grid));
    // one batched call shares the radial tables across modes
    const Eigen::MatrixXcd M = kernel_matrix(kernel, spectra, spectra);
    std::vector<double> diag(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) diag[i] = std::norm(M(i, i));
    return diag;
}

double modal_capacity(const OpticalConfig& cfg, Basis basis, int ell_max) {
    return schmidt_from_spectrum(modal_diagonal(cfg, basis, ell_max));
}

CapacityScan capacity_scan(const OpticalConfig& tmpl, const std::vector<double>& alphas,
                           const std::vector<double>& betas, Basis basis, int ell_max) {
    if (alphas.empty() || betas.empty()) throw InvalidArgument("capacity scan needs non-empty alpha and beta lists");
    CapacityScan scan{alphas, betas, Eigen::MatrixXd(betas.size(), alphas.size()), basis};
    for (std::size_t b = 0; b < betas.size(); ++b)
        for (std::size_t a = 0; a < alphas.size(); ++a)
            scan.K(b, a) = modal_capacity(with_alpha_beta(tmpl, alphas[a], betas[b]), basis, ell_max);
    return scan;
}

double alpha_threshold(double beta, int ell, double n_ratio) {
    if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
    if (!(n_ratio > 0.0)) throw InvalidArgument("index ratio must be positive");
    return n_ratio * std::sqrt(beta + 1.0) * mode_size_factor(ell);
}

}  // namespace hdtele
