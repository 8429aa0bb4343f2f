#pragma once

#include "hdtele/config.hpp"
#include "hdtele/modes.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hdtele {

// 1 / sum P^2 after normalising P to unit sum.
double schmidt_from_spectrum(const std::vector<double>& P);

// Schmidt number of T(qB - qA) G(qB; w_0) G(qA; w_0) for the thin Gaussian
// kernel, from the two-mode Gaussian decomposition: K = K1^2 with
// K1 = (R + 1/R) / 2 and R^2 = 1 + 2 a / b, b = w_0^2 / 4.
double schmidt_from_kernel(const OpticalConfig& cfg);

// n_A n_B w_D^2 w_p^2 / ((w_D^2 + w_p^2)(n_A lambda_B + n_B lambda_A) L).
double kappa_estimate(const OpticalConfig& cfg);

enum class Basis { vortex, lg, hg };

Basis parse_basis(const std::string& name);
std::string basis_name(Basis b);

// vortex / lg: ell in [-ell_max, ell_max] (p = 0); hg: n, m in [0, ell_max - 1].
std::vector<ModeSpec> basis_modes(Basis basis, double waist, int ell_max = 5);

// |<m|T|m>|^2 for each basis mode m through the thin kernel of cfg.
std::vector<double> modal_diagonal(const OpticalConfig& cfg, Basis basis, int ell_max = 5);

double modal_capacity(const OpticalConfig& cfg, Basis basis = Basis::vortex, int ell_max = 5);

struct CapacityScan {
    std::vector<double> alphas;
    std::vector<double> betas;
    Eigen::MatrixXd K;  // K(beta index, alpha index)
    Basis basis = Basis::vortex;
};

// For each (alpha, beta): w_0 = w_p / alpha, w_D = w_p / beta, K from the basis diagonal.
CapacityScan capacity_scan(const OpticalConfig& tmpl, const std::vector<double>& alphas,
                           const std::vector<double>& betas, Basis basis = Basis::vortex, int ell_max = 5);

// alpha_ell = n_ratio sqrt(beta + 1) sqrt(|ell| + 1); ell = 0 gives alpha_0.
double alpha_threshold(double beta, int ell, double n_ratio);

}  // namespace hdtele
