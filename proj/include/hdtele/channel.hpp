#pragma once

#include "hdtele/config.hpp"
#include "hdtele/modes.hpp"

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

namespace hdtele {

enum class Role { SPDC, SFG };
enum class PhaseMatching { sinc, gaussian };

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Longitudinal phase mismatch for transverse momenta q1 (B for SPDC, A for
// SFG) and q2 (photon C).
double delta_kz(Vec2 q1, Vec2 q2, const OpticalConfig& cfg, Role role);

// N with integral |f|^2 d^2q_X d^2q_C = 1. A zero-length crystal gives an
// unnormalisable amplitude; N = 1 is returned then.
double pair_normalization(const OpticalConfig& cfg, Role role, PhaseMatching approx);

// N exp(-w^2 |qX + qC|^2 / 4) PM(L dk / 2), w = w_p for SPDC and w_D for SFG.
cplx pair_amplitude(Vec2 qX, Vec2 qC, const OpticalConfig& cfg, Role role, PhaseMatching approx);

// Phase-matching factor for x = L dk / 2.
double phase_matching(double x, PhaseMatching approx, double gamma_sinc);

// Pair amplitude with its normalisation computed once.
class PairAmplitude {
public:
    PairAmplitude(const OpticalConfig& cfg, Role role, PhaseMatching approx);
    cplx operator()(Vec2 qX, Vec2 qC) const;
    double norm() const noexcept { return N_; }

private:
    double N_;
    double w2_;
    double L_;
    double a_;
    double cx_;
    double cc_;
    double gamma_;
    PhaseMatching approx_;
};

// T(qB, qA) = amplitude * exp(-width_a |qB - qA|^2).
struct ClosedThin {
    double amplitude = 0.0;
    double width_a = 0.0;

    double operator()(Vec2 qB, Vec2 qA) const;
};

// Full contraction over photon C, evaluated on the grid. Each batch is
// repeated on a half-cell-shifted q_C lattice; a relative disagreement above
// `tolerance` raises ConvergenceError.
struct QuadratureKernel {
    OpticalConfig config;
    MomentumGrid grid;
    double tolerance = 1e-8;
    PhaseMatching approx = PhaseMatching::sinc;
};

using ChannelKernel = std::variant<ClosedThin, QuadratureKernel>;

ClosedThin kernel_thin(const OpticalConfig& cfg, PhaseMatching approx = PhaseMatching::sinc);

// Kernel standard deviation 1/sqrt(2 a); grids must have dq below it.
double kernel_sigma(const ClosedThin& k);

enum class ElementMethod {
    automatic,  // polar when every spectrum has a finite OAM expansion
    grid,       // FFT convolution on the sample grid
    polar,      // radial Bessel quadrature of the analytic sources
};

cplx kernel_element(const ChannelKernel& kernel, const AngularSpectrum& proj, const AngularSpectrum& input,
                    ElementMethod method = ElementMethod::automatic);

// M(j, k) = <projs_j | T | inputs_k>.
Eigen::MatrixXcd kernel_matrix(const ChannelKernel& kernel, const std::vector<AngularSpectrum>& projs,
                               const std::vector<AngularSpectrum>& inputs,
                               ElementMethod method = ElementMethod::automatic);

enum class Normalization { raw, per_column };

struct CrosstalkMatrix {
    std::vector<std::string> prepared;
    std::vector<std::string> detected;
    Eigen::MatrixXd P;  // P(detected, prepared)
    Normalization normalization = Normalization::raw;
};

CrosstalkMatrix crosstalk_matrix(const ChannelKernel& kernel, const std::vector<ModeSpec>& prepared,
                                 const std::vector<ModeSpec>& detected, Normalization normalization,
                                 const MomentumGrid& grid, ElementMethod method = ElementMethod::automatic);

struct ThinCrystalRatio {
    double spdc = 0.0;
    double sfg = 0.0;
    bool flagged = false;  // either ratio above 0.1
};

ThinCrystalRatio thin_crystal_ratio(const OpticalConfig& cfg);

// Window 9 / min(w_0, w_p, w_D); n grows from `n` until the thin kernel is resolved.
MomentumGrid default_grid(const OpticalConfig& cfg, int n = 128);

}  // namespace hdtele
