#pragma once

#include "hdtele/channel.hpp"
#include "hdtele/config.hpp"
#include "hdtele/csv.hpp"
#include "hdtele/modes.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hdtele {

struct TeleportOptions {
    double noise_floor = 0.0;  // accidental floor per projector, relative to unit signal
    bool flatten = true;       // Procrustean filtering of the channel diagonal
    std::optional<MomentumGrid> grid;
    ElementMethod method = ElementMethod::automatic;
};

struct TeleportResult {
    std::vector<double> prepared;  // |<b_j|input>|^2, normalised
    std::vector<double> detected;  // |<b_j|T|input>|^2 after filtering and noise, normalised
    std::vector<cplx> output;      // coherent output amplitudes, unit norm
    std::vector<double> weights;   // Procrustean intensity weights (all 1 without flattening)
    double throughput = 1.0;
    double similarity = 0.0;
    double fidelity = 0.0;        // coherent output, renormalised, noiseless
    double noisy_fidelity = 0.0;  // same with the accidental floor mixed in
};

// Throws InvalidArgument if the basis is not orthonormal or the input has no
// weight on it.
TeleportResult teleport_state(const OpticalConfig& cfg, const ModeSpec& input, const std::vector<ModeSpec>& basis,
                              const TeleportOptions& opts = {});

struct CurvePoint {
    double angle = 0.0;  // analyser rotation chi; programmed phase theta = 2 ell chi
    double probability = 0.0;
};

// Input (|ell> + |-ell>)/sqrt2 through the diagonal pair (lambda_plus,
// lambda_minus), analyser rotated by chi:
// P = |lp e^{i ell chi} + lm e^{-i ell chi}|^2 / 2 / (lp^2 + lm^2) + floor.
std::vector<CurvePoint> visibility_curve(double lambda_plus, double lambda_minus, int ell,
                                         const std::vector<double>& angles, double floor = 0.0);

// Same with lambda_{+-ell} from the vortex diagonal of cfg.
std::vector<CurvePoint> visibility_curve(const OpticalConfig& cfg, int ell, const std::vector<double>& angles,
                                         double floor = 0.0);

// Max / min visibility of a sampled curve.
double curve_visibility(const std::vector<CurvePoint>& curve);

// Uniform floor that brings a curve with extrema (pmax, pmin) to visibility v.
double floor_for_visibility(double pmax, double pmin, double v);

// The four-dimensional OAM and nine-dimensional HG test states.
ModeSpec oam_test_state(int index, double waist);  // phi_1 .. phi_5
ModeSpec hg_test_state(int index, double waist);   // gamma_1 .. gamma_3
std::vector<ModeSpec> support_basis(const ModeSpec& state);

// Configuration with w_0 = w_p / 12, w_D = w_p used for the HG states.
OpticalConfig large_alpha_config(const OpticalConfig& base);

std::vector<std::string> figure_names();

// One figure table: fig1b, fig1cde, fig2, fig3a, fig3c, fig4 or fig5.
Table figure_table(const std::string& name, const OpticalConfig& cfg, std::uint64_t seed);

}  // namespace hdtele
