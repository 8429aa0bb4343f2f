#pragma once

#include "hdtele/numerics.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hdtele {

// Square momentum window [-q_max, q_max]^2 sampled at cell centres
// q_i = -q_max + (i + 1/2) dq, dq = 2 q_max / n.
class MomentumGrid {
public:
    MomentumGrid(int n, double q_max);

    // q_max = 9 / w_min, where w_min is the smallest waist.
    static MomentumGrid for_waists(const std::vector<double>& waists, int n = 128);

    int n() const noexcept { return n_; }
    double q_max() const noexcept { return q_max_; }
    double dq() const noexcept { return 2.0 * q_max_ / n_; }
    double coord(int i) const noexcept { return -q_max_ + (i + 0.5) * dq(); }

    // Throws GridError if a Gaussian exp(-w^2 q^2 / 4) is above 1e-8 at the edge.
    void require_waist(double waist) const;

    bool operator==(const MomentumGrid&) const = default;

private:
    int n_;
    double q_max_;
};

struct LG {
    int ell = 0;
    int p = 0;
    double waist = 0.0;
};

struct HG {
    int n = 0;
    int m = 0;
    double waist = 0.0;
};

struct Gauss {
    double waist = 0.0;
};

// Gaussian envelope with a helical phase exp(i ell phi).
struct PhaseVortex {
    int ell = 0;
    double waist = 0.0;
};

// Gaussian envelope with the fractional phase exp(i M ((phi - offset) mod 2 pi)).
// 2M must be an integer.
struct FracOAM {
    double M = 0.5;
    double offset = 0.0;
    double waist = 0.0;
};

struct SuperTerm;

struct Superposition {
    std::vector<SuperTerm> terms;
};

struct ModeSpec {
    using Variant = std::variant<LG, HG, Gauss, PhaseVortex, FracOAM, Superposition>;
    Variant value;

    ModeSpec() : value(Gauss{}) {}
    template <typename T>
        requires std::is_constructible_v<Variant, T>
    ModeSpec(T v) : value(std::move(v)) {}
};

struct SuperTerm {
    cplx coeff;
    ModeSpec mode;
};

// Superposition with its coefficient vector scaled to unit Euclidean norm.
ModeSpec make_superposition(std::vector<SuperTerm> terms);

// Analytic value of the mode at transverse momentum (qx, qy). Primitive modes
// are unit-normalised; superpositions are the plain coefficient sum.
cplx mode_value(const ModeSpec& spec, double qx, double qy);
cplx mode_value_polar(const ModeSpec& spec, double r, double phi);

// All waists appearing in the spec (recursively).
std::vector<double> mode_waists(const ModeSpec& spec);

// Throws InvalidArgument on negative indices, non-positive waists, M not a
// half-integer, or an empty superposition.
void validate(const ModeSpec& spec);

// <a|b> of the analytic modes (no grid involved).
cplx mode_overlap(const ModeSpec& a, const ModeSpec& b);
double analytic_norm(const ModeSpec& spec);

// Size growth of an OAM mode relative to the fundamental.
double mode_size_factor(int ell);

struct AngularSpectrum {
    MomentumGrid grid;
    Eigen::MatrixXcd samples;  // samples(ix, iy)
    bool normalized = false;
    // Analytic origin of the samples, when known. The field is
    // source_scale * mode(r, phi + source_rotation).
    std::optional<ModeSpec> source;
    double source_scale = 1.0;
    double source_rotation = 0.0;

    // Field at an arbitrary momentum; analytic when a source is attached,
    // bicubic interpolation of the samples otherwise.
    cplx value_polar(double r, double phi) const;
};

AngularSpectrum mode_spectrum(const ModeSpec& spec, const MomentumGrid& grid);

// Discrete inner product sum conj(a) b dq^2.
cplx inner_product(const AngularSpectrum& a, const AngularSpectrum& b);

// Field sampled at angle phi + chi: the ell-th OAM coefficient picks up exp(i ell chi).
AngularSpectrum rotate(const AngularSpectrum& f, double chi);

// Fractional probe U_n(phi, theta): equal-weight sum of the n charge-n/2
// masks with offsets 2 pi k / n + theta (mod 2 pi), on a Gaussian envelope.
ModeSpec fractional_probe_spec(int n_index, double theta, double waist);
AngularSpectrum fractional_probe(int n_index, double theta, const MomentumGrid& grid, double waist);

// Closed-form OAM amplitudes of the normalised U_n(theta):
// a_{jn} = 2i / (pi (1 - 2j)) * exp(-i j n theta), zero off multiples of n.
std::map<int, cplx> fractional_probe_oam(int n_index, double theta, int ell_min, int ell_max);

struct OamOptions {
    int phi_samples = 1024;
    int radial_panels = 48;
};

// Radially integrated power per OAM index over [ell_min, ell_max].
std::map<int, double> oam_decompose(const AngularSpectrum& f, int ell_min, int ell_max,
                                    const OamOptions& opts = {});

// Radial profile of an OAM-pure term: Laguerre-Gauss or bare Gaussian envelope.
struct RadialProfile {
    bool laguerre = false;
    int p = 0;
    int abs_ell = 0;
    double waist = 0.0;

    double operator()(double r) const;
};

struct OamTerm {
    int ell = 0;
    cplx coeff;
    RadialProfile radial;
};

// Finite expansion sum_k coeff_k R_k(r) exp(i ell_k phi), when one exists
// (LG, Gauss, PhaseVortex and superpositions of them).
std::optional<std::vector<OamTerm>> oam_expansion(const ModeSpec& spec);

}  // namespace hdtele
