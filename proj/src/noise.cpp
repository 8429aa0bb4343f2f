#include "hdtele/noise.hpp"

#include "hdtele/error.hpp"
#include "hdtele/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace hdtele {

namespace {
constexpr double hbar = 1.054571817e-34;
constexpr double eps0 = 8.8541878128e-12;
constexpr double c_light = 299792458.0;
}  // namespace

Subtracted background_subtract(const CoincidenceRecord& rec) {
    if (!(rec.signal >= 0.0) || !(rec.background >= 0.0)) throw InvalidArgument("counts must be non-negative");
    if (!(rec.window_ns > 0.0) || rec.window_ns != rec.background_window_ns)
        throw InvalidArgument("signal and background windows must share one positive width");
    const double d = rec.signal - rec.background;
    if (d < 0.0) return {0.0, true};
    return {d, false};
}

ProcrusteanWeights procrustean_weights(const std::vector<double>& diag) {
    if (diag.empty()) throw InvalidArgument("empty spectrum");
    for (double v : diag)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("spectrum entries must be positive to flatten");
    const double lo = *std::min_element(diag.begin(), diag.end());
    ProcrusteanWeights w;
    double kept = 0.0;
    double total = 0.0;
    for (double v : diag) {
        // exact 1 for the weakest mode, so the flattened spectrum is exactly constant there
        const double t = (v == lo) ? 1.0 : lo / v;
        w.weights.push_back(t);
        kept += t * v;
        total += v;
    }
    w.throughput = kept / total;
    return w;
}

std::vector<double> apply_weights(const std::vector<double>& diag, const ProcrusteanWeights& w) {
    if (diag.size() != w.weights.size()) throw InvalidArgument("weight count does not match the spectrum");
    std::vector<double> out(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) out[i] = w.weights[i] * diag[i];
    return out;
}

double conversion_sigma(const EfficiencyParams& p) {
    const double vals[] = {p.chi2, p.flux_per_area, p.omega_p, p.omega_B, p.omega_C, p.n_p, p.n_B, p.n_C};
    for (double v : vals)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("efficiency parameters must be positive");
    const double num = hbar * p.omega_p * p.omega_B * p.omega_C * p.flux_per_area;
    const double den = 8.0 * eps0 * c_light * c_light * c_light * p.n_p * p.n_B * p.n_C;
    return p.chi2 * std::sqrt(num / den);
}

EfficiencyParams representative_efficiency() {
    const double lp = 532e-9;
    const double photon_energy = 2.0 * pi * hbar * c_light / lp;
    const double wp = 600e-6;
    const double area = pi * wp * wp / 2.0;
    EfficiencyParams p;
    p.chi2 = 10e-12;
    p.flux_per_area = 1.0 / photon_energy / area;
    p.omega_p = two_pi * c_light / lp;
    p.omega_B = two_pi * c_light / 1565e-9;
    p.omega_C = two_pi * c_light / 808e-9;
    p.n_p = p.n_B = p.n_C = 1.8;
    return p;
}

}  // namespace hdtele
