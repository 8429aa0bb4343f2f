#pragma once

#include <string>
#include <vector>

namespace hdtele {

// Coincidences in the signal window and in a time-shifted window of the same width.
struct CoincidenceRecord {
    std::string label;
    double signal = 0.0;
    double background = 0.0;
    double window_ns = 0.5;
    double background_window_ns = 0.5;
    double offset_ns = 30.0;  // informational
};

struct Subtracted {
    double value = 0.0;
    bool clamped = false;  // signal was below background
};

// max(signal - background, 0). Throws InvalidArgument on negative counts or
// unequal window widths.
Subtracted background_subtract(const CoincidenceRecord& rec);

struct ProcrusteanWeights {
    std::vector<double> weights;  // t_j = min / diag_j
    double throughput = 0.0;      // sum t_j diag_j / sum diag_j
};

// Throws InvalidArgument for an empty list or a non-positive entry.
ProcrusteanWeights procrustean_weights(const std::vector<double>& diag);

// t_j diag_j
std::vector<double> apply_weights(const std::vector<double>& diag, const ProcrusteanWeights& w);

struct EfficiencyParams {
    double chi2 = 0.0;           // m / V
    double flux_per_area = 0.0;  // photons / s / m^2
    double omega_p = 0.0;        // rad / s
    double omega_B = 0.0;
    double omega_C = 0.0;
    double n_p = 1.0;
    double n_B = 1.0;
    double n_C = 1.0;
};

// chi2 sqrt(hbar w_p w_B w_C F / (8 eps0 c^3 n_p n_B n_C A_p)), in 1/m.
double conversion_sigma(const EfficiencyParams& p);

// Reasonable CW values: 10 pm/V, 1 W at 532 nm over a 600 um waist, 1565 / 808 nm.
EfficiencyParams representative_efficiency();

}  // namespace hdtele
