#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace hdtele {

// Physical parameters of the down-conversion / up-conversion pair, SI units.
struct OpticalConfig {
    double lambda_p = 532e-9;
    double lambda_A = 1565e-9;
    double lambda_B = 1565e-9;
    double lambda_C = 808e-9;
    double n_p = 1.8;
    double n_A = 1.8;
    double n_B = 1.8;
    double n_C = 1.8;
    double L_p = 5e-3;
    double L_D = 5e-3;
    double Lambda_pp = 9.675e-6;  // informational
    double w_p = 600e-6;
    double w_D = 600e-6;
    double w_0 = 200e-6;
    double gamma_sinc = 1.0 / 6.0;

    double alpha() const { return w_p / w_0; }
    double beta() const { return w_p / w_D; }
};

// Throws InvalidArgument when a waist or wavelength is not positive, a
// crystal length is negative, an index is below 1, or the up-conversion
// wavelengths violate energy conservation by more than 0.5%.
void validate(const OpticalConfig& cfg);

// Same config with w_0 = w_p / alpha and w_D = w_p / beta.
OpticalConfig with_alpha_beta(OpticalConfig cfg, double alpha, double beta);

struct ConfigFile {
    OpticalConfig optics;
    std::optional<int> grid_n;
    std::optional<double> grid_qmax;  // 1/m
};

// key = value lines, '#' starts a comment. Unknown keys are an error.
ConfigFile parse_config(std::istream& in);
ConfigFile load_config(const std::string& path);

}  // namespace hdtele
