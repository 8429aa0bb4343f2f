#pragma once

#include <map>
#include <utility>
#include <vector>

namespace hdtele {

// T = sum_ell lambda_ell |ell><ell| with sum lambda^2 = 1.
class DiagonalChannel {
public:
    explicit DiagonalChannel(std::map<int, double> lambdas);

    // lambda_ell = sqrt(P_ell), renormalised.
    static DiagonalChannel from_intensities(const std::map<int, double>& P);

    // Flat spectrum with Schmidt number K over the modes 0, 1, -1, 2, -2, ...:
    // floor(K) full modes plus one partial edge mode.
    static DiagonalChannel flat(double K);

    const std::map<int, double>& lambdas() const noexcept { return lambdas_; }

private:
    std::map<int, double> lambdas_;
};

// P_n(theta) = p |sum lambda_ell |a_ell|^2 exp(-i ell theta)|^2 + (1 - p) / d^2 I_n,
// with a_ell the OAM amplitudes of U_n and I_n = (sum over the channel's
// modes of |a_ell|^2)^2. d may be fractional (d >= 1).
double probe_probability(const DiagonalChannel& chan, int n_index, double theta, double p_noise, double d);

// V_n from P_n(0) and P_n(pi / n).
std::vector<double> probe_visibilities(const DiagonalChannel& chan, const std::vector<int>& n_list, double p_noise,
                                       double d);

// Forward model used by the fit: flat channel of Schmidt number K, d = K.
std::vector<double> flat_model_visibilities(double p_noise, double K, const std::vector<int>& n_list);

// 1, 3, ..., 25
std::vector<int> default_probe_orders();

struct ProbeFit {
    std::vector<int> n_list;
    std::vector<double> visibilities;
    double p_hat = 0.0;
    double K_hat = 1.0;
    double residual = 0.0;
    bool indeterminate = false;  // every visibility is ~0: p = 0 and K is unconstrained
};

// Least squares over p in [0, 1] (step 0.01) and K in [1, 2 max n] (step 0.25),
// ties broken toward smaller K then larger p, then refined by compass search.
ProbeFit fit_purity_dimension(const std::vector<std::pair<int, double>>& points);

}  // namespace hdtele
