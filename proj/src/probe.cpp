#include "hdtele/probe.hpp"

#include "hdtele/error.hpp"
#include "hdtele/metrics.hpp"
#include "hdtele/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hdtele {

namespace {

void check_order(int n) {
    if (n < 1 || n % 2 == 0) throw InvalidArgument("probe order must be a positive odd integer");
}

// |a_ell|^2 of the normalised probe of order n
double probe_weight(int n, int ell) {
    if (ell % n != 0) return 0.0;
    const double j = ell / n;
    const double den = pi * (1.0 - 2.0 * j);
    return 4.0 / (den * den);
}

int flat_mode(int k) { return k == 0 ? 0 : (k % 2 == 1 ? (k + 1) / 2 : -k / 2); }

}  // namespace

DiagonalChannel::DiagonalChannel(std::map<int, double> lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw InvalidArgument("channel needs at least one mode");
    double s = 0.0;
    for (const auto& [ell, l] : lambdas_) {
        if (!(l >= 0.0)) throw InvalidArgument("channel weights must be non-negative");
        s += l * l;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidArgument("channel weights must satisfy sum lambda^2 = 1");
}

DiagonalChannel DiagonalChannel::from_intensities(const std::map<int, double>& P) {
    double s = 0.0;
    for (const auto& [ell, p] : P) {
        if (!(p >= 0.0)) throw InvalidArgument("intensities must be non-negative");
        s += p;
    }
    if (!(s > 0.0)) throw InvalidArgument("intensities are all zero");
    std::map<int, double> l;
    for (const auto& [ell, p] : P) l[ell] = std::sqrt(p / s);
    return DiagonalChannel(std::move(l));
}

DiagonalChannel DiagonalChannel::flat(double K) {
    if (!(K >= 1.0) || !std::isfinite(K)) throw InvalidArgument("Schmidt number must be >= 1");
    const int m = static_cast<int>(std::floor(K + 1e-12));
    double f = 0.0;
    if (K - m > 1e-12) {
        // (m + f)^2 / (m + f^2) = K
        const double disc = m * m - (K - 1.0) * m * (K - m);
        f = (m - std::sqrt(std::max(0.0, disc))) / (K - 1.0);
    }
    std::map<int, double> P;
    for (int k = 0; k < m; ++k) P[flat_mode(k)] = 1.0;
    if (f > 0.0) P[flat_mode(m)] = f;
    return from_intensities(P);
}

double probe_probability(const DiagonalChannel& chan, int n_index, double theta, double p_noise, double d) {
    check_order(n_index);
    if (!(p_noise >= 0.0 && p_noise <= 1.0)) throw InvalidArgument("purity must lie in [0, 1]");
    if (!(d >= 1.0)) throw InvalidArgument("dimension must be >= 1");
    cplx coherent = 0.0;
    double support = 0.0;
    for (const auto& [ell, lambda] : chan.lambdas()) {
        const double w = probe_weight(n_index, ell);
        coherent += lambda * w * std::exp(cplx(0.0, -ell * theta));
        support += w;
    }
    return p_noise * std::norm(coherent) + (1.0 - p_noise) / (d * d) * support * support;
}

std::vector<double> probe_visibilities(const DiagonalChannel& chan, const std::vector<int>& n_list, double p_noise,
                                       double d) {
    std::vector<double> out;
    out.reserve(n_list.size());
    for (int n : n_list) {
        const double pmax = probe_probability(chan, n, 0.0, p_noise, d);
        const double pmin = probe_probability(chan, n, pi / n, p_noise, d);
        out.push_back(pmax + pmin > 0.0 ? visibility(pmax, pmin) : 0.0);
    }
    return out;
}

std::vector<double> flat_model_visibilities(double p_noise, double K, const std::vector<int>& n_list) {
    return probe_visibilities(DiagonalChannel::flat(K), n_list, p_noise, K);
}

std::vector<int> default_probe_orders() {
    std::vector<int> out;
    for (int n = 1; n <= 25; n += 2) out.push_back(n);
    return out;
}

ProbeFit fit_purity_dimension(const std::vector<std::pair<int, double>>& points) {
    if (points.size() < 2) throw InvalidArgument("fit needs at least two visibility points");
    ProbeFit fit;
    int nmax = 1;
    for (const auto& [n, v] : points) {
        check_order(n);
        fit.n_list.push_back(n);
        fit.visibilities.push_back(v);
        nmax = std::max(nmax, n);
    }
    auto residual = [&](double p, double K) {
        const auto model = flat_model_visibilities(p, K, fit.n_list);
        double r = 0.0;
        for (std::size_t i = 0; i < model.size(); ++i) r += (model[i] - fit.visibilities[i]) * (model[i] - fit.visibilities[i]);
        return r;
    };
    const double k_hi = 2.0 * nmax;
    const bool degenerate = std::all_of(fit.visibilities.begin(), fit.visibilities.end(),
                                        [](double v) { return std::abs(v) < 1e-9; });
    if (degenerate) {
        fit.indeterminate = true;
        fit.p_hat = 0.0;
        fit.K_hat = 1.0;
        fit.residual = residual(0.0, 1.0);
        return fit;
    }

    const int nk = static_cast<int>(std::floor((k_hi - 1.0) / 0.25 + 1e-9)) + 1;
    constexpr int np = 101;
    std::vector<double> table(static_cast<std::size_t>(nk) * np);
    parallel_for(nk, [&](std::size_t ik) {
        const double K = 1.0 + 0.25 * ik;
        for (int ip = 0; ip < np; ++ip) table[ik * np + ip] = residual(0.01 * ip, K);
    });
    double best = std::numeric_limits<double>::infinity();
    double bp = 0.0;
    double bk = 1.0;
    for (int ik = 0; ik < nk; ++ik)
        for (int ip = np - 1; ip >= 0; --ip)
            if (table[static_cast<std::size_t>(ik) * np + ip] < best) {
                best = table[static_cast<std::size_t>(ik) * np + ip];
                bp = 0.01 * ip;
                bk = 1.0 + 0.25 * ik;
            }

    double sp = 0.01;
    double sk = 0.25;
    while (sp > 1e-7 || sk > 1e-6) {
        bool moved = false;
        const double cand[4][2] = {{bp + sp, bk}, {bp - sp, bk}, {bp, bk + sk}, {bp, bk - sk}};
        for (const auto& c : cand) {
            const double p = std::clamp(c[0], 0.0, 1.0);
            const double K = std::clamp(c[1], 1.0, k_hi);
            const double r = residual(p, K);
            if (r < best) {
                best = r;
                bp = p;
                bk = K;
                moved = true;
                break;
            }
        }
        if (!moved) {
            sp *= 0.5;
            sk *= 0.5;
        }
    }
    fit.p_hat = bp;
    fit.K_hat = bk;
    fit.residual = best;
    return fit;
}

}  // namespace hdtele
