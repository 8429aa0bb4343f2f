#include "hdtele/tomography.hpp"

#include "hdtele/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <random>

namespace hdtele {

namespace {

std::vector<Projector> computational(int d) {
    std::vector<Projector> out;
    for (int j = 0; j < d; ++j) out.push_back({StateVector::basis(d, j), "z" + std::to_string(j)});
    return out;
}

std::vector<Projector> mub(int d) {
    auto out = computational(d);
    const cplx I(0.0, 1.0);
    auto add = [&](int basis, int j, Eigen::VectorXcd v) {
        out.push_back({StateVector::normalized(std::move(v)), "b" + std::to_string(basis) + "_" + std::to_string(j)});
    };
    if (d == 2) {
        add(1, 0, Eigen::Vector2cd(1.0, 1.0));
        add(1, 1, Eigen::Vector2cd(1.0, -1.0));
        add(2, 0, Eigen::Vector2cd(1.0, I));
        add(2, 1, Eigen::Vector2cd(1.0, -I));
    } else if (d == 3) {
        const cplx w = std::exp(cplx(0.0, two_pi / 3.0));
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) {
                Eigen::VectorXcd v(3);
                for (int m = 0; m < 3; ++m) v(m) = std::pow(w, (k * m * m + j * m) % 3);
                add(k + 1, j, v);
            }
    } else if (d == 4) {
        // phases i^(m^T A m) (-1)^(j.m) over the bits m = (m1, m0) of the index
        const int forms[4][3] = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
        for (int f = 0; f < 4; ++f) {
            const auto [a, b, c] = forms[f];
            for (int j = 0; j < 4; ++j) {
                Eigen::VectorXcd v(4);
                for (int m = 0; m < 4; ++m) {
                    const int m1 = m >> 1;
                    const int m0 = m & 1;
                    const int j1 = j >> 1;
                    const int j0 = j & 1;
                    const int ipow = (a * m1 + b * m0 + 2 * c * m1 * m0) % 4;
                    const double sign = ((j1 * m1 + j0 * m0) % 2) ? -1.0 : 1.0;
                    v(m) = sign * std::pow(I, ipow);
                }
                add(f + 1, j, v);
            }
        }
    } else {
        throw InvalidArgument("complete MUB sets are available for d = 2, 3, 4 only");
    }
    return out;
}

std::vector<Projector> pairwise(int d) {
    if (d < 2) throw InvalidArgument("dimension must be at least 2");
    auto out = computational(d);
    const cplx phases[4] = {1.0, -1.0, cplx(0.0, 1.0), cplx(0.0, -1.0)};
    const char* names[4] = {"+", "-", "+i", "-i"};
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k)
            for (int s = 0; s < 4; ++s) {
                Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
                v(j) = 1.0;
                v(k) = phases[s];
                out.push_back({StateVector::normalized(std::move(v)),
                               "p" + std::to_string(j) + std::to_string(k) + names[s]});
            }
    return out;
}

// Real parameterisation of Hermitian d x d matrices.
Eigen::MatrixXcd hermitian_basis_element(int d, int idx) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    if (idx < d) {
        h(idx, idx) = 1.0;
        return h;
    }
    int r = idx - d;
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            if (r == 0) {
                h(j, k) = h(k, j) = 1.0;
                return h;
            }
            if (r == 1) {
                h(j, k) = cplx(0.0, -1.0);
                h(k, j) = cplx(0.0, 1.0);
                return h;
            }
            r -= 2;
        }
    return h;
}

DensityMatrix project_psd(const Eigen::MatrixXcd& X) {
    const Eigen::MatrixXcd H = 0.5 * (X + X.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    const double s = ev.sum();
    if (!(s > 0.0)) throw InvalidArgument("reconstruction has no positive part");
    ev /= s;
    Eigen::MatrixXcd rho = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
    return DensityMatrix(rho);
}

void check_records(const std::vector<ProjectionRecord>& records, int d) {
    if (records.empty()) throw InvalidArgument("no projection records");
    for (const auto& r : records) {
        if (r.projector.dim() != d) throw InvalidArgument("projector dimension mismatch");
        if (r.counts < 0.0) throw InvalidArgument("counts must be non-negative");
    }
}

DensityMatrix linear_inversion(const std::vector<ProjectionRecord>& records, int d) {
    check_records(records, d);
    const int np = d * d;
    Eigen::MatrixXd A(records.size(), np);
    Eigen::VectorXd c(records.size());
    std::vector<Eigen::MatrixXcd> basis;
    for (int p = 0; p < np; ++p) basis.push_back(hermitian_basis_element(d, p));
    for (std::size_t m = 0; m < records.size(); ++m) {
        const Eigen::VectorXcd& v = records[m].projector.amplitudes();
        for (int p = 0; p < np; ++p) A(m, p) = v.dot(basis[p] * v).real();
        c(m) = records[m].counts / records[m].duration;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < np) throw InvalidArgument("projector set is not informationally complete (rank-deficient)");
    const Eigen::VectorXd x = qr.solve(c);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(d, d);
    for (int p = 0; p < np; ++p) X += x(p) * basis[p];
    return project_psd(X);
}

}  // namespace

std::vector<Projector> projector_set(int d, ProjectorScheme scheme) {
    if (scheme == ProjectorScheme::mub_complete) return mub(d);
    return pairwise(d);
}

std::vector<ProjectionRecord> simulate_counts(const DensityMatrix& rho, const std::vector<Projector>& projectors,
                                              double total_counts, double accidental_rate, const CountOptions& opts) {
    if (!(total_counts > 0.0)) throw InvalidArgument("total counts must be positive");
    if (!(accidental_rate >= 0.0)) throw InvalidArgument("accidental rate must be non-negative");
    if (!(opts.duration > 0.0)) throw InvalidArgument("duration must be positive");
    std::mt19937_64 rng(opts.seed);
    std::vector<ProjectionRecord> out;
    for (const auto& p : projectors) {
        if (p.state.dim() != rho.dim()) throw InvalidArgument("projector dimension mismatch");
        const Eigen::VectorXcd& v = p.state.amplitudes();
        const double prob = std::max(0.0, v.dot(rho.matrix() * v).real());
        double mean = total_counts * prob + accidental_rate * opts.duration;
        if (opts.poisson) mean = static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
        out.push_back({p.state, p.label, mean, opts.duration});
    }
    return out;
}

MleResult reconstruct_mle(const std::vector<ProjectionRecord>& records, int d, const MleOptions& opts) {
    const DensityMatrix start = linear_inversion(records, d);
    std::vector<Eigen::MatrixXcd> proj;
    std::vector<double> rates;
    for (const auto& r : records) {
        proj.push_back(r.projector.amplitudes() * r.projector.amplitudes().adjoint());
        rates.push_back(r.counts / r.duration);
    }
    // gradient of sum f log p; zero-rate projectors drop out
    auto gradient = [&](const Eigen::MatrixXcd& rho) {
        Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t m = 0; m < proj.size(); ++m) {
            if (rates[m] == 0.0) continue;
            const double p = (proj[m] * rho).trace().real();
            R += (rates[m] / std::max(p, 1e-300)) * proj[m];
        }
        return Eigen::MatrixXcd(0.5 * (R + R.adjoint()));
    };
    // the likelihood is concave, so rho is optimal iff lambda_max(R) <= tr(R rho)
    auto gap = [&](const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& R) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R, Eigen::EigenvaluesOnly);
        return std::max(0.0, es.eigenvalues().maxCoeff() / (R * rho).trace().real() - 1.0);
    };

    Eigen::MatrixXcd rho = start.matrix();
    Eigen::MatrixXcd R = gradient(rho);
    double residual = gap(rho, R);
    if (residual <= opts.tolerance) return {start, 0, residual, true};

    // leave the boundary so the iteration can reach every direction
    rho = 0.999 * rho + 0.001 / d * Eigen::MatrixXcd::Identity(d, d);
    R = gradient(rho);
    residual = gap(rho, R);
    long it = 0;
    while (it < opts.max_iterations && residual > opts.tolerance) {
        Eigen::MatrixXcd next = R * rho * R;
        next = 0.5 * (next + next.adjoint());
        rho = next / next.trace().real();
        R = gradient(rho);
        residual = gap(rho, R);
        ++it;
    }
    return {project_psd(rho), it, residual, residual <= opts.tolerance};
}

DensityMatrix reconstruct(const std::vector<ProjectionRecord>& records, int d, ReconstructionMethod method) {
    if (method == ReconstructionMethod::linear_inversion) return linear_inversion(records, d);
    MleResult r = reconstruct_mle(records, d);
    if (!r.converged)
        throw ConvergenceError("likelihood iteration stopped after " + std::to_string(r.iterations) +
                                   " iterations, optimality gap " + format_number(r.residual),
                               r.iterations, r.residual);
    return r.rho;
}

double subspace_fidelity(const DensityMatrix& rho, const std::vector<int>& keep, const StateVector& target) {
    if (static_cast<int>(keep.size()) != target.dim()) throw InvalidArgument("target dimension must match the subspace");
    const int k = static_cast<int>(keep.size());
    Eigen::MatrixXcd sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (keep[i] < 0 || keep[i] >= rho.dim() || keep[j] < 0 || keep[j] >= rho.dim())
                throw InvalidArgument("subspace index out of range");
            sub(i, j) = rho.matrix()(keep[i], keep[j]);
        }
    const double tr = sub.trace().real();
    if (!(tr > 0.0)) throw InvalidArgument("subspace carries no weight");
    return std::clamp(target.amplitudes().dot(sub * target.amplitudes()).real() / tr, 0.0, 1.0);
}

Table density_table(const DensityMatrix& rho) {
    Table t;
    const int d = rho.dim();
    for (int j = 0; j < d; ++j) {
        t.columns.push_back("re_" + std::to_string(j));
        t.columns.push_back("im_" + std::to_string(j));
    }
    for (int i = 0; i < d; ++i) {
        std::vector<Cell> row;
        for (int j = 0; j < d; ++j) {
            row.emplace_back(rho.matrix()(i, j).real());
            row.emplace_back(rho.matrix()(i, j).imag());
        }
        t.add_row(std::move(row));
    }
    return t;
}

}  // namespace hdtele
