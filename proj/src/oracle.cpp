#include "coopq/oracle.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "coopq/analytic.hpp"
#include "coopq/media.hpp"

namespace coopq {

namespace {

std::int64_t pow3(int n) {
    std::int64_t p = 1;
    for (int i = 0; i < n; ++i) p *= 3;
    return p;
}

void check_size(int n) {
    if (n < 1 || n > kMaxQutrits)
        throw ValidationError("oracle supports 1.." + std::to_string(kMaxQutrits) + " qutrits");
}

}  // namespace

StateVector::StateVector(int n_qutrits) : n_(n_qutrits) {
    check_size(n_qutrits);
    amps_.assign(static_cast<std::size_t>(pow3(n_qutrits)), Complex(0.0, 0.0));
}

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

StateVector StateVector::vacuum(int n_qutrits) {
    StateVector psi(n_qutrits);
    psi[vacuum_index(n_qutrits)] = Complex(1.0, 0.0);
    return psi;
}

int site_level(std::int64_t b, int site) {
    return static_cast<int>((b / pow3(site)) % 3);
}

std::int64_t with_site_level(std::int64_t b, int site, int digit) {
    const std::int64_t p = pow3(site);
    return b + (digit - site_level(b, site)) * p;
}

std::int64_t vacuum_index(int n_qutrits) {
    return (pow3(n_qutrits) - 1) / 2;  // every digit 1
}

StateVector state_from_tanglemeter(const TanglemeterMatrix& W) {
    const int n = W.size();
    check_size(n);
    const std::int64_t dim = pow3(n);

    StateVector result(n);
    std::vector<Complex> cur(static_cast<std::size_t>(dim), Complex(0, 0));
    cur[static_cast<std::size_t>(vacuum_index(n))] = Complex(1.0, 0.0);
    result[vacuum_index(n)] = Complex(1.0, 0.0);

    // exp(A)|O> = sum_k A^k/k! |O>; A = sum_{i != j} W_ij t_i^+ u_j^+ uses two
    // fresh middle-level sites per application, so the series ends by n/2.
    std::vector<Complex> next(static_cast<std::size_t>(dim));
    double factorial = 1.0;
    for (int order = 1; order <= n / 2; ++order) {
        std::fill(next.begin(), next.end(), Complex(0, 0));
        bool any = false;
        for (std::int64_t b = 0; b < dim; ++b) {
            const Complex amp = cur[static_cast<std::size_t>(b)];
            if (amp == Complex(0, 0)) continue;
            for (int i = 0; i < n; ++i) {
                if (site_level(b, i) != 1) continue;
                const std::int64_t bi = with_site_level(b, i, 2);  // t_i^+
                for (int j = 0; j < n; ++j) {
                    if (j == i || site_level(bi, j) != 1) continue;
                    const Complex wij = W.values(i, j);
                    if (wij == Complex(0, 0)) continue;
                    next[static_cast<std::size_t>(with_site_level(bi, j, 0))] += wij * amp;
                    any = true;
                }
            }
        }
        if (!any) break;
        factorial *= order;
        for (std::int64_t b = 0; b < dim; ++b)
            result[b] += next[static_cast<std::size_t>(b)] / factorial;
        cur.swap(next);
    }
    return result;
}

StateVector apply_hamiltonian(const StateVector& psi, const CouplingMatrix& V, double alpha,
                              double interaction_scale) {
    const int n = psi.n_qutrits();
    if (V.size() != n) throw ValidationError("apply_hamiltonian: size mismatch");
    const std::int64_t dim = psi.dim();
    StateVector out(n);

    for (std::int64_t b = 0; b < dim; ++b) {
        const Complex amp = psi[b];
        if (amp == Complex(0, 0)) continue;

        int excited = 0;
        std::int64_t rest = b;
        int digits[kMaxQutrits];
        for (int i = 0; i < n; ++i) {
            digits[i] = static_cast<int>(rest % 3);
            rest /= 3;
            if (digits[i] != 1) ++excited;
        }
        out[b] += alpha * excited * amp;

        // sum_{i != j} V_ji (u_j^+ + t_j^-)(u_i^- + t_i^+), applied right to
        // left: site i rises (0->1 or 1->2), then site j falls (1->0 or 2->1).
        for (int i = 0; i < n; ++i) {
            const int di = digits[i];
            if (di == 2) continue;  // neither u_i^- nor t_i^+ acts on level +1
            const std::int64_t bi = with_site_level(b, i, di + 1);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double v = interaction_scale * V(j, i);
                if (v == 0.0) continue;
                const int dj = digits[j];
                if (dj == 0) continue;  // neither u_j^+ nor t_j^- acts on level -1
                out[with_site_level(bi, j, dj - 1)] += v * amp;
            }
        }
    }
    return out;
}

namespace {

// One Lanczos step advance: psi <- exp(-i H dt) psi with an a-posteriori
// error estimate; full reorthogonalization (m is small).
struct LanczosResult {
    double err = 0.0;
};

LanczosResult lanczos_advance(StateVector& psi, const CouplingMatrix& V, double alpha, double dt,
                              int m, double interaction_scale) {
    const double beta0 = std::sqrt(psi.norm_sq());
    if (beta0 == 0.0) return {0.0};

    const std::int64_t dim = psi.dim();
    std::vector<StateVector> Q;
    Q.reserve(static_cast<std::size_t>(m));
    StateVector q0 = psi;
    for (std::int64_t b = 0; b < dim; ++b) q0[b] /= beta0;
    Q.push_back(std::move(q0));

    std::vector<double> a, bcoef;
    int built = 0;
    for (int k = 0; k < m; ++k) {
        StateVector w = apply_hamiltonian(Q[static_cast<std::size_t>(k)], V, alpha,
                                          interaction_scale);
        Complex ak(0, 0);
        for (std::int64_t b = 0; b < dim; ++b)
            ak += std::conj(Q[static_cast<std::size_t>(k)][b]) * w[b];
        a.push_back(ak.real());
        for (std::int64_t b = 0; b < dim; ++b) w[b] -= ak * Q[static_cast<std::size_t>(k)][b];
        if (k > 0) {
            for (std::int64_t b = 0; b < dim; ++b)
                w[b] -= bcoef.back() * Q[static_cast<std::size_t>(k - 1)][b];
        }
        // full reorthogonalization
        for (int j = 0; j <= k; ++j) {
            Complex c(0, 0);
            for (std::int64_t b = 0; b < dim; ++b)
                c += std::conj(Q[static_cast<std::size_t>(j)][b]) * w[b];
            for (std::int64_t b = 0; b < dim; ++b) w[b] -= c * Q[static_cast<std::size_t>(j)][b];
        }
        const double beta = std::sqrt(w.norm_sq());
        built = k + 1;
        if (beta < 1e-14 || k == m - 1) {
            bcoef.push_back(beta);
            break;
        }
        bcoef.push_back(beta);
        for (std::int64_t b = 0; b < dim; ++b) w[b] /= beta;
        Q.push_back(std::move(w));
    }

    // exp(-i dt T) e1 in the Krylov basis
    const int mm = built;
    MatrixXd T = MatrixXd::Zero(mm, mm);
    for (int k = 0; k < mm; ++k) {
        T(k, k) = a[static_cast<std::size_t>(k)];
        if (k + 1 < mm) {
            T(k, k + 1) = bcoef[static_cast<std::size_t>(k)];
            T(k + 1, k) = bcoef[static_cast<std::size_t>(k)];
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
    if (es.info() != Eigen::Success) throw EigensolverError("Lanczos tridiagonal solve failed");
    Eigen::VectorXcd phases(mm);
    for (int k = 0; k < mm; ++k)
        phases(k) = std::exp(Complex(0.0, -dt * es.eigenvalues()(k)));
    Eigen::VectorXcd coef =
        es.eigenvectors().cast<Complex>() *
        (phases.array() * es.eigenvectors().row(0).transpose().cast<Complex>().array()).matrix();

    StateVector next(psi.n_qutrits());
    for (int k = 0; k < mm; ++k) {
        const Complex c = beta0 * coef(k);
        for (std::int64_t b = 0; b < dim; ++b) next[b] += c * Q[static_cast<std::size_t>(k)][b];
    }
    psi = std::move(next);

    // residual coupling out of the Krylov space, scaled by the step
    const double err =
        (mm < m) ? 0.0 : std::abs(bcoef.back() * std::abs(coef(mm - 1)) * dt) * beta0;
    return {err};
}

StateVector evolve_dense(const StateVector& psi0, const CouplingMatrix& V,
                         const DetuningSchedule& sched, double t, double interaction_scale) {
    const int n = psi0.n_qutrits();
    if (n > kMaxDenseQutrits)
        throw ValidationError("dense evolution capped at " + std::to_string(kMaxDenseQutrits) +
                              " qutrits");
    const std::int64_t dim = psi0.dim();
    Eigen::VectorXcd v(dim);
    for (std::int64_t b = 0; b < dim; ++b) v(b) = psi0[b];

    double done = 0.0;
    for (const auto& seg : sched.segments()) {
        const double tau = std::min(seg.duration, t - done);
        if (tau <= 0.0) break;
        MatrixXcd H(dim, dim);
        StateVector e(n);
        for (std::int64_t col = 0; col < dim; ++col) {
            std::fill(e.amplitudes().begin(), e.amplitudes().end(), Complex(0, 0));
            e[col] = Complex(1.0, 0.0);
            const StateVector he = apply_hamiltonian(e, V, seg.alpha, interaction_scale);
            for (std::int64_t row = 0; row < dim; ++row) H(row, col) = he[row];
        }
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (H + H.adjoint()));
        if (es.info() != Eigen::Success) throw EigensolverError("dense H eigensolve failed");
        Eigen::VectorXcd phases(dim);
        for (std::int64_t k = 0; k < dim; ++k)
            phases(k) = std::exp(Complex(0.0, -tau * es.eigenvalues()(k)));
        v = es.eigenvectors() * (phases.array() * (es.eigenvectors().adjoint() * v).array()).matrix();
        done += tau;
        if (done >= t) break;
    }
    StateVector out(n);
    for (std::int64_t b = 0; b < dim; ++b) out[b] = v(b);
    return out;
}

}  // namespace

StateVector evolve(const StateVector& psi0, const CouplingMatrix& V,
                   const DetuningSchedule& sched, double t, const EvolveOptions& opts) {
    if (V.size() != psi0.n_qutrits()) throw ValidationError("evolve: size mismatch");
    if (t < 0.0 || t > sched.total_duration() + 1e-9 * std::max(1.0, sched.total_duration()))
        throw ValidationError("evolve: t outside the schedule");
    if (t == 0.0) return psi0;
    if (opts.use_dense) return evolve_dense(psi0, V, sched, t, opts.interaction_scale);

    const double norm0 = std::sqrt(psi0.norm_sq());
    StateVector psi = psi0;
    // crude spectral scale for the initial step size
    const double hscale =
        std::abs(sched.segments().front().alpha) * psi.n_qutrits() +
        V.values().cwiseAbs().maxCoeff() * psi.n_qutrits() * psi.n_qutrits() + 1.0;

    double done = 0.0;
    const double step_tol = opts.tol / std::max(1.0, 4.0 * t * hscale);
    for (const auto& seg : sched.segments()) {
        double tau = std::min(seg.duration, t - done);
        if (tau <= 0.0) break;
        double dt = std::min(tau, 2.0 * opts.krylov_dim / hscale);
        double s = 0.0;
        while (s < tau) {
            dt = std::min(dt, tau - s);
            StateVector trial = psi;
            const auto res =
                lanczos_advance(trial, V, seg.alpha, dt, opts.krylov_dim, opts.interaction_scale);
            if (res.err > step_tol * dt && dt > 1e-12) {
                dt *= 0.5;
                continue;
            }
            psi = std::move(trial);
            s += dt;
            if (res.err < 0.01 * step_tol * dt) dt *= 1.7;
        }
        done += tau;
        if (done >= t) break;
    }

    const double drift = std::abs(std::sqrt(psi.norm_sq()) - norm0) / std::max(norm0, 1e-300);
    if (drift > opts.tol) {
        std::ostringstream os;
        os << "evolve: unitarity drift " << drift << " exceeds tolerance " << opts.tol;
        throw DivergenceError(os.str());
    }
    return psi;
}

LevelPopulations measure_populations(const StateVector& psi) {
    const double ns = psi.norm_sq();
    if (ns == 0.0) throw ValidationError("measure_populations: zero-norm state");
    const int n = psi.n_qutrits();
    const std::int64_t dim = psi.dim();
    LevelPopulations out;
    for (std::int64_t b = 0; b < dim; ++b) {
        const double p = std::norm(psi[b]);
        if (p == 0.0) continue;
        std::int64_t rest = b;
        for (int i = 0; i < n; ++i) {
            const int d = static_cast<int>(rest % 3);
            rest /= 3;
            if (d == 0)
                out.n_lower += p;
            else if (d == 1)
                out.n_middle += p;
            else
                out.n_upper += p;
        }
    }
    out.n_lower /= ns;
    out.n_middle /= ns;
    out.n_upper /= ns;
    return out;
}

MatrixXcd extract_tanglemeter(const StateVector& psi) {
    const int n = psi.n_qutrits();
    const std::int64_t o = vacuum_index(n);
    const Complex a0 = psi[o];
    if (std::abs(a0) == 0.0)
        throw ValidationError("extract_tanglemeter: vanishing vacuum amplitude");
    MatrixXcd W = MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const std::int64_t b = with_site_level(with_site_level(o, i, 2), j, 0);
            W(i, j) = psi[b] / a0;
        }
    }
    return W;
}

CouplingMatrix collective_coupling(int n_qutrits, double collective) {
    check_size(n_qutrits);
    if (n_qutrits < 2) throw ValidationError("collective_coupling: need at least two qutrits");
    const double off = collective / (n_qutrits - 1);
    MatrixXd V = MatrixXd::Constant(n_qutrits, n_qutrits, off);
    V.diagonal().setZero();
    return CouplingMatrix::from_raw(V, Strictness::strict);
}

OracleReport compare_analytic_vs_exact(const CouplingMatrix& V_base,
                                       const std::vector<double>& scales, double alpha, double t,
                                       const EvolveOptions& opts) {
    if (scales.empty()) throw ValidationError("compare_analytic_vs_exact: no scales");
    const int n = V_base.size();
    OracleReport rep;
    rep.n_qutrits = n;
    rep.alpha = alpha;
    rep.t = t;

    const auto sched = DetuningSchedule::constant(alpha, t);
    for (double s : scales) {
        const CouplingMatrix V = CouplingMatrix::from_raw(s * V_base.values());
        const auto sd = decompose(V);

        const StateVector psi = evolve(StateVector::vacuum(n), V, sched, t, opts);
        const double n1_exact = measure_populations(psi).n_upper;
        const double n1_analytic = population_trace(sd, alpha, t);
        const double denom = std::max(std::abs(n1_exact), 1e-300);
        rep.errors.push_back({s, n1_exact, n1_analytic, std::abs(n1_exact - n1_analytic) / denom});

        if (s == scales.back()) {
            rep.norm_exact = psi.norm_sq();
            const auto W = tanglemeter_matrix(sd, alpha, t);
            rep.norm_formula = std::exp(W.weight());
            const MatrixXcd West = extract_tanglemeter(psi);
            double dev = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) dev = std::max(dev, std::abs(West(i, j) - W.values(i, j)));
            rep.tanglemeter_max_dev = dev;
        }
    }
    for (std::size_t k = 0; k + 1 < rep.errors.size(); ++k) {
        const double e0 = rep.errors[k].rel_error, e1 = rep.errors[k + 1].rel_error;
        const double r0 = rep.errors[k].scale, r1 = rep.errors[k + 1].scale;
        if (e1 > 0.0 && e0 > 0.0 && r1 > 0.0 && r0 > 0.0)
            rep.orders.push_back(std::log(e0 / e1) / std::log(r0 / r1));
    }
    return rep;
}

}  // namespace coopq
