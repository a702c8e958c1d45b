#include "coopq/analytic.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace coopq {

namespace detail {

// Below this value of |z^2| t^2 the trig quotients are evaluated by series;
// the switch point balances series truncation against cancellation near the
// z^2 = 0 surface.
constexpr double kSeriesCut = 1e-8;

double cot_scaled(double z2, double t) {
    assert(t > 0.0);
    const double u = z2 * t * t;
    if (std::abs(u) < kSeriesCut) {
        // z cot(z t) = 1/t - z^2 t/3 - z^4 t^3/45 - 2 z^6 t^5/945 + ...
        return 1.0 / t - z2 * t * (1.0 / 3.0 + u * (1.0 / 45.0 + u * (2.0 / 945.0)));
    }
    if (z2 > 0.0) {
        const double z = std::sqrt(z2);
        return z * std::cos(z * t) / std::sin(z * t);
    }
    const double y = std::sqrt(-z2);
    return y / std::tanh(y * t);
}

double sinc_scaled(double z2, double t) {
    const double u = z2 * t * t;
    if (std::abs(u) < kSeriesCut) {
        return t * (1.0 - u * (1.0 / 6.0 - u * (1.0 / 120.0)));
    }
    if (z2 > 0.0) {
        const double z = std::sqrt(z2);
        return std::sin(z * t) / z;
    }
    const double y = std::sqrt(-z2);
    const double yt = y * t;
    if (yt > 350.0) {
        std::ostringstream os;
        os << "hyperbolic growth overflow: |z| t = " << yt;
        throw DivergenceError(os.str());
    }
    return std::sinh(yt) / y;
}

double cos_scaled(double z2, double t) {
    const double u = z2 * t * t;
    if (std::abs(u) < kSeriesCut) return 1.0 - 0.5 * u * (1.0 - u / 12.0);
    if (z2 > 0.0) return std::cos(std::sqrt(z2) * t);
    const double yt = std::sqrt(-z2) * t;
    if (yt > 350.0) {
        std::ostringstream os;
        os << "hyperbolic growth overflow: |z| t = " << yt;
        throw DivergenceError(os.str());
    }
    return std::cosh(yt);
}

}  // namespace detail

Complex mode_amplitude(double V, double alpha, double t) {
    if (!(std::isfinite(V) && std::isfinite(alpha) && std::isfinite(t)) || t < 0.0)
        throw ValidationError("mode_amplitude: inputs must be finite, t >= 0");
    if (t == 0.0 || V == 0.0) return Complex(0.0, 0.0);

    const double z2 = alpha * (alpha + 2.0 * V);
    const double f = detail::cot_scaled(z2, t);
    if (!std::isfinite(f)) return Complex(0.0, 0.0);  // cot pole: w -> 0

    // w = V / (i f - V - alpha)
    const double re = -(V + alpha);
    const double den = re * re + f * f;
    if (den == 0.0) {
        std::ostringstream os;
        os << "mode_amplitude pole at V=" << V << " alpha=" << alpha << " t=" << t;
        throw DivergenceError(os.str());
    }
    return Complex(V * re / den, -V * f / den);
}

TanglemeterMatrix tanglemeter_matrix(const SpectralDecomposition& sd, double alpha, double t) {
    const int n = sd.size();
    Eigen::VectorXcd w(n);
    for (int m = 0; m < n; ++m) w(m) = mode_amplitude(sd.eigenvalues(m), alpha, t);
    MatrixXcd W = sd.modes.cast<Complex>() * w.asDiagonal() *
                  sd.modes.transpose().cast<Complex>();
    return TanglemeterMatrix{std::move(W)};
}

PopulationResult population_from_tanglemeter(const TanglemeterMatrix& W) {
    const int n = W.size();
    const MatrixXcd P = W.values * W.values.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (P + P.adjoint()));
    if (es.info() != Eigen::Success)
        throw EigensolverError("WW+ eigendecomposition failed to converge");

    PopulationResult out;
    for (int m = 0; m < n; ++m) {
        const double lam = std::max(0.0, es.eigenvalues()(m));
        if (lam >= 1.0) {
            std::ostringstream os;
            os << "population formula singular: spectral radius of WW+ = " << lam;
            throw SingularPopulationError(os.str());
        }
        out.w_trace += lam;
        out.n1 += lam / (1.0 - lam);
    }
    out.norm = std::exp(out.w_trace);
    out.valid_regime = out.w_trace < 0.1 * n;
    return out;
}

double population_trace(const VectorXd& eigenvalues, double alpha, double t) {
    if (!(std::isfinite(alpha) && std::isfinite(t)) || t < 0.0)
        throw ValidationError("population_trace: inputs must be finite, t >= 0");
    if (t == 0.0) return 0.0;
    double n1 = 0.0;
    for (int m = 0; m < eigenvalues.size(); ++m) {
        const double V = eigenvalues(m);
        const double s = detail::sinc_scaled(alpha * (alpha + 2.0 * V), t);
        n1 += V * V * s * s;
    }
    return n1;
}

double population_trace(const SpectralDecomposition& sd, double alpha, double t) {
    return population_trace(sd.eigenvalues, alpha, t);
}

double population_collective(double NV, double alpha, double t) {
    if (!(std::isfinite(NV) && std::isfinite(alpha) && std::isfinite(t)) || t < 0.0)
        throw ValidationError("population_collective: inputs must be finite, t >= 0");
    if (NV == 0.0 || t == 0.0) return 0.0;

    // Deliberately a standalone evaluation (explicit real branching) rather
    // than a call into population_trace, so the rank-one consistency test
    // compares two independent routes.
    const double z2 = alpha * (2.0 * NV + alpha);
    const double u = z2 * t * t;
    if (std::abs(u) < 1e-8) {
        const double s = t * (1.0 - u / 6.0);
        return NV * NV * s * s;  // z -> 0 limit: (NV t)^2
    }
    if (z2 > 0.0) {
        const double z = std::sqrt(z2);
        const double s = std::sin(z * t);
        return NV * NV * s * s / z2;
    }
    const double y = std::sqrt(-z2);
    if (y * t > 350.0) {
        std::ostringstream os;
        os << "population_collective overflow: |z| t = " << y * t;
        throw DivergenceError(os.str());
    }
    const double s = std::sinh(y * t);
    return NV * NV * s * s / (y * y);
}

std::vector<SweepPoint> sweep_collective(const std::vector<double>& v_grid,
                                         const std::vector<double>& alpha_grid, double t) {
    std::vector<SweepPoint> out;
    out.reserve(v_grid.size() * alpha_grid.size());
    for (double v : v_grid)
        for (double a : alpha_grid) out.push_back({v, a, population_collective(v, a, t)});
    return out;
}

std::vector<SweepPoint> sweep_ensemble(const std::vector<VectorXd>& spectra, int n_dipoles,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& alpha_grid, bool scaled_axes) {
    if (spectra.empty()) throw ValidationError("sweep_ensemble: no spectra");
    const double unit = std::pow(static_cast<double>(n_dipoles), 1.5);
    std::vector<SweepPoint> out;
    out.reserve(t_grid.size() * alpha_grid.size());
    for (double tg : t_grid) {
        const double t = scaled_axes ? tg / unit : tg;
        for (double ag : alpha_grid) {
            const double a = scaled_axes ? ag * unit : ag;
            double acc = 0.0;
            for (const auto& ev : spectra) acc += population_trace(ev, a, t);
            out.push_back({tg, ag, acc / static_cast<double>(spectra.size())});
        }
    }
    return out;
}

}  // namespace coopq
