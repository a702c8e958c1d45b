#include "coopq/schedule.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <sstream>

#include "coopq/analytic.hpp"

namespace coopq {

namespace {

// 2x2 complex propagator of the linearized mode dynamics over one
// constant-alpha segment; det M = 1.
struct Mat2c {
    Complex a, b, c, d;

    Mat2c operator*(const Mat2c& r) const {
        return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
    }
};

Mat2c segment_propagator(double V, double alpha, double tau) {
    const double z2 = alpha * (alpha + 2.0 * V);
    const double co = detail::cos_scaled(z2, tau);
    const double s = detail::sinc_scaled(z2, tau);
    const Complex i(0.0, 1.0);
    return {co - i * s * (V + alpha), -i * s * V, i * s * V, co + i * s * (V + alpha)};
}

Complex mobius_evolve(double V, const DetuningSchedule& sched, double t) {
    Mat2c M{1.0, 0.0, 0.0, 1.0};
    double done = 0.0;
    for (const auto& seg : sched.segments()) {
        const double tau = std::min(seg.duration, t - done);
        if (tau <= 0.0) break;
        M = segment_propagator(V, seg.alpha, tau) * M;
        done += tau;
        if (done >= t) break;
    }
    const double denom = std::abs(M.d);
    if (denom < 1e-300) {
        std::ostringstream os;
        os << "mode_evolve pole (Riccati blow-up) at t = " << t;
        throw DivergenceError(os.str());
    }
    return M.b / M.d;
}

// Dormand-Prince 5(4) on the Riccati equation inside one constant-alpha
// segment.  Absolute error control on w.
Complex rk_segment(double V, double alpha, Complex w0, double tau, double tol) {
    auto f = [&](Complex w) {
        const Complex one(1.0, 0.0);
        return Complex(0.0, -1.0) * (V * (one + w) * (one + w) + 2.0 * alpha * w);
    };
    const double scale = std::max({std::abs(V), std::abs(alpha), 1.0});
    double h = std::min(tau, 0.1 / scale);
    double s = 0.0;
    Complex w = w0;
    int steps = 0;
    while (s < tau) {
        if (++steps > 2000000)
            throw DivergenceError("Riccati integrator exceeded step budget");
        h = std::min(h, tau - s);
        const Complex k1 = f(w);
        const Complex k2 = f(w + h * (1.0 / 5.0) * k1);
        const Complex k3 = f(w + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const Complex k4 = f(w + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const Complex k5 = f(w + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                      64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        const Complex k6 = f(w + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                      46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                      5103.0 / 18656.0 * k5));
        const Complex w5 = w + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                                    2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const Complex k7 = f(w5);
        const Complex w4 = w + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                    393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                    187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
        const double err = std::abs(w5 - w4);
        if (err <= tol * 0.5 || h <= 1e-14) {
            s += h;
            w = w5;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
                std::ostringstream os;
                os << "Riccati blow-up near segment time " << s;
                throw DivergenceError(os.str());
            }
        }
        const double grow = err > 0.0 ? 0.9 * std::pow(tol * 0.5 / err, 0.2) : 2.0;
        h *= std::min(2.0, std::max(0.2, grow));
    }
    return w;
}

Complex rk_evolve(double V, const DetuningSchedule& sched, double t, double tol) {
    Complex w(0.0, 0.0);
    double done = 0.0;
    // per-segment step error budget, conservative
    const double seg_tol = tol / (2.0 + sched.segments().size());
    for (const auto& seg : sched.segments()) {
        const double tau = std::min(seg.duration, t - done);
        if (tau <= 0.0) break;
        w = rk_segment(V, seg.alpha, w, tau, seg_tol);
        done += tau;
        if (done >= t) break;
    }
    return w;
}

double population_of(Complex w) {
    const double a = std::norm(w);
    if (a >= 1.0) {
        std::ostringstream os;
        os << "population singular: |w|^2 = " << a;
        throw SingularPopulationError(os.str());
    }
    return a / (1.0 - a);
}

}  // namespace

Complex mode_evolve(double V, const DetuningSchedule& sched, double t, double tol,
                    EvolveMethod method) {
    if (t < 0.0 || t > sched.total_duration() + 1e-9 * std::max(1.0, sched.total_duration()))
        throw ValidationError("mode_evolve: t outside the schedule");
    if (V == 0.0 || t == 0.0) return Complex(0.0, 0.0);

    switch (method) {
        case EvolveMethod::mobius:
            return mobius_evolve(V, sched, t);
        case EvolveMethod::rk:
            return rk_evolve(V, sched, t, tol);
        case EvolveMethod::checked: {
            const Complex wm = mobius_evolve(V, sched, t);
            const Complex wr = rk_evolve(V, sched, t, tol);
            if (std::abs(wm - wr) > 10.0 * tol) {
                std::ostringstream os;
                os << "mode_evolve routes disagree: |mobius - rk| = " << std::abs(wm - wr);
                throw DivergenceError(os.str());
            }
            return wm;
        }
    }
    return Complex(0.0, 0.0);
}

ModeTrajectory mode_trajectory(double V, const DetuningSchedule& sched,
                               const std::vector<double>& times, double tol,
                               EvolveMethod method) {
    ModeTrajectory tr;
    tr.V = V;
    tr.times = times;
    tr.w.reserve(times.size());
    for (double t : times) tr.w.push_back(mode_evolve(V, sched, t, tol, method));
    return tr;
}

PopulationResult population_schedule(const SpectralDecomposition& sd,
                                     const DetuningSchedule& sched, double t, double tol,
                                     EvolveMethod method) {
    PopulationResult out;
    for (int m = 0; m < sd.size(); ++m) {
        const Complex w = mode_evolve(sd.eigenvalues(m), sched, t, tol, method);
        const double a = std::norm(w);
        out.w_trace += a;
        out.n1 += population_of(w);
    }
    out.norm = std::exp(out.w_trace);
    out.valid_regime = out.w_trace < 0.1 * sd.size();
    return out;
}

double population_mode(double V, const DetuningSchedule& sched, double t, double tol,
                       EvolveMethod method) {
    return population_of(mode_evolve(V, sched, t, tol, method));
}

AsymptoticValue asymptotic_short_window(double V, double alpha, double t, double dt) {
    if (alpha == 0.0) throw ValidationError("asymptotic_short_window: alpha must be nonzero");
    if (dt < 0.0 || t < 0.0) throw ValidationError("asymptotic_short_window: negative time");
    AsymptoticValue out;
    const double s = std::sin((V + alpha) * (t - dt));
    out.value = (V * V) / (alpha * alpha) * s * s;
    out.coupling_regime_ok = std::abs(V) <= 0.1 * std::abs(alpha);
    out.window_regime_ok = std::abs(alpha) * dt <= 0.5;
    return out;
}

LongWindowValue asymptotic_long_window(double V, double alpha, double t, double t1, double t2) {
    if (!(t2 >= t1 && t >= t2)) throw ValidationError("asymptotic_long_window: need t >= t2 >= t1");
    const double dt = t2 - t1;
    LongWindowValue out;
    const double base = V * V * dt * dt;
    const double slow = 2.0 * (1.0 - std::cos(V * (t - t2)));
    out.raw = base * (1.0 + slow * (1.0 + std::cos(alpha * (t1 + t2))));
    out.averaged = base * (1.0 + slow);
    out.coupling_regime_ok = std::abs(V) <= 0.1 * std::abs(alpha);
    out.window_regime_ok = std::abs(alpha) * dt >= 10.0;
    return out;
}

double beat_ratio(double NV, double alpha, double t1, double t2, double t) {
    if (NV == 0.0) throw ValidationError("beat_ratio: NV = 0 leaves 0/0 undefined");
    if (!(t >= t2 && t2 >= t1 && t1 >= 0.0))
        throw ValidationError("beat_ratio: need t >= t2 >= t1 >= 0");

    const auto switched = DetuningSchedule::switched(alpha, t1, t2, t);
    const double num = population_mode(NV, switched, t);
    const auto constant = DetuningSchedule::constant(alpha, t);
    const double den = population_mode(NV, constant, t);
    if (den == 0.0) {
        std::ostringstream os;
        os << "beat_ratio: unswitched population vanishes at t = " << t;
        throw DivergenceError(os.str());
    }
    return num / den;
}

double average_over_density(const std::function<double(double)>& observable,
                            const EigenvalueHistogram& density, bool normalize) {
    const int B = density.bins();
    if (B < 2) throw ValidationError("average_over_density: empty histogram");
    const double w = density.bin_width();
    double acc = 0.0, mass = 0.0;
    for (int b = 0; b < B; ++b) {
        const double trap = (b == 0 || b == B - 1) ? 0.5 : 1.0;  // trapezoid on bin centers
        const double g = density.density[static_cast<std::size_t>(b)];
        acc += trap * w * g * observable(density.center(b));
        mass += trap * w * g;
    }
    if (!normalize) return acc;
    if (mass <= 0.0) throw ValidationError("average_over_density: zero density mass");
    return acc / mass;
}

double average_over_density(const std::function<double(double)>& observable,
                            const std::function<double(double)>& density, double v_min,
                            double v_max, int points, bool normalize) {
    if (points < 2) throw ValidationError("average_over_density: need at least two points");
    const double h = (v_max - v_min) / (points - 1);
    double acc = 0.0, mass = 0.0;
    for (int i = 0; i < points; ++i) {
        const double v = v_min + i * h;
        const double trap = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        const double g = density(v);
        acc += trap * h * g * observable(v);
        mass += trap * h * g;
    }
    if (!normalize) return acc;
    if (mass <= 0.0) throw ValidationError("average_over_density: zero density mass");
    return acc / mass;
}

double jitter_averaged_population(double V, double alpha, double t1, double t2, double t,
                                  int phase_points) {
    if (phase_points < 1) throw ValidationError("jitter_averaged_population: phase_points >= 1");
    if (alpha == 0.0) throw ValidationError("jitter_averaged_population: alpha must be nonzero");
    // Shifting both switch times by delta advances the phase alpha(t1+t2) by
    // 2 alpha delta; one period needs delta spanning pi/|alpha|.
    const double period = std::numbers::pi / std::abs(alpha);
    const double post = t - t2;  // elapsed time after the switch-back, held fixed
    double acc = 0.0;
    for (int k = 0; k < phase_points; ++k) {
        const double d = period * (static_cast<double>(k) / phase_points);
        const auto sched = DetuningSchedule::switched(alpha, t1 + d, t2 + d, t + d);
        acc += population_mode(V, sched, t2 + d + post);
    }
    return acc / phase_points;
}

}  // namespace coopq
