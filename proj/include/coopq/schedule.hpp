#pragma once

#include <functional>

#include "coopq/media.hpp"
#include "coopq/types.hpp"

namespace coopq {

// Time-dependent detuning: per-mode evolution under piecewise-constant
// schedules, the printed short/long-window asymptotics, and the beat
// observables.
//
// On a constant-alpha segment the mode amplitude follows the Riccati flow
//   dw/dt = -i [ V (1 + w)^2 + 2 alpha(t) w ],   w(0) = 0,
// whose two-component linearization has the closed-form propagator
//   M(tau) = cos(z tau) I + sin(z tau)/z * G,     z^2 = alpha(alpha + 2V),
//   G = i [ [-(V+alpha), -V], [V, V+alpha] ],
// with w = y1/y2.  Piecewise schedules compose these maps; the adaptive
// integrator provides an independent route through the same segments.

enum class EvolveMethod {
    mobius,   // exact per-segment propagator composition
    rk,       // adaptive Runge-Kutta on the Riccati equation
    checked,  // both; throws DivergenceError if they disagree beyond 10 tol
};

// Mode amplitude at time t (t within the schedule).
Complex mode_evolve(double V, const DetuningSchedule& sched, double t, double tol = 1e-9,
                    EvolveMethod method = EvolveMethod::mobius);

struct ModeTrajectory {
    double V = 0.0;
    std::vector<double> times;
    std::vector<Complex> w;
};

ModeTrajectory mode_trajectory(double V, const DetuningSchedule& sched,
                               const std::vector<double>& times, double tol = 1e-9,
                               EvolveMethod method = EvolveMethod::mobius);

// Population under a schedule: n1 = sum_m |w_m|^2/(1-|w_m|^2) over the
// modes of the decomposition.  Throws SingularPopulationError if any mode
// reaches |w| = 1.
PopulationResult population_schedule(const SpectralDecomposition& sd,
                                     const DetuningSchedule& sched, double t, double tol = 1e-9,
                                     EvolveMethod method = EvolveMethod::mobius);

// Single-mode population |w|^2/(1-|w|^2) for the collective mode.
double population_mode(double V, const DetuningSchedule& sched, double t, double tol = 1e-9,
                       EvolveMethod method = EvolveMethod::mobius);

// ── Printed asymptotics for the on-off-on switch protocol ────────────────

struct AsymptoticValue {
    double value = 0.0;
    bool coupling_regime_ok = false;  // V/alpha below threshold
    bool window_regime_ok = false;    // alpha * window length on the right side
};

// Short-window form  n1 ~ (V/alpha)^2 sin^2[(V+alpha)(t - dt)],
// valid for V << alpha and alpha dt << 1.  Rejects alpha = 0.
AsymptoticValue asymptotic_short_window(double V, double alpha, double t, double dt);

struct LongWindowValue {
    double raw = 0.0;       // with the cos alpha(t1+t2) bracket as printed
    double averaged = 0.0;  // rapid alpha oscillations averaged out
    bool coupling_regime_ok = false;
    bool window_regime_ok = false;
};

// Long-window form  n1 ~ V^2 dt^2 {1 + 2[1-cos V(t-t2)][1+cos alpha(t1+t2)]}
// for alpha dt >> 1; the averaged variant drops the second bracket.
// Requires t >= t2.
LongWindowValue asymptotic_long_window(double V, double alpha, double t, double t1, double t2);

// ── Beat observables ─────────────────────────────────────────────────────

// Ratio of the switched-schedule population to the unswitched (t2 = t1)
// population, both on the rank-one collective mode NV and both evaluated at
// the same absolute time t.  Requires t >= t2 >= t1 and NV != 0; reports a
// vanishing denominator.
double beat_ratio(double NV, double alpha, double t1, double t2, double t);

// Quadrature of observable(V) against a density histogram, trapezoidal on
// bin centers.  With `normalize` the result is divided by the density mass
// (a weighted mean); otherwise it is the raw integral.
double average_over_density(const std::function<double(double)>& observable,
                            const EigenvalueHistogram& density, bool normalize = false);
double average_over_density(const std::function<double(double)>& observable,
                            const std::function<double(double)>& density, double v_min,
                            double v_max, int points, bool normalize = false);

// Population n1(t) at time t for the switch schedule, averaged over one
// period of the rapid alpha oscillation by jittering both switch times
// (the window length stays fixed).
double jitter_averaged_population(double V, double alpha, double t1, double t2, double t,
                                  int phase_points = 32);

}  // namespace coopq
