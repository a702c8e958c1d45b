#include <doctest.h>

#include <cmath>
#include <numbers>

#include "coopq/analytic.hpp"
#include "coopq/media.hpp"
#include "coopq/rng.hpp"
#include "coopq/schedule.hpp"

using namespace coopq;

TEST_CASE("mode evolve: constant schedule reproduces the closed form") {
    for (double V : {0.1, 0.45})
        for (double alpha : {-0.45, 0.3, 1.2})
            for (double t : {0.4, 1.7, 2.9}) {
                const auto sched = DetuningSchedule::constant(alpha, 3.0);
                const Complex wm = mode_evolve(V, sched, t, 1e-9, EvolveMethod::mobius);
                CHECK(std::abs(wm - mode_amplitude(V, alpha, t)) < 1e-12);
                const Complex wr = mode_evolve(V, sched, t, 1e-9, EvolveMethod::rk);
                CHECK(std::abs(wr - mode_amplitude(V, alpha, t)) < 1e-8);  // 10 x tol
            }
}

TEST_CASE("mode evolve: zero coupling stays zero") {
    const auto sched = DetuningSchedule::switched(0.8, 1.0, 2.0, 5.0);
    CHECK(mode_evolve(0.0, sched, 4.0) == Complex(0, 0));
}

TEST_CASE("mode evolve: alpha = 0 closed form -iVt/(1+iVt)") {
    const double V = 0.4, t = 1.25;  // V t = 0.5
    const auto sched = DetuningSchedule::constant(0.0, 2.0);
    const Complex w = mode_evolve(V, sched, t);
    CHECK(std::abs(w - Complex(-0.2, -0.4)) < 1e-14);
    const Complex expected = Complex(0, -1) * V * t / (1.0 + Complex(0, 1) * V * t);
    CHECK(std::abs(w - expected) < 1e-14);
}

TEST_CASE("mode evolve: checked method flags nothing on smooth cases") {
    const auto sched = DetuningSchedule::switched(-0.3, 0.7, 1.9, 4.0);
    CHECK_NOTHROW(mode_evolve(0.3, sched, 3.5, 1e-9, EvolveMethod::checked));
}

TEST_CASE("mode evolve: segment consistency (propagator composition)") {
    Xoshiro256 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const double V = 0.8 * rng.uniform() - 0.4;
        const double alpha = 2.0 * rng.uniform() - 1.0;
        const double t = 0.3 + 2.5 * rng.uniform();
        const double t1 = t * rng.uniform();
        const auto whole = mode_evolve(V, DetuningSchedule::constant(alpha, t), t);
        const auto split =
            mode_evolve(V, DetuningSchedule::make({{t1 > 0 ? t1 : 0.1, alpha},
                                                   {t - t1 > 0 ? t - t1 : 0.1, alpha}}),
                        t);
        CHECK(std::abs(whole - split) < 1e-10);
    }
}

TEST_CASE("mode evolve: Riccati residual of the closed form") {
    const double h = 1e-5;
    for (double V : {0.25, 0.9})
        for (double alpha : {-0.7, 0.6})
            for (double t : {0.4, 1.2, 2.1}) {
                const Complex w = mode_amplitude(V, alpha, t);
                const Complex dw =
                    (mode_amplitude(V, alpha, t + h) - mode_amplitude(V, alpha, t - h)) /
                    (2.0 * h);
                const Complex one(1.0, 0.0);
                const Complex rhs =
                    Complex(0, -1) * (V * (one + w) * (one + w) + 2.0 * alpha * w);
                CHECK(std::abs(dw - rhs) <= 1e-8);
            }
}

TEST_CASE("population schedule: constant alpha equals the trace formula") {
    Xoshiro256 rng(4);
    MatrixXd raw = MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) raw(i, j) = raw(j, i) = 0.4 * (2 * rng.uniform() - 1);
    const auto sd = decompose(CouplingMatrix::from_raw(raw));
    const double alpha = 1.1, t = 1.6;
    const auto sched = DetuningSchedule::constant(alpha, 2.0);
    const auto r = population_schedule(sd, sched, t);
    CHECK(r.n1 == doctest::Approx(
                      population_from_tanglemeter(tanglemeter_matrix(sd, alpha, t)).n1)
                      .epsilon(1e-10));
    CHECK(population_schedule(sd, sched, 0.0).n1 == 0.0);
}

TEST_CASE("population schedule: singular when a mode saturates") {
    // resonant hyperbolic growth pushes |w| to 1 within double precision
    VectorXd ev(1);
    ev << 0.5;
    SpectralDecomposition sd{ev, MatrixXd::Identity(1, 1)};
    const auto sched = DetuningSchedule::constant(-0.5, 100.0);
    CHECK_THROWS_AS(population_schedule(sd, sched, 90.0), SingularPopulationError);
}

TEST_CASE("asymptotic short window: fixed points") {
    CHECK(asymptotic_short_window(0.01, 1.0, 0.1, 0.1).value == 0.0);  // t = dt
    CHECK(asymptotic_short_window(0.0, 1.0, 2.0, 0.1).value == 0.0);   // V = 0
    CHECK_THROWS_AS(asymptotic_short_window(0.1, 0.0, 1.0, 0.1), ValidationError);
    const auto v = asymptotic_short_window(0.01, 1.0, 2.0, 0.1);
    CHECK(v.coupling_regime_ok);
    CHECK(v.window_regime_ok);
    CHECK(!asymptotic_short_window(0.5, 1.0, 2.0, 5.0).window_regime_ok);
}

TEST_CASE("asymptotic short window: tracks the integrator deep in its regime") {
    // far inside the validity region (alpha dt = 0.01) the printed form
    // matches the schedule dynamics to about alpha*dt
    const double alpha = 1.0, V = 1e-3, dt = 0.01, t1 = 0.0;
    double peak = 0.0, worst = 0.0;
    for (int k = 0; k <= 60; ++k) {
        const double x = std::numbers::pi * k / 60.0;
        const double t = dt + x / (V + alpha);
        const auto sched = DetuningSchedule::switched(alpha, t1, t1 + dt, t + 1.0);
        const double n = population_mode(V, sched, t);
        const double a = asymptotic_short_window(V, alpha, t, dt).value;
        peak = std::max(peak, a);
        worst = std::max(worst, std::abs(n - a));
    }
    CHECK(worst <= 0.025 * peak);
}

TEST_CASE("asymptotic long window: printed limits") {
    // dt = 0: value 0; t = t2: V^2 dt^2 exactly
    CHECK(asymptotic_long_window(0.3, 1.0, 5.0, 2.0, 2.0).raw == 0.0);
    const auto v = asymptotic_long_window(0.01, 1.0, 21.0, 1.0, 21.0);
    CHECK(v.raw == doctest::Approx(0.01 * 0.01 * 20.0 * 20.0).epsilon(1e-12));
    CHECK(v.averaged == doctest::Approx(0.01 * 0.01 * 20.0 * 20.0).epsilon(1e-12));
    CHECK(v.window_regime_ok);
    CHECK_THROWS_AS(asymptotic_long_window(0.1, 1.0, 1.0, 0.5, 2.0), ValidationError);
}

TEST_CASE("beat ratio: unity on the t2 = t1 axis and guards") {
    for (double t1 : {0.4, 1.0, 2.3})
        CHECK(beat_ratio(0.3, -0.3, t1, t1, t1 + 0.9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(beat_ratio(0.0, -0.3, 1.0, 2.0, 3.0), ValidationError);
    CHECK_THROWS_AS(beat_ratio(0.3, -0.3, 2.0, 1.0, 3.0), ValidationError);
}

TEST_CASE("average over density: mass, odd observable, guards") {
    EigenvalueHistogram h;
    const int B = 40;
    h.bin_edges.resize(B + 1);
    h.density.resize(B);
    for (int b = 0; b <= B; ++b) h.bin_edges[static_cast<std::size_t>(b)] = -2.0 + 0.1 * b;
    for (int b = 0; b < B; ++b) {
        const double c = h.center(b);
        h.density[static_cast<std::size_t>(b)] = std::exp(-c * c);  // symmetric
    }
    const double mass = average_over_density([](double) { return 1.0; }, h);
    CHECK(mass > 0.0);
    const double odd = average_over_density([](double v) { return v; }, h);
    CHECK(std::abs(odd) < 1e-12 * mass);
    const double one = average_over_density([](double) { return 1.0; }, h, true);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-12));

    EigenvalueHistogram empty;
    CHECK_THROWS_AS(average_over_density([](double) { return 1.0; }, empty), ValidationError);
}

TEST_CASE("su(2) signature: post-switch population oscillates at the mode frequency") {
    // alpha-on/off/on schedule; n1(t2 + tau) carries spectral weight at the
    // dressed frequency z = sqrt(alpha(alpha+2V)) and its double
    const double V = 0.02, alpha = 1.0, t1 = 1.0, dt = 5.0;
    const double z = std::sqrt(alpha * (alpha + 2.0 * V));
    const double t2 = t1 + dt;
    const int M = 2048;
    const double span = 40.0 * std::numbers::pi;
    std::vector<double> n(M);
    const auto sched = DetuningSchedule::switched(alpha, t1, t2, t2 + span + 1.0);
    double mean = 0.0;
    for (int k = 0; k < M; ++k) {
        const double tau = span * k / M;
        n[static_cast<std::size_t>(k)] = population_mode(V, sched, t2 + tau);
        mean += n[static_cast<std::size_t>(k)];
    }
    mean /= M;
    double best_f = 0.0, best_a = 0.0;
    for (double f = 0.2; f <= 3.0; f += 0.005) {
        Complex acc(0, 0);
        for (int k = 0; k < M; ++k) {
            const double tau = span * k / M;
            acc += (n[static_cast<std::size_t>(k)] - mean) *
                   std::exp(Complex(0.0, -f * tau));
        }
        if (std::abs(acc) > best_a) {
            best_a = std::abs(acc);
            best_f = f;
        }
    }
    const bool near_z = std::abs(best_f - z) < 0.05;
    const bool near_2z = std::abs(best_f - 2.0 * z) < 0.05;
    CHECK((near_z || near_2z));
}

TEST_CASE("jitter averaging: deterministic and near V^2 dt^2 deep in the long-window regime") {
    const double V = 0.005, alpha = 1.0, t1 = 1.0, dt = 40.0;  // alpha dt = 40
    const double t2 = t1 + dt, t = t2;                          // right at switch-back
    const double a1 = jitter_averaged_population(V, alpha, t1, t2, t);
    const double a2 = jitter_averaged_population(V, alpha, t1, t2, t);
    CHECK(a1 == a2);
    CHECK(a1 == doctest::Approx(V * V * dt * dt).epsilon(0.05));
}
