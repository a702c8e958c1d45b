#include <doctest.h>

#include <cmath>
#include <complex>

#include "coopq/analytic.hpp"
#include "coopq/media.hpp"
#include "coopq/rng.hpp"

using namespace coopq;

namespace {

// Reference evaluation through an explicit complex square root; `flip`
// selects the other branch of z = sqrt(alpha(alpha+2V)).
Complex amplitude_via_branch(double V, double alpha, double t, bool flip) {
    if (t == 0.0 || V == 0.0) return {0.0, 0.0};
    Complex z = std::sqrt(Complex(alpha * (alpha + 2.0 * V), 0.0));
    if (flip) z = -z;
    const Complex zt = z * t;
    const Complex f = z * std::cos(zt) / std::sin(zt);
    return V / (Complex(0.0, 1.0) * f - V - alpha);
}

MatrixXd random_symmetric(int n, Xoshiro256& rng, double scale) {
    MatrixXd m = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = scale * (2.0 * rng.uniform() - 1.0);
    return m;
}

}  // namespace

TEST_CASE("mode amplitude: trivial zeros") {
    CHECK(mode_amplitude(0.7, 0.3, 0.0) == Complex(0, 0));
    CHECK(mode_amplitude(0.0, 0.3, 2.0) == Complex(0, 0));
}

TEST_CASE("mode amplitude: resonance gives -i tanh(V t)") {
    const double V = 0.7, t = 1.3;
    const Complex w = mode_amplitude(V, -V, t);
    CHECK(std::abs(w - Complex(0.0, -0.7211322540766999)) < 1e-12);
    // and against std::tanh at a few more points
    for (double tt : {0.1, 0.9, 2.4}) {
        const Complex ww = mode_amplitude(0.4, -0.4, tt);
        CHECK(std::abs(ww.real()) < 1e-14);
        CHECK(ww.imag() == doctest::Approx(-std::tanh(0.4 * tt)).epsilon(1e-12));
    }
}

TEST_CASE("mode amplitude: small-t expansion w -> -i V t") {
    const double V = 0.8, alpha = 1.7;
    for (double t : {1e-4, 1e-5, 1e-6}) {
        const Complex ratio = mode_amplitude(V, alpha, t) / Complex(0.0, -V * t);
        CHECK(std::abs(ratio - 1.0) < 10.0 * t);
    }
}

TEST_CASE("mode amplitude: branch invariance") {
    for (double V : {-0.9, -0.3, 0.2, 0.8, 1.6})
        for (double alpha : {-2.0, -0.6, 0.4, 1.3})
            for (double t : {0.2, 1.1, 3.0}) {
                const Complex w = mode_amplitude(V, alpha, t);
                const Complex wp = amplitude_via_branch(V, alpha, t, false);
                const Complex wm = amplitude_via_branch(V, alpha, t, true);
                CHECK(std::abs(wp - wm) < 1e-12);
                CHECK(std::abs(w - wp) < 1e-12);
            }
}

TEST_CASE("mode amplitude: series and trig regimes join smoothly") {
    // alpha(alpha+2V) t^2 straddles the series cut near 1e-8
    const double V = 0.5, t = 1.0;
    for (double a : {9.9e-9, 1.01e-8, 2e-8, 5e-9}) {
        const double alpha = a / (2.0 * V);  // z2 ~ a
        const Complex w = mode_amplitude(V, alpha, t);
        const Complex ref = amplitude_via_branch(V, alpha, t, false);
        CHECK(std::abs(w - ref) < 1e-13);
    }
}

TEST_CASE("mode amplitude: periodicity and zeros for real z") {
    const double V = 0.3, alpha = 1.1;
    const double z = std::sqrt(alpha * (alpha + 2.0 * V));
    const double period = std::numbers::pi / z;
    const Complex w1 = mode_amplitude(V, alpha, 0.7);
    const Complex w2 = mode_amplitude(V, alpha, 0.7 + period);
    CHECK(std::abs(w1 - w2) < 1e-10);
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(mode_amplitude(V, alpha, k * period)) < 1e-12);
}

TEST_CASE("tanglemeter matrix: zero coupling and t = 0") {
    VectorXd ev = VectorXd::Zero(4);
    SpectralDecomposition sd{ev, MatrixXd::Identity(4, 4)};
    CHECK(tanglemeter_matrix(sd, 0.7, 2.0).values.norm() == 0.0);

    Xoshiro256 rng(3);
    const auto V = CouplingMatrix::from_raw(random_symmetric(4, rng, 0.5));
    CHECK(tanglemeter_matrix(decompose(V), 0.7, 0.0).values.norm() == 0.0);
}

TEST_CASE("tanglemeter matrix: complex symmetric and normal") {
    Xoshiro256 rng(12);
    const auto V = CouplingMatrix::from_raw(random_symmetric(6, rng, 0.4));
    const auto W = tanglemeter_matrix(decompose(V), 0.9, 1.7).values;
    CHECK((W - W.transpose()).norm() < 1e-12 * W.norm());
    const MatrixXcd c = W * W.adjoint() - W.adjoint() * W;
    CHECK(c.norm() < 1e-12 * W.norm() * W.norm());
}

TEST_CASE("tanglemeter matrix: rank-one collective structure") {
    // hollow constant coupling: uniform mode at (N-1)V, the rest at -V
    const int n = 5;
    const double v = 0.12;
    MatrixXd raw = MatrixXd::Constant(n, n, v);
    raw.diagonal().setZero();
    const auto sd = decompose(CouplingMatrix::from_raw(raw));
    const auto W = tanglemeter_matrix(sd, 0.8, 1.2).values;

    const Complex w_top = mode_amplitude((n - 1) * v, 0.8, 1.2);
    const Complex w_rest = mode_amplitude(-v, 0.8, 1.2);
    const MatrixXcd P = MatrixXcd::Constant(n, n, 1.0 / n);  // uniform-mode projector
    const MatrixXcd expected = w_top * P + w_rest * (MatrixXcd::Identity(n, n) - P);
    CHECK((W - expected).norm() < 1e-12);
}

TEST_CASE("population from tanglemeter: trivial and scalar cases") {
    TanglemeterMatrix zero{MatrixXcd::Zero(3, 3)};
    const auto r = population_from_tanglemeter(zero);
    CHECK(r.n1 == 0.0);
    CHECK(r.norm == 1.0);
    CHECK(r.valid_regime);

    // rank-1 scalar reduction: n1 = |w|^2/(1-|w|^2), norm = e^{|w|^2}
    MatrixXcd W = MatrixXcd::Zero(2, 2);
    W(0, 1) = Complex(0.3, 0.4);  // |w| = 0.5
    const auto s = population_from_tanglemeter(TanglemeterMatrix{W});
    CHECK(s.n1 == doctest::Approx(0.25 / 0.75).epsilon(1e-12));
    CHECK(s.norm == doctest::Approx(std::exp(0.25)).epsilon(1e-12));
    CHECK(s.w_trace == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("population from tanglemeter: singular beyond |w| = 1") {
    MatrixXcd W = MatrixXcd::Zero(2, 2);
    W(0, 1) = Complex(1.0, 0.0);
    CHECK_THROWS_AS(population_from_tanglemeter(TanglemeterMatrix{W}),
                    SingularPopulationError);
}

TEST_CASE("population trace: limits") {
    VectorXd ev(3);
    ev << 0.2, -0.4, 0.7;
    CHECK(population_trace(ev, 0.9, 0.0) == 0.0);
    // alpha = 0: z -> 0 limit sum V^2 t^2
    const double t = 1.7;
    CHECK(population_trace(ev, 0.0, t) ==
          doctest::Approx(ev.squaredNorm() * t * t).epsilon(1e-12));
}

TEST_CASE("population identity: trace formula equals tanglemeter composition") {
    Xoshiro256 rng(2025);
    for (int trial = 0; trial < 30; ++trial) {
        const auto V = CouplingMatrix::from_raw(random_symmetric(10, rng, 0.3));
        const auto sd = decompose(V);
        const double alpha = 2.5 + rng.uniform();
        const double t = 0.2 + 2.0 * rng.uniform();
        const double direct = population_trace(sd, alpha, t);
        const double composed = population_from_tanglemeter(tanglemeter_matrix(sd, alpha, t)).n1;
        CHECK(std::abs(direct - composed) <= 1e-10 * std::max(direct, 1e-30));
    }
}

TEST_CASE("population collective: resonance identity") {
    for (double NV : {0.2, 0.7, 1.5})
        for (double t : {0.0, 0.4, 1.9, 3.0 / NV}) {
            const double n1 = population_collective(NV, -NV, t);
            const double sh = std::sinh(NV * t);
            CHECK(n1 == doctest::Approx(sh * sh).epsilon(1e-12));
        }
}

TEST_CASE("population collective: trivial zeros and the z -> 0 limit") {
    CHECK(population_collective(0.0, 0.7, 2.0) == 0.0);
    CHECK(population_collective(0.5, 0.7, 0.0) == 0.0);
    // alpha(2NV+alpha) = 0 at alpha = -2NV: limit (NV t)^2
    const double NV = 0.6, t = 1.3;
    CHECK(population_collective(NV, -2.0 * NV, t) ==
          doctest::Approx(NV * NV * t * t).epsilon(1e-9));
}

TEST_CASE("population collective: agrees with the trace formula on a rank-one spectrum") {
    VectorXd ev = VectorXd::Zero(7);
    ev(6) = 0.45;
    for (double alpha : {-0.45, -0.1, 0.8})
        for (double t : {0.3, 1.0, 2.2})
            CHECK(population_trace(ev, alpha, t) ==
                  doctest::Approx(population_collective(0.45, alpha, t)).epsilon(1e-12));
}

TEST_CASE("population collective: validity flag region") {
    // requirement: sinh^2(NV t) must stay well below N; here it reaches ~N
    const double NV = 0.5, t = 6.0;
    const double n1 = population_collective(NV, -NV, t);
    CHECK(n1 > 10.0);  // far outside the weak-deviation regime for small N
}

TEST_CASE("sweep collective: v = 0 column vanishes, determinism") {
    const auto rows1 = sweep_collective({0.0, 1.0}, {-1.0, 0.0, 1.0}, 3.0);
    const auto rows2 = sweep_collective({0.0, 1.0}, {-1.0, 0.0, 1.0}, 3.0);
    REQUIRE(rows1.size() == 6);
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        CHECK(rows1[i].n1 == rows2[i].n1);
        if (rows1[i].x == 0.0) CHECK(rows1[i].n1 == 0.0);
    }
}
