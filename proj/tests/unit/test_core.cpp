#include <doctest.h>

#include "coopq/types.hpp"

using namespace coopq;

TEST_CASE("schedule: construction and lookup") {
    const auto s = DetuningSchedule::make({{10.0, 0.3}});
    CHECK(s.total_duration() == doctest::Approx(10.0));
    CHECK(s.alpha_at(0.0) == 0.3);
    CHECK(s.alpha_at(9.999) == 0.3);

    const auto c = DetuningSchedule::make({{1.0, -0.3}});
    CHECK(c.alpha_at(0.5) == -0.3);
}

TEST_CASE("schedule: switch protocol is right-continuous") {
    const auto s = DetuningSchedule::switched(0.5, 1.0, 2.5, 4.0);
    CHECK(s.segments().size() == 3);
    CHECK(s.alpha_at(0.999999) == 0.5);
    CHECK(s.alpha_at(1.0) == 0.0);      // value from the segment starting at t1
    CHECK(s.alpha_at(2.5) == 0.5);
    CHECK(s.alpha_at(4.0) == 0.5);
    CHECK(s.total_duration() == doctest::Approx(4.0));
}

TEST_CASE("schedule: rejects bad segments") {
    CHECK_THROWS_AS(DetuningSchedule::make({}), ValidationError);
    CHECK_THROWS_AS(DetuningSchedule::make({{0.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(DetuningSchedule::make({{-1.0, 1.0}}), ValidationError);
}

TEST_CASE("schedule: integral is the closed-form segment sum") {
    const auto s = DetuningSchedule::make({{1.0, 0.5}, {2.0, 0.0}, {0.5, -1.0}});
    CHECK(s.integral(0.5) == doctest::Approx(0.25));
    CHECK(s.integral(1.0) == doctest::Approx(0.5));
    CHECK(s.integral(2.7) == doctest::Approx(0.5));
    CHECK(s.integral(3.5) == doctest::Approx(0.5 - 0.5));
}

TEST_CASE("coupling: canonical pair accepted") {
    MatrixXd raw(2, 2);
    raw << 0.0, 0.4, 0.4, 0.0;
    const auto V = CouplingMatrix::from_raw(raw);
    CHECK(V(0, 1) == 0.4);
    CHECK(V(1, 0) == 0.4);
}

TEST_CASE("coupling: strict mode rejects asymmetry") {
    MatrixXd raw(2, 2);
    raw << 0.0, 1.0, 2.0, 0.0;
    CHECK_THROWS_AS(CouplingMatrix::from_raw(raw, Strictness::strict), ValidationError);
    std::vector<std::string> warnings;
    const auto V = CouplingMatrix::from_raw(raw, Strictness::lenient, &warnings);
    CHECK(V(0, 1) == doctest::Approx(1.5));
    CHECK(warnings.size() == 1);
}

TEST_CASE("coupling: nonzero diagonal zeroed with a warning") {
    MatrixXd raw(2, 2);
    raw << 1.0, 0.4, 0.4, 1.0;
    std::vector<std::string> warnings;
    const auto V = CouplingMatrix::from_raw(raw, Strictness::strict, &warnings);
    CHECK(V(0, 0) == 0.0);
    CHECK(V(1, 1) == 0.0);
    REQUIRE(warnings.size() == 1);
}

TEST_CASE("coupling: rejects non-square and non-finite input") {
    CHECK_THROWS_AS(CouplingMatrix::from_raw(MatrixXd::Zero(2, 3)), ValidationError);
    MatrixXd bad = MatrixXd::Zero(2, 2);
    bad(0, 1) = bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(CouplingMatrix::from_raw(bad), ValidationError);
}

TEST_CASE("coupling: validation is idempotent") {
    MatrixXd raw(3, 3);
    raw << 0.5, 0.1, -0.2, 0.1, 0.0, 0.7, -0.2, 0.7, -0.3;
    const auto v1 = CouplingMatrix::from_raw(raw, Strictness::lenient);
    const auto v2 = CouplingMatrix::from_raw(v1.values(), Strictness::strict);
    CHECK((v1.values() - v2.values()).norm() == 0.0);
}
