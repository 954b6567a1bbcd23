#include <doctest.h>

#include <cmath>

#include "rabi/roots.hpp"

using namespace rabi::roots;

namespace {
auto never = [](double) { return false; };
auto unused_edge = [](double a, double) { return a; };
}  // namespace

TEST_CASE("upward bracket expansion from zero takes the first step") {
    auto f = [](double x) { return x * x - 2.0; };
    const auto b = expand_bracket(f, 0.0, f(0.0), true, 0.5, never, unused_edge);
    REQUIRE(b);
    CHECK(b->lo < std::sqrt(2.0));
    CHECK(b->hi > std::sqrt(2.0));
    CHECK(polish(f, *b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("downward expansion stays positive") {
    auto f = [](double x) { return std::log(x) + 3.0; };
    const auto b = expand_bracket(f, 1.0, f(1.0), false, 0.0, never, unused_edge);
    REQUIRE(b);
    CHECK(b->hi > 0.0);
    CHECK(polish(f, *b) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
}

TEST_CASE("no sign change within the step budget") {
    auto f = [](double x) { return 1.0 + x * x; };
    CHECK_FALSE(expand_bracket(f, 1.0, f(1.0), true, 0.5, never, unused_edge, 1.5, 10));
}

TEST_CASE("a stop point closes the bracket at the domain edge when the sign changed") {
    auto f = [](double x) { return x - 3.0; };
    auto stop = [](double x) { return x > 4.0; };
    auto edge = [](double, double) { return 4.0; };
    const auto b = expand_bracket(f, 1.0, f(1.0), true, 0.5, stop, edge);
    REQUIRE(b);
    CHECK(polish(f, *b) == doctest::Approx(3.0));

    auto g = [](double x) { return x - 5.0; };
    CHECK_FALSE(expand_bracket(g, 1.0, g(1.0), true, 0.5, stop, edge));
}

TEST_CASE("bisect_edge finds a predicate boundary") {
    const double edge = bisect_edge([](double x) { return x < 0.7; }, 0.0, 1.0);
    CHECK(edge == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(edge < 0.7);
}
