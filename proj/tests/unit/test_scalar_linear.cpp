#include "doctest.h"
#include "ultra/linear.hpp"

#include <cmath>
#include <random>

using namespace ultra;

TEST_CASE("scalars stay exact") {
    Scalar third = Scalar::parse("1/3");
    CHECK(third.exact());
    CHECK((third + third + third) == Scalar(1));
    CHECK(Scalar::parse("0.25").str() == "1/4");
    CHECK(Scalar::parse("-2.5").str() == "-5/2");
    CHECK_THROWS_AS(Scalar::parse("1/0"), std::invalid_argument);
}

TEST_CASE("floating scalars compare with tolerance") {
    Scalar x = Scalar::floating(0.1);
    CHECK_FALSE(x.exact());
    CHECK((x + Scalar::parse("1/10") - Scalar::floating(0.2)).is_zero());
    CHECK((x * Scalar(3)).exact() == false);
}

TEST_CASE("inverse powers") {
    CHECK(inverse_power(Scalar(2), Scalar(1)) == Scalar::parse("1/2"));
    CHECK(inverse_power(Scalar(4), Scalar::parse("1/2")) == Scalar::parse("1/2"));
    CHECK(inverse_power(Scalar(9), Scalar(0)) == Scalar(1));
    CHECK(inverse_power(Scalar(2), Scalar(10)).str() == "1/1024");
    Scalar irr = inverse_power(Scalar(2), Scalar::parse("1/2"));
    CHECK_FALSE(irr.exact());
    CHECK(std::abs(irr.to_double() - 0.7071067811865476) < 1e-12);
    CHECK_THROWS(inverse_power(Scalar(0), Scalar(1)));
}

TEST_CASE("row reduction") {
    std::vector<LinearRow> rows{{{1, 1}, 3}, {{1, -1}, 1}, {{2, 0}, 4}};
    std::vector<std::size_t> pivots;
    REQUIRE(row_reduce(rows, 2, pivots));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].b == Scalar(2));
    CHECK(rows[1].b == Scalar(1));
    std::vector<LinearRow> bad{{{1, 1}, 1}, {{2, 2}, 3}};
    CHECK_FALSE(row_reduce(bad, 2, pivots));
}

TEST_CASE("Fourier-Motzkin feasibility") {
    // x <= 1, -x <= -2 is empty
    CHECK_FALSE(fm_feasible({{{1}, 1}, {{-1}, -2}}, 1));
    // 0 <= x <= 1, 0 <= y, x + y <= 1
    CHECK(fm_feasible({{{1, 0}, 1}, {{-1, 0}, 0}, {{0, -1}, 0}, {{1, 1}, 1}}, 2));
    // strict: x < 0 and -x < 0
    CHECK_FALSE(fm_feasible({{{1}, 0, true}, {{-1}, 0, true}}, 1));
    CHECK(fm_feasible({{{1}, 0, false}, {{-1}, 0, false}}, 1));
}

TEST_CASE("solve_linear reports the lexicographic minimum and the dimension") {
    // x + y + z = 1, all nonnegative: a triangle
    LinearProblem p;
    p.variables = 3;
    p.equalities.push_back({{1, 1, 1}, 1});
    for (int i = 0; i < 3; ++i) {
        std::vector<Scalar> a(3, 0);
        a[i] = -1;
        p.inequalities.push_back({a, 0});
    }
    auto s = solve_linear(p);
    REQUIRE(s.feasible);
    CHECK(s.dimension == 2);
    CHECK(s.point[0] + s.point[1] + s.point[2] == Scalar(1));
    for (const auto& v : s.point) CHECK(v >= Scalar(0));

    // pin x = y through two inequalities: the dimension drops by one
    p.inequalities.push_back({{1, -1, 0}, 0});
    p.inequalities.push_back({{-1, 1, 0}, 0});
    auto t = solve_linear(p);
    REQUIRE(t.feasible);
    CHECK(t.dimension == 1);
    CHECK(t.point[0] == t.point[1]);
}

TEST_CASE("solve_linear on random boxes agrees with a vertex oracle") {
    // sum_i c_i x_i = s, 0 <= x_i <= 1 is feasible iff 0 <= s <= sum c_i for c_i > 0
    std::mt19937_64 rng(11);
    for (int round = 0; round < 40; ++round) {
        std::size_t n = 1 + rng() % 4;
        LinearProblem p;
        p.variables = n;
        std::vector<Scalar> c(n);
        Scalar total = 0;
        for (auto& ci : c) {
            ci = Scalar(static_cast<long long>(1 + rng() % 5));
            total += ci;
        }
        Scalar s = Scalar(static_cast<long long>(rng() % 25)) / Scalar(2);
        p.equalities.push_back({c, s});
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Scalar> up(n, 0), down(n, 0);
            up[i] = 1;
            down[i] = -1;
            p.inequalities.push_back({up, 1});
            p.inequalities.push_back({down, 0});
        }
        auto sol = solve_linear(p);
        bool expected = s <= total;
        CHECK(sol.feasible == expected);
        if (sol.feasible) {
            Scalar lhs = 0;
            for (std::size_t i = 0; i < n; ++i) lhs += c[i] * sol.point[i];
            CHECK(lhs == s);
        }
    }
}

TEST_CASE("too many free variables") {
    LinearProblem p;
    p.variables = 5;
    CHECK_THROWS_AS(solve_linear(p, 3), SizeLimit);
}
