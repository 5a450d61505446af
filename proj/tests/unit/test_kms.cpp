#include "doctest.h"
#include "support/oracles.hpp"

#include <algorithm>
#include <random>

using namespace ultra;

namespace {

EdgeRef E(const char* id) { return EdgeRef::single(id); }
VertexRef V(const char* id) { return VertexRef::named(id); }
SymbolicVertexSet one(const char* id) { return SymbolicVertexSet::single(V(id)); }
VertexAlgebra algebra(const std::string& name) { return VertexAlgebra(oracle::fixture(name).graph); }

EdgeWeight weight_of(const std::string& name) {
    auto doc = oracle::fixture(name);
    return doc.weights;
}

// Closed form for the one-edge example: m(r(e)) = 1/(1 + r), m(v0) = r/(1 + r).
Scalar mass_of_range(const Scalar& r) { return Scalar(1) / (Scalar(1) + r); }

}  // namespace

TEST_CASE("compiled conditions of the one-edge example") {
    auto alg = algebra("example_sink.json");
    auto sys = build_constraints(alg, weight_of("example_sink.json"), 1, 4);
    std::vector<Scalar> v0 = sys.form(one("v0"));
    std::vector<Scalar> re = sys.form(alg.graph().range(E("e")));
    bool has_m2 = false, has_m1 = false;
    for (const auto& c : sys.constraints) {
        if (c.sense != KmsConstraint::Sense::Equal) continue;
        std::vector<Scalar> expect(sys.variables.size());
        for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = v0[i] - Scalar::parse("1/2") * re[i];
        if (c.condition == "m2" && c.coeffs == expect && c.rhs.is_zero()) has_m2 = true;
        for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = v0[i] + re[i];
        if (c.condition == "m1" && c.coeffs == expect && c.rhs == Scalar(1)) has_m1 = true;
    }
    CHECK(has_m2);
    CHECK(has_m1);
}

TEST_CASE("compiled conditions of small graphs") {
    VertexAlgebra lone(graph_to_ultragraph({}, {"v"}));
    auto s = solve_kms(build_constraints(lone, EdgeWeight::uniform(2), 1, 0));
    REQUIRE(s.feasible);
    CHECK(s.m.vertices.at("v") == Scalar(1));

    // v -> w: m(v) = N^-beta m(w) and m(v) + m(w) = 1, compiled by hand
    VertexAlgebra pair(graph_to_ultragraph({{"v", "w"}}));
    auto sys = build_constraints(pair, EdgeWeight::uniform(3), 1, 0);
    std::vector<std::vector<Scalar>> expected{{1, Scalar(-1) / Scalar(3)}, {1, 1}};
    std::vector<std::vector<Scalar>> got;
    for (const auto& c : sys.constraints)
        if (c.sense == KmsConstraint::Sense::Equal) got.push_back(c.coeffs);
    for (const auto& row : expected) CHECK(std::find(got.begin(), got.end(), row) != got.end());
    auto sol = solve_kms(sys);
    REQUIRE(sol.feasible);
    CHECK(sol.m.vertices.at("v") == Scalar(1) / Scalar(4));
    CHECK(sol.m.vertices.at("w") == Scalar(3) / Scalar(4));
    CHECK(sol.dimension == 0);
}

TEST_CASE("the one-edge example at several temperatures") {
    auto alg = algebra("example_sink.json");
    for (const char* beta : {"0", "1", "2", "1/2"}) {
        auto sys = build_constraints(alg, weight_of("example_sink.json"), Scalar::parse(beta), 6);
        auto sol = solve_kms(sys);
        REQUIRE(sol.feasible);
        Scalar r = inverse_power(Scalar(2), Scalar::parse(beta));
        CHECK(sys.value(sol.assignment, alg.graph().range(E("e"))) == mass_of_range(r));
        CHECK(sol.m.vertices.at("v0") == r * mass_of_range(r));
        CHECK(sol.dimension >= 1);
        CHECK(check_assignment(sys, sol.assignment, 0).empty());
        CHECK(verify_m(sol.m, alg, weight_of("example_sink.json"), Scalar::parse(beta), 0).empty());
    }
    auto at_one = solve_kms(build_constraints(alg, weight_of("example_sink.json"), 1, 4));
    CHECK(at_one.m.vertices.at("v0").str() == "1/3");
}

TEST_CASE("an exitless loop admits no KMS data") {
    auto alg = algebra("exitless_loop.json");
    for (const char* beta : {"1/2", "1", "3"}) CHECK_FALSE(solve_kms(build_constraints(alg, EdgeWeight::uniform(2), Scalar::parse(beta), 0)).feasible);
    // at beta = 0 the loop condition is vacuous
    CHECK(solve_kms(build_constraints(alg, EdgeWeight::uniform(2), 0, 0)).feasible);
    auto rows = beta_sweep(alg, EdgeWeight::uniform(2), {Scalar::parse("1/2"), 1, 2}, 0);
    for (const auto& r : rows) CHECK_FALSE(r.feasible);
    CHECK(beta_sweep(alg, EdgeWeight::uniform(2), {}, 0).empty());
}

TEST_CASE("sweeps of the one-edge example") {
    auto alg = algebra("example_sink.json");
    auto rows = beta_sweep(alg, weight_of("example_sink.json"), {Scalar::parse("1/2"), 1, 2}, 5);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.feasible);
        CHECK(r.dimension >= 1);
        CHECK_FALSE(r.error);
    }
    auto bad = beta_sweep(algebra("emitter_singleton.json"), EdgeWeight::uniform(2), {1}, 5);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].error);
}

TEST_CASE("ground states") {
    auto alg = algebra("example_sink.json");
    auto g = solve_ground(alg, 4);
    REQUIRE(g.feasible);
    CHECK(g.m.vertices.at("v0") == Scalar(0));
    for (const auto& h : g.m.families.at("V").heads) CHECK(h == Scalar(0));
    REQUIRE(g.m.minimal_sets.size() == 1);
    CHECK(g.m.minimal_sets[0].second == Scalar(1));
    // all of the mass sits beyond every finite stage
    CHECK(g.m.families.at("V").tail == Scalar(0));

    auto sinks = solve_ground(algebra("all_sinks.json"), 0, GroundConvention::ZeroTemperature);
    REQUIRE(sinks.feasible);
    CHECK(sinks.dimension == 2);
    auto row = solve_ground(algebra("row.json"), 0, GroundConvention::ZeroTemperature);
    REQUIRE(row.feasible);
    CHECK(row.m.vertices.at("v") == Scalar(0));
    CHECK(row.m.vertices.at("w") == Scalar(0));
    CHECK(row.m.vertices.at("u") == Scalar(1));
    // the printed convention also zeroes sinks, leaving nothing for a finite graph
    CHECK_FALSE(solve_ground(algebra("row.json"), 0).feasible);
}

TEST_CASE("ground states vanish on finite regular sets") {
    for (const char* name : {"example_sink.json", "const_emitter.json", "cycles_example.json"}) {
        auto alg = algebra(name);
        auto sys = build_system(alg, EdgeWeight{}, 0, alg.graph().explicit_index_bound() + 3, true,
                                GroundConvention::Printed);
        auto sol = solve_kms(sys);
        if (!sol.feasible) continue;
        for (const auto& var : sys.variables) {
            if (var.kind != KmsVariable::Kind::Vertex) continue;
            auto a = SymbolicVertexSet::single(var.vertex);
            if (alg.is_finite_regular(a)) CHECK(sys.value(sol.assignment, a) == Scalar(0));
        }
    }
}

TEST_CASE("verifying candidate functions") {
    auto alg = algebra("example_sink.json");
    EdgeWeight n = weight_of("example_sink.json");
    auto geometric = oracle::geometric_family(Scalar::parse("1/2"), 20);
    CHECK(geometric.families.at("V").heads[0] == Scalar::parse("1/3"));
    CHECK(verify_m(geometric, alg, n, 1, Scalar::floating(1e-12)).empty());

    MFunction zeros;
    zeros.truncation = 3;
    auto z = verify_m(zeros, alg, n, 1, 0);
    REQUIRE_FALSE(z.empty());
    CHECK(std::any_of(z.begin(), z.end(), [](const Violation& v) { return v.condition == "m1"; }));

    MFunction claim;
    claim.truncation = 3;
    claim.vertices["v0"] = 1;
    claim.minimal_sets.emplace_back(alg.graph().range(E("e")), 0);
    auto c = verify_m(claim, alg, n, 1, 0);
    REQUIRE(c.size() == 1);
    CHECK(c[0].condition == "m2");
    CHECK(c[0].set == "{v0}");
}

TEST_CASE("emitters and unsupported shapes") {
    auto alg = algebra("const_emitter.json");
    auto sol = solve_kms(build_constraints(alg, weight_of("const_emitter.json"), 1, 4));
    REQUIRE(sol.feasible);
    // m(w) = N(h)^-1 m(u) with N(h) = 3
    CHECK(sol.m.vertices.at("w") * Scalar(3) == sol.m.vertices.at("u"));

    CHECK_THROWS_AS(build_constraints(algebra("emitter_singleton.json"), EdgeWeight::uniform(2), 1, 4), Unsupported);
    EdgeWeight light;
    light.values["e"] = 1;
    CHECK_THROWS_AS(build_constraints(algebra("example_sink.json"), light, 1, 4), std::invalid_argument);
}

TEST_CASE("kappa and mu") {
    auto alg = algebra("example_sink.json");
    EdgeWeight n = weight_of("example_sink.json");
    auto sys = build_constraints(alg, n, 1, 4);
    auto sol = solve_kms(sys);
    SemiringMeasure mu(alg, sys, sol.assignment);
    SymbolicVertexSet r = alg.graph().range(E("e"));
    CHECK(mu.kappa(Cylinder::plain({}, r)) == Scalar::parse("2/3"));
    CHECK(mu.kappa(Cylinder::plain({E("e")}, r)) == Scalar::parse("1/3"));
    CHECK(mu.mu({}) == Scalar(0));
    CHECK(mu.mu(region_Xc(alg, GroupWord::identity()).cylinders) == Scalar(1));

    Cylinder whole = Cylinder::plain({E("e")}, r);
    Cylinder inner = whole;
    inner.excluded_sinks = SymbolicVertexSet::of({VertexRef::indexed("V", 1), VertexRef::indexed("V", 3)});
    Scalar parts = mu.kappa(inner);
    for (const auto& c : semiring_diff(alg, whole, inner)) parts += mu.kappa(c);
    CHECK(parts == mu.kappa(whole));
}

TEST_CASE("negative mass is reported") {
    auto alg = algebra("example_sink.json");
    auto sys = build_constraints(alg, weight_of("example_sink.json"), 1, 4);
    MFunction bad;
    bad.truncation = 4;
    bad.vertices["v0"] = Scalar::parse("1/3");
    bad.families["V"].heads = {1, 0, 0, 0};
    bad.minimal_sets.emplace_back(alg.graph().range(E("e")), Scalar::parse("2/3"));
    SemiringMeasure mu(alg, sys, sys.assignment(bad));
    Cylinder c = Cylinder::plain({}, alg.graph().range(E("e")));
    c.excluded_sinks = SymbolicVertexSet::single(VertexRef::indexed("V", 1));
    CHECK_THROWS_AS(mu.kappa(c), NegativeMass);
}

namespace {

struct Model {
    const char* name;
    const char* beta;
};

const Model kModels[] = {{"example_sink.json", "1"}, {"example_sink.json", "1/2"}, {"const_emitter.json", "1"},
                         {"cycles_example.json", "1"}, {"row.json", "2"}};

}  // namespace

TEST_CASE("property: kappa is additive and scales under the partial action") {
    std::mt19937_64 rng(29);
    for (const auto& model : kModels) {
        auto alg = algebra(model.name);
        auto doc = oracle::fixture(model.name);
        Index t = alg.graph().explicit_index_bound() + 3;
        auto sys = build_constraints(alg, doc.weights, Scalar::parse(model.beta), t);
        auto sol = solve_kms(sys);
        REQUIRE(sol.feasible);
        SemiringMeasure mu(alg, sys, sol.assignment);
        Index small = alg.graph().explicit_index_bound() + 1;
        for (int k = 0; k < 20; ++k) {
            auto pair = oracle::random_nested_pair(alg, rng, small);
            Scalar sum = mu.kappa(pair.inner);
            for (const auto& c : semiring_diff(alg, pair.outer, pair.inner)) sum += mu.kappa(c);
            CHECK(sum == mu.kappa(pair.outer));
            Scalar split = 0;
            for (const auto& c : decompose_to_semiring(alg, pair.outer)) split += mu.kappa(c);
            CHECK(split == mu.kappa(pair.outer));
        }
        for (const auto& e : alg.graph().edges_up_to(small)) {
            SymbolicVertexSet r = alg.graph().range(e);
            for (const auto& v : oracle::semiring_cylinders(alg, rng, 1, small, 12)) {
                bool inside = v.path.empty() ? v.set.is_subset_of(r) : r.contains(alg.graph().source(v.path[0]));
                if (!inside) continue;
                Cylinder moved = theta_apply_cyl(alg, GroupWord::make({e}, {}), v);
                CHECK(mu.kappa(moved) == sys.factor(e) * mu.kappa(v));
            }
        }
    }
}

TEST_CASE("property: the KMS set is convex") {
    std::mt19937_64 rng(31);
    int pairs = 0;
    for (const auto& model : kModels) {
        auto alg = algebra(model.name);
        auto doc = oracle::fixture(model.name);
        auto sys = build_constraints(alg, doc.weights, Scalar::parse(model.beta), alg.graph().explicit_index_bound() + 3);
        for (int k = 0; k < 8; ++k) {
            auto a = oracle::random_feasible(sys, rng);
            auto b = oracle::random_feasible(sys, rng);
            if (!a || !b) continue;
            ++pairs;
            for (const char* lambda : {"0", "1/4", "1/2", "3/4", "1"}) {
                Scalar l = Scalar::parse(lambda);
                std::vector<Scalar> mix(a->size());
                for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = l * (*a)[i] + (Scalar(1) - l) * (*b)[i];
                CHECK(check_assignment(sys, mix, 0).empty());
                CHECK(verify_m(sys.mfunction(mix), alg, doc.weights, Scalar::parse(model.beta), 0).empty());
            }
        }
    }
    CHECK(pairs >= 20);
}

TEST_CASE("MFunction round trip through assignments") {
    auto alg = algebra("example_sink.json");
    auto sys = build_constraints(alg, weight_of("example_sink.json"), 1, 4);
    auto sol = solve_kms(sys);
    CHECK(sys.assignment(sol.m) == sol.assignment);
    MFunction unknown = sol.m;
    unknown.vertices["nope"] = 0;
    CHECK_THROWS(sys.assignment(unknown));
}
