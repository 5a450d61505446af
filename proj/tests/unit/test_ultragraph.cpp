#include "doctest.h"
#include "support/oracles.hpp"

#include <random>

using namespace ultra;

namespace {

VertexAlgebra algebra(const std::string& name) { return VertexAlgebra(oracle::fixture(name).graph); }

SymbolicVertexSet named(std::initializer_list<const char*> ids) {
    std::vector<VertexRef> refs;
    for (const char* id : ids) refs.push_back(VertexRef::named(id));
    return SymbolicVertexSet::of(refs);
}

const char* kShiftFamily = R"j({
  "version": "1",
  "vertex_families": [{"id": "F", "base_index": 0}],
  "vertices": [],
  "edges": [],
  "edge_families": [
    {"id": "e", "source": {"Indexed": {"family": "F", "offset": 0}},
     "range": {"IndexedRefs": [{"family": "F", "offset": 1}]}}
  ]
})j";

}  // namespace

TEST_CASE("edges leaving a set") {
    auto single = algebra("emitter_singleton.json");
    CHECK(single.epsilon_cardinality(named({"v1"})) == Cardinality::unbounded());

    auto cycles = algebra("cycles_example.json");
    CHECK(cycles.epsilon_cardinality(named({"v2"})) == Cardinality::finite(0));
    CHECK(cycles.graph().epsilon(named({"v2"})).empty());

    Ultragraph g = parse(kShiftFamily);
    SymbolicVertexSet a = SymbolicVertexSet::of({VertexRef::indexed("F", 0), VertexRef::indexed("F", 1)});
    std::size_t brute = 0;
    for (const auto& e : g.edges_up_to(100))
        if (a.contains(g.source(e))) ++brute;
    CHECK(g.epsilon(a).cardinality() == Cardinality::finite(brute));
    CHECK(brute == 2);
}

TEST_CASE("minimal infinite emitters") {
    auto single = algebra("emitter_singleton.json");
    CHECK(single.is_minimal_infinite_emitter(named({"v1"})));

    auto range = algebra("emitter_range.json");
    SymbolicVertexSet r = range.graph().range(EdgeRef::single("e1"));
    CHECK(r.cardinality() == Cardinality::unbounded());
    CHECK(range.is_minimal_infinite_emitter(r));
    CHECK(range.graph().is_sink(VertexRef::indexed("V", 3)));

    auto ex = algebra("boundary_example.json");
    CHECK(ex.is_minimal_infinite_emitter(named({"v1"})));
    CHECK(ex.is_minimal_infinite_emitter(named({"v5"})));
    CHECK_FALSE(ex.is_minimal_infinite_emitter(named({"v1", "v5"})));
    CHECK(ex.is_minimal_infinite_emitter(ex.graph().range(EdgeRef::single("delta3"))));
}

TEST_CASE("minimal sinks") {
    auto sink = algebra("example_sink.json");
    SymbolicVertexSet r = sink.graph().range(EdgeRef::single("e"));
    CHECK(sink.is_minimal_sink(r));
    CHECK_FALSE(sink.is_minimal_sink(SymbolicVertexSet::of({VertexRef::indexed("V", 1), VertexRef::indexed("V", 2)})));
    CHECK_FALSE(sink.is_minimal_sink(named({"v0"})));

    auto ex = algebra("boundary_example.json");
    CHECK(ex.is_minimal_sink(ex.graph().range(EdgeRef::single("beta5"))));
    CHECK_FALSE(ex.is_minimal_sink(named({"v2"})));
}

TEST_CASE("decomposition into minimal sets and a finite part") {
    auto sink = algebra("example_sink.json");
    SymbolicVertexSet r = sink.graph().range(EdgeRef::single("e"));
    Decomposition d = sink.decompose(r);
    CHECK(d.minimal_infinite_emitters.empty());
    REQUIRE(d.minimal_sinks.size() == 1);
    CHECK(d.minimal_sinks[0].set == r);
    CHECK(d.finite_part.empty());

    Decomposition v = sink.decompose(named({"v0"}));
    CHECK(v.minimal_parts().empty());
    CHECK(v.finite_part == named({"v0"}));

    auto range = algebra("emitter_range.json");
    SymbolicVertexSet re = range.graph().range(EdgeRef::single("e1"));
    Decomposition u = range.decompose(re.unite(named({"v1"})));
    REQUIRE(u.minimal_infinite_emitters.size() == 1);
    CHECK(u.minimal_infinite_emitters[0].set == re);
    CHECK(u.minimal_sinks.empty());
    CHECK(u.finite_part == named({"v1"}));
    // the emitter part is the only infinite generalized vertex inside
    CHECK(range.closure().size() == 1);
}

TEST_CASE("RFUM2 verdicts") {
    CHECK(algebra("example_sink.json").check_rfum2().holds);
    auto sink = algebra("example_sink.json").check_rfum2();
    REQUIRE(sink.witnesses.count("e"));
    CHECK(sink.witnesses.at("e").minimal_sinks.size() == 1);

    auto bad = algebra("non_rfum2.json").check_rfum2();
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.counterexample);
    CHECK(*bad.counterexample == "e");
    REQUIRE(bad.residue);
    CHECK(bad.residue->cardinality().infinite);
    CHECK_THROWS_AS(build_constraints(VertexAlgebra(oracle::fixture("non_rfum2.json").graph), EdgeWeight{}, 1, 4),
                    NotRfum2);
}

TEST_CASE("plain graphs") {
    Ultragraph empty = graph_to_ultragraph({}, {"v"});
    CHECK(empty.edges_up_to(0).empty());

    Ultragraph loop = graph_to_ultragraph({{"v", "v"}});
    CHECK(find_cycles(loop, 1, 0).size() == 1);

    Ultragraph triangle = graph_to_ultragraph({{"a", "b"}, {"b", "c"}, {"c", "a"}});
    CHECK(VertexAlgebra(triangle).check_rfum2().holds);
}

TEST_CASE("property: graphs satisfy RFUM2") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 200; ++round) {
        auto edges = oracle::random_graph(rng, 6, 12);
        VertexAlgebra alg(graph_to_ultragraph(edges, {"v0"}));
        CHECK(alg.check_rfum2().holds);
        CHECK(alg.minimal_sinks().empty());
    }
}

namespace {

void dichotomies(const VertexAlgebra& alg) {
    std::vector<SymbolicVertexSet> emitters;
    for (const auto& e : alg.closure())
        if (alg.epsilon_cardinality(e.set).infinite) emitters.push_back(e.set);
    for (const auto& v : alg.graph().infinite_emitter_vertices()) emitters.push_back(SymbolicVertexSet::single(v));
    for (const auto& m : alg.minimal_infinite_emitters()) {
        auto card = m.set.cardinality();
        CHECK((card.infinite || card.count == 1));
        for (const auto& b : emitters) {
            INFO(m.set.str() << " vs " << b.str());
            CHECK((m.set.is_subset_of(b) || m.set.intersect(b).cardinality().is_finite()));
        }
    }
    const auto& sinks = alg.minimal_sinks();
    for (const auto& a : sinks)
        for (const auto& b : sinks) CHECK((a.set == b.set || a.set.intersect(b.set).cardinality().is_finite()));
}

}  // namespace

TEST_CASE("property: dichotomies on every fixture") {
    for (const char* name : {"example_sink.json", "emitter_singleton.json", "emitter_range.json", "boundary_example.json",
                             "const_emitter.json", "non_rfum2.json", "isolated_path.json", "fan_path.json",
                             "stabilizer.json", "cycles_example.json"}) {
        INFO(name);
        dichotomies(algebra(name));
    }
}

TEST_CASE("property: decomposition is unique and re-unites") {
    for (const char* name : {"example_sink.json", "emitter_singleton.json", "emitter_range.json", "boundary_example.json",
                             "const_emitter.json"}) {
        auto alg = algebra(name);
        std::vector<SymbolicVertexSet> inputs;
        for (const auto& e : alg.graph().edges_up_to(alg.graph().explicit_index_bound() + 2))
            inputs.push_back(alg.graph().range(e));
        const std::size_t ranges = inputs.size();
        for (std::size_t i = 0; i + 1 < ranges; ++i) inputs.push_back(inputs[i].unite(inputs[i + 1]));
        for (const auto& a : inputs) {
            INFO(name << ": " << a.str());
            Decomposition d = alg.decompose(a);
            CHECK(d.reunion() == a);
            Decomposition again = alg.decompose(d.reunion());
            CHECK(again.minimal_parts() == d.minimal_parts());
            CHECK(again.finite_part == d.finite_part);
            CHECK(d.finite_part.cardinality().is_finite());
            CHECK(alg.graph().epsilon(d.finite_part).cardinality().is_finite());
        }
    }
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(parse(R"j({"version":"1","vertex_families":[],"vertices":["v"],
        "edges":[{"id":"e","source":"w","range":"FINITE(v)"}],"edge_families":[]})j"),
                    DocumentError);
    CHECK_THROWS(parse(R"j({"version":"1","vertex_families":[],"vertices":["v","v"],"edges":[],"edge_families":[]})j"));
}
