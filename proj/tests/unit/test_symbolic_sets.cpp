#include "doctest.h"
#include "support/oracles.hpp"

#include <random>

using namespace ultra;

namespace {

SymbolicVertexSet fin(const std::string& f, std::set<Index> idx) {
    std::vector<VertexRef> refs;
    for (Index i : idx) refs.push_back(VertexRef::indexed(f, i));
    return SymbolicVertexSet::of(refs);
}

SymbolicVertexSet cof(const std::string& f, std::set<Index> excluded) {
    return SymbolicVertexSet::family(f, 0, std::move(excluded));
}

void check_against(const SymbolicVertexSet& s, const oracle::BitSet& bits) {
    for (const auto& v : bits.universe()) {
        INFO(v.str());
        CHECK(s.contains(v) == bits.has(v));
    }
}

}  // namespace

TEST_CASE("union absorbs finite slices into cofinite ones") {
    CHECK(cof("F", {1, 2}).unite(fin("F", {1})) == cof("F", {2}));
    auto a = cof("F", {3}).unite(SymbolicVertexSet::single(VertexRef::named("v")));
    CHECK(a.unite(SymbolicVertexSet{}) == a);
}

TEST_CASE("union of a finite slice and a named vertex") {
    auto s = fin("F", {1, 3}).unite(SymbolicVertexSet::single(VertexRef::named("v")));
    oracle::BitSet bits{{"v"}, {"F"}, 100, std::vector<bool>(101, false)};
    bits.bits[bits.slot(VertexRef::named("v"))] = true;
    bits.bits[bits.slot(VertexRef::indexed("F", 1))] = true;
    bits.bits[bits.slot(VertexRef::indexed("F", 3))] = true;
    check_against(s, bits);
    CHECK(s.named() == std::set<std::string>{"v"});
}

TEST_CASE("intersection, difference and subset on cofinite slices") {
    CHECK(cof("F", {}).intersect(cof("F", {5})) == cof("F", {5}));
    auto d = cof("F", {1}).minus(cof("F", {1, 2}));
    CHECK(d == fin("F", {2}));
    oracle::BitSet bits{{}, {"F"}, 101, std::vector<bool>(101, false)};
    bits.bits[bits.slot(VertexRef::indexed("F", 2))] = true;
    check_against(d, bits);
    CHECK(fin("F", {2}).is_subset_of(cof("F", {1})));
    CHECK_FALSE(cof("F", {1}).is_subset_of(fin("F", {2})));
}

TEST_CASE("cardinality") {
    CHECK(cof("F", {3}).cardinality() == Cardinality::unbounded());
    auto s = fin("F", {1, 2}).unite(SymbolicVertexSet::single(VertexRef::named("v")));
    CHECK(s.cardinality() == Cardinality::finite(3));
    CHECK(SymbolicVertexSet{}.cardinality() == Cardinality::finite(0));
}

TEST_CASE("enumeration order") {
    CHECK(SymbolicVertexSet{}.enumerate(10).empty());
    auto first = cof("F", {0}).enumerate(3);
    REQUIRE(first.size() == 3);
    CHECK(first[0] == VertexRef::indexed("F", 1));
    CHECK(first[1] == VertexRef::indexed("F", 2));
    CHECK(first[2] == VertexRef::indexed("F", 3));
}

TEST_CASE("set operations agree with a bitset oracle") {
    std::mt19937_64 rng(7);
    std::vector<std::string> names{"a", "b", "c", "d", "e", "f", "g", "h"};
    std::vector<std::string> families{"F", "H"};
    const Index span = 100;  // 8 names + 2 * 100 indices = 208 candidates
    for (int round = 0; round < 300; ++round) {
        auto a = oracle::random_set(rng, names, families, span);
        auto b = oracle::random_set(rng, names, families, span);
        check_against(a.symbolic.unite(b.symbolic), oracle::bit_union(a.bits, b.bits));
        check_against(a.symbolic.intersect(b.symbolic), oracle::bit_inter(a.bits, b.bits));
        check_against(a.symbolic.minus(b.symbolic), oracle::bit_minus(a.bits, b.bits));

        auto u = a.symbolic.unite(b.symbolic);
        auto ub = oracle::bit_union(a.bits, b.bits);
        auto listed = u.enumerate(50);
        for (const auto& v : listed) CHECK(ub.has(v));
        CHECK(listed.size() == std::min<std::size_t>(50, u.cardinality().infinite ? 50 : u.cardinality().count));
        CHECK(u.canonical() == u);
        CHECK(u.canonical().canonical() == u.canonical());
        CHECK((a.symbolic.is_subset_of(b.symbolic)) ==
              (oracle::bit_minus(a.bits, b.bits).bits == std::vector<bool>(a.bits.bits.size(), false)));
        auto card = u.cardinality();
        if (card.is_finite()) CHECK(u.enumerate(card.count + 1).size() == card.count);
    }
}

TEST_CASE("equality is structural after canonicalization") {
    auto x = cof("F", {1}).unite(fin("F", {1}));
    CHECK(x == cof("F", {}));
    CHECK(x.str() == cof("F", {}).str());
    auto y = fin("F", {4, 2}).unite(fin("F", {2}));
    CHECK(y == fin("F", {2, 4}));
}
