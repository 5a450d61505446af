#pragma once

#include "ultra/document.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using namespace ultra;

UltragraphDocument fixture(const std::string& name);
std::string fixture_path(const std::string& name);
/// Block map file from fixtures/maps.
BlockMapFile parse_block_map_file(const std::string& name);

/// A vertex set over a small universe: named ids plus indices [0, span) per family.
struct BitSet {
    std::vector<std::string> names;
    std::vector<std::string> families;
    Index span = 0;
    std::vector<bool> bits;

    std::size_t slot(const VertexRef& v) const;
    std::vector<VertexRef> universe() const;
    bool has(const VertexRef& v) const { return bits[slot(v)]; }
};

/// A random set built twice: symbolically and as bits over the universe.
struct RandomSet {
    SymbolicVertexSet symbolic;
    BitSet bits;
};

RandomSet random_set(std::mt19937_64& rng, const std::vector<std::string>& names,
                     const std::vector<std::string>& families, Index span);

BitSet bit_union(const BitSet& a, const BitSet& b);
BitSet bit_inter(const BitSet& a, const BitSet& b);
BitSet bit_minus(const BitSet& a, const BitSet& b);

/// Admissibility checked edge by edge against the declarations.
bool admissible(const Ultragraph& g, const EdgePath& p);

/**
 * All boundary points whose description fits the bounds: finite ultrapaths
 * of length <= depth ending at a minimal set or a sink singleton, and
 * eventually periodic points with prefix + cycle length <= depth.
 */
std::vector<BoundaryPoint> points(const VertexAlgebra& alg, std::size_t depth, Index truncation,
                                  std::size_t sinks_per_range = 3);

/// Cylinder membership from the definition, via the point's edge list.
bool member(const VertexAlgebra& alg, const Cylinder& c, const BoundaryPoint& p);

/// Cylinders of the semiring whose path ends at or before `max_path` edges.
std::vector<Cylinder> semiring_cylinders(const VertexAlgebra& alg, std::mt19937_64& rng, std::size_t max_path,
                                         Index truncation, std::size_t count);

/// A semiring cylinder and a random semiring cylinder inside it.
struct NestedPair {
    Cylinder outer;
    Cylinder inner;
};
NestedPair random_nested_pair(const VertexAlgebra& alg, std::mt19937_64& rng, Index truncation);

/// A feasible point of `system`, pushed away from the lexicographic minimum
/// by one random lower bound; nullopt if that bound made it infeasible.
std::optional<std::vector<Scalar>> random_feasible(const ConstraintSystem& system, std::mt19937_64& rng);

/// MFunction of the one-edge example with the geometric family of ratio r up to `heads`.
MFunction geometric_family(const Scalar& r, Index heads);

/// Random directed graph on up to `max_vertices` vertices.
std::vector<std::pair<std::string, std::string>> random_graph(std::mt19937_64& rng, int max_vertices, int max_edges);

}  // namespace oracle
