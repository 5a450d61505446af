#pragma once

#include "ultra/ultragraph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ultra {

/// No decomposition into minimal sets plus a finite remainder exists.
class NotRfum2 : public std::runtime_error {
public:
    NotRfum2(const std::string& what, SymbolicVertexSet residue)
        : std::runtime_error(what), residue(std::move(residue)) {}
    SymbolicVertexSet residue;
};

/// Expression tree describing how a generalized vertex is built.
struct Provenance {
    enum class Kind { Vertex, Range, Union, Inter };
    Kind kind = Kind::Vertex;
    VertexRef vertex;  ///< Kind::Vertex
    EdgeRef edge;      ///< Kind::Range
    std::vector<Provenance> children;

    static Provenance of_vertex(const VertexRef& v);
    static Provenance of_range(const EdgeRef& e);
    static Provenance union_of(std::vector<Provenance> parts);
    static Provenance inter_of(std::vector<Provenance> parts);

    SymbolicVertexSet evaluate(const Ultragraph& g) const;
    /// e.g. "r(e1) & r(e2)" or "{v0} | r(e)".
    std::string str() const;
};

/// A set in the generated algebra together with a provenance that evaluates to it.
struct GeneralizedVertex {
    SymbolicVertexSet set;
    Provenance provenance;

    /// Evaluates `p`; the result is the set.
    static GeneralizedVertex from(const Ultragraph& g, Provenance p);
    /// Throws std::logic_error if `p` does not evaluate to `s`.
    static GeneralizedVertex checked(const Ultragraph& g, SymbolicVertexSet s, Provenance p);
};

struct Decomposition {
    std::vector<GeneralizedVertex> minimal_infinite_emitters;
    std::vector<GeneralizedVertex> minimal_sinks;
    SymbolicVertexSet finite_part;

    SymbolicVertexSet reunion() const;
    /// Emitters then sinks, in canonical order.
    std::vector<SymbolicVertexSet> minimal_parts() const;
};

struct Rfum2Verdict {
    bool holds = true;
    std::map<std::string, Decomposition> witnesses;  ///< keyed by edge (family) id
    std::optional<std::string> counterexample;
    std::optional<SymbolicVertexSet> residue;
};

/**
 * @brief Generalized-vertex analysis of one ultragraph.
 *
 * Infinite members of the algebra are unions of intersections of the
 * constant ranges plus finite sets, so everything about infinite subsets is
 * decided by the closure of the infinite constant ranges under intersection.
 */
class VertexAlgebra {
public:
    struct Element {
        SymbolicVertexSet set;
        Provenance provenance;
    };

    explicit VertexAlgebra(Ultragraph g);

    const Ultragraph& graph() const { return g_; }

    /// Infinite intersections of constant ranges, deduplicated.
    const std::vector<Element>& closure() const { return closure_; }

    /// Minimal infinite emitters (including emitter singletons), canonical order.
    const std::vector<GeneralizedVertex>& minimal_infinite_emitters() const { return min_emitters_; }
    const std::vector<GeneralizedVertex>& minimal_sinks() const { return min_sinks_; }
    /// All minimal sets, emitters first.
    std::vector<GeneralizedVertex> minimal_sets() const;

    Cardinality epsilon_cardinality(const SymbolicVertexSet& a) const { return g_.epsilon(a).cardinality(); }
    bool is_minimal_infinite_emitter(const SymbolicVertexSet& a) const;
    bool is_minimal_sink(const SymbolicVertexSet& a) const;
    bool is_minimal(const SymbolicVertexSet& a) const { return is_minimal_infinite_emitter(a) || is_minimal_sink(a); }
    /// |A| < inf and |eps(A)| < inf.
    bool is_finite_regular(const SymbolicVertexSet& a) const;

    /// Membership in the generated algebra, with a reconstructed provenance.
    std::optional<GeneralizedVertex> as_generalized(const SymbolicVertexSet& a) const;

    Decomposition decompose(const SymbolicVertexSet& a) const;
    Rfum2Verdict check_rfum2() const;

private:
    Ultragraph g_;
    std::vector<Element> closure_;
    std::vector<GeneralizedVertex> min_emitters_;
    std::vector<GeneralizedVertex> min_sinks_;
};

}  // namespace ultra
