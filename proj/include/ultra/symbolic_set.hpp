#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultra {

using Index = std::int64_t;

/// Raised when two sets disagree about a family's index domain, or a
/// reference falls outside it.
class DeclarationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A vertex: either a named one or member `index` of a vertex family.
struct VertexRef {
    std::string name;
    std::optional<Index> index;

    static VertexRef named(std::string id) { return {std::move(id), std::nullopt}; }
    static VertexRef indexed(std::string family, Index i) { return {std::move(family), i}; }

    bool is_named() const { return !index.has_value(); }
    /// "v0" or "V[3]".
    std::string str() const;

    // Named vertices sort before family members; then by id, then index.
    std::strong_ordering operator<=>(const VertexRef& o) const;
    bool operator==(const VertexRef& o) const = default;
};

struct Cardinality {
    bool infinite = false;
    std::uint64_t count = 0;

    static Cardinality finite(std::uint64_t n) { return {false, n}; }
    static Cardinality unbounded() { return {true, 0}; }
    bool is_finite() const { return !infinite; }
    std::string str() const { return infinite ? "infinite" : std::to_string(count); }
    bool operator==(const Cardinality&) const = default;
};

/**
 * @brief A subset of an index domain {base, base+1, ...}.
 *
 * Either a finite list of indices or the domain minus a finite list. The
 * base only matters for the cofinite shape and is ignored otherwise.
 */
struct IndexSet {
    bool cofinite = false;
    Index base = 0;
    std::set<Index> indices;  ///< members, or exclusions when cofinite

    static IndexSet finite(std::set<Index> members) { return {false, 0, std::move(members)}; }
    static IndexSet all_but(Index base, std::set<Index> excluded);

    bool empty() const { return !cofinite && indices.empty(); }
    bool contains(Index i) const;
    Cardinality cardinality() const;
    /// First `limit` members in ascending order.
    std::vector<Index> first(std::size_t limit) const;
    /// Largest index written down explicitly, if any.
    std::optional<Index> max_explicit() const;
    /// {i + delta : i in this}.
    IndexSet shifted(Index delta) const;
    /// Members that are >= lo, kept in the same domain.
    IndexSet at_least(Index lo) const;
    /// The same members seen in the domain starting at new_base; members
    /// below new_base are dropped.
    IndexSet rebase(Index new_base) const;

    IndexSet unite(const IndexSet& o) const;
    IndexSet intersect(const IndexSet& o) const;
    IndexSet minus(const IndexSet& o) const;

    bool operator==(const IndexSet& o) const = default;
    std::strong_ordering operator<=>(const IndexSet& o) const;
};

/**
 * @brief Finite named part plus a finite/cofinite slice per vertex family.
 *
 * Values are always kept canonical: empty slices are dropped and cofinite
 * exclusions below the base are removed, so structural equality is set
 * equality.
 */
class SymbolicVertexSet {
public:
    SymbolicVertexSet() = default;

    static SymbolicVertexSet of(const std::vector<VertexRef>& refs);
    static SymbolicVertexSet family(const std::string& id, Index base, std::set<Index> excluded = {});
    static SymbolicVertexSet single(const VertexRef& v) { return of({v}); }

    const std::set<std::string>& named() const { return named_; }
    const std::map<std::string, IndexSet>& families() const { return families_; }

    bool empty() const { return named_.empty() && families_.empty(); }
    bool contains(const VertexRef& v) const;
    Cardinality cardinality() const;
    /// Deterministic: named first, then families by id, indices ascending.
    std::vector<VertexRef> enumerate(std::size_t limit) const;
    /// All members if finite; throws otherwise.
    std::vector<VertexRef> members() const;

    SymbolicVertexSet unite(const SymbolicVertexSet& o) const;
    SymbolicVertexSet intersect(const SymbolicVertexSet& o) const;
    SymbolicVertexSet minus(const SymbolicVertexSet& o) const;
    bool is_subset_of(const SymbolicVertexSet& o) const { return minus(o).empty(); }

    /// Idempotent normal form; every public constructor already applies it.
    SymbolicVertexSet canonical() const;

    /// Set expression in the document grammar, e.g. "UNION(FINITE(v0), FAMILY(V) MINUS FINITE(V[1]))".
    std::string str() const;
    /// Short human form, e.g. "{v0, V[1], V[2]}" or "{v0} + V\{1}".
    std::string pretty() const;

    bool operator==(const SymbolicVertexSet& o) const = default;
    std::strong_ordering operator<=>(const SymbolicVertexSet& o) const;

private:
    std::set<std::string> named_;
    std::map<std::string, IndexSet> families_;

    void normalize();
};

}  // namespace ultra
