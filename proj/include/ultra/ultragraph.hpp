#pragma once

#include "ultra/symbolic_set.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ultra {

/// Malformed ultragraph data: dangling ids, empty ranges, duplicate ids.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An edge: a single edge `e`, or member `g[i]` of an indexed edge family.
struct EdgeRef {
    std::string family;
    std::optional<Index> index;

    static EdgeRef single(std::string id) { return {std::move(id), std::nullopt}; }
    static EdgeRef indexed(std::string id, Index i) { return {std::move(id), i}; }

    std::string str() const;
    std::strong_ordering operator<=>(const EdgeRef& o) const;
    bool operator==(const EdgeRef& o) const = default;
};

/// Symbolic edge set: single edges plus a finite/cofinite slice per family.
struct EdgeSet {
    std::set<std::string> singles;
    std::map<std::string, IndexSet> indexed;

    static EdgeSet of(const std::vector<EdgeRef>& edges);

    bool empty() const { return singles.empty() && indexed.empty(); }
    bool contains(const EdgeRef& e) const;
    Cardinality cardinality() const;
    std::vector<EdgeRef> enumerate(std::size_t limit) const;
    std::vector<EdgeRef> members() const;
    EdgeSet unite(const EdgeSet& o) const;
    EdgeSet intersect(const EdgeSet& o) const;
    EdgeSet minus(const EdgeSet& o) const;
    bool is_subset_of(const EdgeSet& o) const { return minus(o).empty(); }
    std::string pretty() const;
    bool operator==(const EdgeSet&) const = default;

private:
    void normalize();
};

struct VertexFamilyDecl {
    std::string id;
    Index base = 0;
};

struct EdgeSource {
    bool indexed = false;  ///< false: constant vertex; true: family[i + offset]
    VertexRef vertex;
    std::string family;
    Index offset = 0;
};

struct IndexedRef {
    std::string family;
    Index offset = 0;
    bool operator==(const IndexedRef&) const = default;
};

struct EdgeRange {
    bool indexed = false;  ///< false: same set for every edge; true: {F[i + offset]} clipped
    SymbolicVertexSet set;
    std::vector<IndexedRef> refs;
};

/// A single edge (indexed = false) or an edge family g[i], i >= base.
struct EdgeFamilyDecl {
    std::string id;
    bool indexed = false;
    Index base = 0;
    EdgeSource source;
    EdgeRange range;
};

/**
 * @brief An ultragraph given by finitely many declarations.
 *
 * Vertices are named vertices plus the members of vertex families; edges are
 * single edges plus the members of indexed edge families. All derived data
 * (sinks, range generators, minimal sets) is computed once at construction.
 */
class Ultragraph {
public:
    Ultragraph() = default;
    Ultragraph(std::vector<VertexFamilyDecl> families, std::vector<std::string> named,
               std::vector<EdgeFamilyDecl> edges);

    const std::vector<VertexFamilyDecl>& vertex_families() const { return vertex_families_; }
    const std::vector<std::string>& named_vertices() const { return named_; }
    const std::vector<EdgeFamilyDecl>& edge_families() const { return edges_; }
    const EdgeFamilyDecl& edge_decl(const std::string& id) const;
    bool has_edge_family(const std::string& id) const { return edge_index_.count(id) > 0; }
    bool has_vertex_family(const std::string& id) const { return family_base_.count(id) > 0; }
    Index family_base(const std::string& id) const;

    bool has_vertex(const VertexRef& v) const;
    bool has_edge(const EdgeRef& e) const;
    VertexRef source(const EdgeRef& e) const;
    SymbolicVertexSet range(const EdgeRef& e) const;

    /// The whole vertex set G^0.
    SymbolicVertexSet all_vertices() const;
    /// {e : s(e) in A}.
    EdgeSet epsilon(const SymbolicVertexSet& a) const;
    EdgeSet edges_from(const VertexRef& v) const;
    bool is_sink(const VertexRef& v) const;
    /// Sinks as a symbolic set (finitely many exceptions per family).
    const SymbolicVertexSet& sinks() const { return sinks_; }
    /// Vertices that emit infinitely many edges; always finitely many.
    const std::vector<VertexRef>& infinite_emitter_vertices() const { return inf_emitters_; }
    bool is_infinite_emitter_vertex(const VertexRef& v) const;
    /// Single edges plus indexed edges with index <= truncation.
    std::vector<EdgeRef> edges_up_to(Index truncation) const;
    /// Largest index written anywhere in the declarations.
    Index explicit_index_bound() const { return index_bound_; }
    /// True when some edge family takes its source from a vertex family.
    bool has_source_indexed_family() const;

private:
    std::vector<VertexFamilyDecl> vertex_families_;
    std::vector<std::string> named_;
    std::vector<EdgeFamilyDecl> edges_;
    std::map<std::string, std::size_t> edge_index_;
    std::map<std::string, Index> family_base_;
    std::set<std::string> named_set_;
    SymbolicVertexSet sinks_;
    std::vector<VertexRef> inf_emitters_;
    Index index_bound_ = 0;

    void validate();
    void derive();
};

/// Build an ultragraph from a plain directed graph (singleton ranges).
Ultragraph graph_to_ultragraph(const std::vector<std::pair<std::string, std::string>>& edges,
                               const std::vector<std::string>& extra_vertices = {});

}  // namespace ultra
