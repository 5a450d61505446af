#pragma once

#include "ultra/vertex_algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ultra {

using EdgePath = std::vector<EdgeRef>;

std::string path_str(const EdgePath& p);

/// Point or cylinder lies outside the domain of a partial map.
class OutsideDomain : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// semiring_diff called with a cylinder that is not a subset.
class NotContained : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite path (alpha, A); length 0 means the pair (A, A).
struct Ultrapath {
    EdgePath edges;
    SymbolicVertexSet range;

    std::size_t length() const { return edges.size(); }
    std::string str() const;
    bool operator==(const Ultrapath&) const = default;
};

/**
 * @brief A point of the boundary space: a finite ultrapath, or an infinite
 * path that is eventually periodic.
 *
 * Eventually periodic points are kept canonical: the cycle is a primitive
 * word and the prefix does not end with the cycle's last edge.
 */
struct BoundaryPoint {
    bool infinite = false;
    Ultrapath path;      ///< finite points
    EdgePath prefix;     ///< infinite points
    EdgePath cycle;      ///< infinite points, nonempty

    static BoundaryPoint finite(EdgePath edges, SymbolicVertexSet range);
    static BoundaryPoint periodic(EdgePath prefix, EdgePath cycle);

    /// Number of edges; nullopt for infinite points.
    std::optional<std::size_t> length() const;
    /// i-th edge (0-based); requires i < length.
    const EdgeRef& edge_at(std::size_t i) const;
    /// First n edges (n clipped to the length of finite points).
    EdgePath first_edges(std::size_t n) const;
    std::string str() const;
    bool operator==(const BoundaryPoint&) const = default;
};

/**
 * @brief The cylinder D_{(path, set), excluded_edges, excluded_sinks}.
 *
 * Points are continuations of `path` that either stop at a subset of `set`
 * (and not at an excluded sink), or leave through an edge of eps(set) that
 * is not excluded.
 */
struct Cylinder {
    EdgePath path;
    SymbolicVertexSet set;
    EdgeSet excluded_edges;
    SymbolicVertexSet excluded_sinks;

    static Cylinder plain(EdgePath path, SymbolicVertexSet set) { return {std::move(path), std::move(set), {}, {}}; }
    bool plain_form() const { return excluded_edges.empty() && excluded_sinks.empty(); }
    std::string str() const;
    bool operator==(const Cylinder&) const = default;
    std::strong_ordering operator<=>(const Cylinder& o) const;
};

/// Reduced word a b^{-1} over the edges; either side may be empty.
struct GroupWord {
    EdgePath positive;
    EdgePath negative;

    static GroupWord identity() { return {}; }
    static GroupWord make(EdgePath a, EdgePath b);
    GroupWord inverse() const { return {negative, positive}; }
    bool is_identity() const { return positive.empty() && negative.empty(); }
    std::string str() const;
    bool operator==(const GroupWord&) const = default;
};

enum class CylinderKind {
    Minimal,        ///< set is a minimal infinite emitter or minimal sink
    FiniteRegular,  ///< finite set emitting finitely many edges, no exclusions
    Other,
};

bool is_admissible(const Ultragraph& g, const EdgePath& p);
/// Admissible and ending in a range allowed for points of the boundary space.
bool in_boundary(const VertexAlgebra& alg, const BoundaryPoint& p);
/// Throws ValidationError if the cylinder's data is malformed.
void validate_cylinder(const VertexAlgebra& alg, const Cylinder& c);
/// Drops exclusions that cannot matter (edges outside eps(set), non-sinks).
Cylinder normalized(const VertexAlgebra& alg, Cylinder c);
CylinderKind semiring_kind(const VertexAlgebra& alg, const Cylinder& c);

bool contains(const VertexAlgebra& alg, const Cylinder& c, const BoundaryPoint& p);

/// Disjoint pieces of the semiring whose union is c.
std::vector<Cylinder> decompose_to_semiring(const VertexAlgebra& alg, const Cylinder& c);
/// Disjoint semiring pieces whose union is c1 ∩ c2.
std::vector<Cylinder> basis_intersect(const VertexAlgebra& alg, const Cylinder& c1, const Cylinder& c2);
/// inner ⊆ outer for semiring members.
bool is_contained(const VertexAlgebra& alg, const Cylinder& inner, const Cylinder& outer);
/// Disjoint semiring pieces whose union is c \ c0; requires c0 ⊆ c.
std::vector<Cylinder> semiring_diff(const VertexAlgebra& alg, const Cylinder& c, const Cylinder& c0);
/// Region difference for lists of disjoint semiring members.
std::vector<Cylinder> subtract(const VertexAlgebra& alg, const std::vector<Cylinder>& region,
                               const std::vector<Cylinder>& removed);
/// Make an arbitrary list of cylinders into a disjoint semiring family with the same union.
std::vector<Cylinder> disjointify(const VertexAlgebra& alg, const std::vector<Cylinder>& cylinders);
bool pairwise_disjoint(const VertexAlgebra& alg, const std::vector<Cylinder>& cylinders);

struct Region {
    std::vector<Cylinder> cylinders;
    /// False when the cover of the whole space is a finite stage of an exhaustion.
    bool exhaustive = true;
    Index truncation = -1;
};

/// The set of points x with s(x) ⊆ A.
std::vector<Cylinder> region_XA(const VertexAlgebra& alg, const SymbolicVertexSet& a);
/// Cover of the domain X_w; for w = 0 a stage of an exhaustion at `truncation`.
Region region_Xc(const VertexAlgebra& alg, const GroupWord& w, Index truncation = 8);
bool in_region(const VertexAlgebra& alg, const GroupWord& w, const BoundaryPoint& x);
/// The partial action; x must lie in X_{w^{-1}}.
BoundaryPoint theta_apply(const VertexAlgebra& alg, const GroupWord& w, const BoundaryPoint& x);
Cylinder theta_apply_cyl(const VertexAlgebra& alg, const GroupWord& w, const Cylinder& c);

}  // namespace ultra
