#include "ultra/boundary.hpp"

#include <algorithm>

namespace ultra {

namespace {

constexpr int kMaxSubtractDepth = 64;

EdgePath extended(const EdgePath& p, const EdgeRef& e) {
    EdgePath r = p;
    r.push_back(e);
    return r;
}

bool has_prefix(const EdgePath& p, const EdgePath& prefix) {
    return prefix.size() <= p.size() && std::equal(prefix.begin(), prefix.end(), p.begin());
}

// Smallest d dividing |w| with w = u^(|w|/d).
EdgePath primitive_root(const EdgePath& w) {
    std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool ok = true;
        for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
        if (ok) return EdgePath(w.begin(), w.begin() + d);
    }
    return w;
}

std::strong_ordering compare_edge_sets(const EdgeSet& a, const EdgeSet& b) {
    auto ea = a.members(), eb = b.members();
    return std::lexicographical_compare_three_way(ea.begin(), ea.end(), eb.begin(), eb.end());
}

bool is_sink_singleton(const Ultragraph& g, const SymbolicVertexSet& a) {
    auto c = a.cardinality();
    if (c.infinite || c.count != 1) return false;
    return g.is_sink(a.members()[0]);
}

// r(a) ∩ r(b) where the range of the empty word is every vertex.
SymbolicVertexSet common_range(const Ultragraph& g, const GroupWord& w) {
    SymbolicVertexSet s = g.all_vertices();
    if (!w.positive.empty()) s = s.intersect(g.range(w.positive.back()));
    if (!w.negative.empty()) s = s.intersect(g.range(w.negative.back()));
    return s;
}

void append(std::vector<Cylinder>& out, std::vector<Cylinder> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

// Points over a finite vertex set G with the given exclusions, written as
// semiring members: untouched vertices grouped (or one per vertex), vertices
// with excluded edges replaced by their surviving one-edge extensions.
std::vector<Cylinder> split_finite(const VertexAlgebra& alg, const EdgePath& path, const SymbolicVertexSet& g_set,
                                   const EdgeSet& excluded_edges, const SymbolicVertexSet& excluded_sinks,
                                   bool group) {
    const Ultragraph& g = alg.graph();
    std::vector<Cylinder> out;
    std::vector<VertexRef> untouched;
    std::vector<Cylinder> extensions;
    for (const auto& v : g_set.members()) {
        if (g.is_infinite_emitter_vertex(v))
            throw std::logic_error("vertex " + v.str() + " emits infinitely many edges in a finite split");
        if (g.is_sink(v)) {
            if (!excluded_sinks.contains(v)) untouched.push_back(v);
            continue;
        }
        EdgeSet out_edges = g.edges_from(v);
        if (out_edges.intersect(excluded_edges).empty()) {
            untouched.push_back(v);
            continue;
        }
        for (const auto& e : out_edges.minus(excluded_edges).members())
            append(extensions, decompose_to_semiring(alg, Cylinder::plain(extended(path, e), g.range(e))));
    }
    if (group && !untouched.empty()) {
        out.push_back(Cylinder::plain(path, SymbolicVertexSet::of(untouched)));
    } else {
        for (const auto& v : untouched) out.push_back(Cylinder::plain(path, SymbolicVertexSet::single(v)));
    }
    append(out, std::move(extensions));
    return out;
}

std::vector<Cylinder> semiring_pieces(const VertexAlgebra& alg, const Cylinder& c) {
    Cylinder n = normalized(alg, c);
    if (semiring_kind(alg, n) != CylinderKind::Other) return {n};
    return decompose_to_semiring(alg, n);
}

// Intersection of two semiring members.
std::vector<Cylinder> intersect_members(const VertexAlgebra& alg, const Cylinder& p, const Cylinder& q) {
    const Ultragraph& g = alg.graph();
    if (!has_prefix(p.path, q.path) && !has_prefix(q.path, p.path)) return {};
    if (p.path.size() != q.path.size()) {
        const Cylinder& shorter = p.path.size() < q.path.size() ? p : q;
        const Cylinder& longer = p.path.size() < q.path.size() ? q : p;
        const EdgeRef& e = longer.path[shorter.path.size()];
        if (shorter.set.contains(g.source(e)) && !shorter.excluded_edges.contains(e)) return {longer};
        return {};
    }
    CylinderKind kp = semiring_kind(alg, p), kq = semiring_kind(alg, q);
    if (kp == CylinderKind::Minimal && kq == CylinderKind::Minimal && p.set == q.set)
        return {normalized(alg, {p.path, p.set, p.excluded_edges.unite(q.excluded_edges),
                                 p.excluded_sinks.unite(q.excluded_sinks)})};
    SymbolicVertexSet common = p.set.intersect(q.set);
    if (common.empty()) return {};
    if (kp == CylinderKind::FiniteRegular && kq == CylinderKind::FiniteRegular) return {Cylinder::plain(p.path, common)};
    if (common.cardinality().infinite)
        throw std::logic_error("distinct minimal sets " + p.set.pretty() + " and " + q.set.pretty() +
                               " share infinitely many vertices");
    return split_finite(alg, p.path, common, p.excluded_edges.unite(q.excluded_edges),
                        p.excluded_sinks.unite(q.excluded_sinks), true);
}

std::vector<Cylinder> subtract_one(const VertexAlgebra& alg, const Cylinder& p, const Cylinder& q, int depth) {
    if (depth > kMaxSubtractDepth) throw std::logic_error("cylinder subtraction does not terminate");
    if (is_contained(alg, q, p)) return semiring_diff(alg, p, q);
    if (is_contained(alg, p, q)) return {};
    std::vector<Cylinder> common = intersect_members(alg, p, q);
    if (common.empty()) return {p};
    std::vector<Cylinder> pieces{p};
    for (const auto& k : common) {
        std::vector<Cylinder> next;
        for (const auto& x : pieces) append(next, subtract_one(alg, x, k, depth + 1));
        pieces = std::move(next);
    }
    return pieces;
}

}  // namespace

std::string path_str(const EdgePath& p) {
    std::string out;
    for (const auto& e : p) out += (out.empty() ? "" : " ") + e.str();
    return out;
}

// ---------------------------------------------------------------- values

std::string Ultrapath::str() const {
    if (edges.empty()) return "(" + range.pretty() + ", " + range.pretty() + ")";
    return "(" + path_str(edges) + ", " + range.pretty() + ")";
}

BoundaryPoint BoundaryPoint::finite(EdgePath edges, SymbolicVertexSet range) {
    BoundaryPoint p;
    p.path = {std::move(edges), std::move(range)};
    return p;
}

BoundaryPoint BoundaryPoint::periodic(EdgePath prefix, EdgePath cycle) {
    if (cycle.empty()) throw std::invalid_argument("eventually periodic point needs a nonempty cycle");
    cycle = primitive_root(cycle);
    while (!prefix.empty() && prefix.back() == cycle.back()) {
        prefix.pop_back();
        std::rotate(cycle.rbegin(), cycle.rbegin() + 1, cycle.rend());
    }
    BoundaryPoint p;
    p.infinite = true;
    p.prefix = std::move(prefix);
    p.cycle = std::move(cycle);
    return p;
}

std::optional<std::size_t> BoundaryPoint::length() const {
    if (infinite) return std::nullopt;
    return path.length();
}

const EdgeRef& BoundaryPoint::edge_at(std::size_t i) const {
    if (!infinite) return path.edges.at(i);
    if (i < prefix.size()) return prefix[i];
    return cycle[(i - prefix.size()) % cycle.size()];
}

EdgePath BoundaryPoint::first_edges(std::size_t n) const {
    if (!infinite) n = std::min(n, path.length());
    EdgePath out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(edge_at(i));
    return out;
}

std::string BoundaryPoint::str() const {
    if (!infinite) return path.str();
    std::string p = path_str(prefix);
    return (p.empty() ? "" : p + " ") + "(" + path_str(cycle) + ")^inf";
}

std::string Cylinder::str() const {
    std::string out = "D[" + (path.empty() ? set.pretty() : path_str(path)) + "; " + set.pretty();
    if (!excluded_edges.empty()) out += "; F=" + excluded_edges.pretty();
    if (!excluded_sinks.empty()) out += "; S=" + excluded_sinks.pretty();
    return out + "]";
}

std::strong_ordering Cylinder::operator<=>(const Cylinder& o) const {
    if (auto c = std::lexicographical_compare_three_way(path.begin(), path.end(), o.path.begin(), o.path.end()); c != 0)
        return c;
    if (auto c = set <=> o.set; c != 0) return c;
    if (auto c = compare_edge_sets(excluded_edges, o.excluded_edges); c != 0) return c;
    return excluded_sinks <=> o.excluded_sinks;
}

GroupWord GroupWord::make(EdgePath a, EdgePath b) {
    while (!a.empty() && !b.empty() && a.back() == b.back()) {
        a.pop_back();
        b.pop_back();
    }
    return {std::move(a), std::move(b)};
}

std::string GroupWord::str() const {
    if (is_identity()) return "0";
    std::string out = path_str(positive);
    if (!negative.empty()) out += (out.empty() ? "" : " ") + std::string("(") + path_str(negative) + ")^-1";
    return out;
}

// ------------------------------------------------------------ predicates

bool is_admissible(const Ultragraph& g, const EdgePath& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!g.has_edge(p[i])) return false;
        if (i > 0 && !g.range(p[i - 1]).contains(g.source(p[i]))) return false;
    }
    return true;
}

bool in_boundary(const VertexAlgebra& alg, const BoundaryPoint& p) {
    const Ultragraph& g = alg.graph();
    if (p.infinite) {
        EdgePath walk = p.prefix;
        walk.insert(walk.end(), p.cycle.begin(), p.cycle.end());
        walk.insert(walk.end(), p.cycle.begin(), p.cycle.end());
        return is_admissible(g, walk);
    }
    const auto& path = p.path;
    if (!is_admissible(g, path.edges) || path.range.empty()) return false;
    if (!path.edges.empty() && !path.range.is_subset_of(g.range(path.edges.back()))) return false;
    if (!path.range.is_subset_of(g.all_vertices())) return false;
    return alg.is_minimal(path.range) || is_sink_singleton(g, path.range);
}

void validate_cylinder(const VertexAlgebra& alg, const Cylinder& c) {
    const Ultragraph& g = alg.graph();
    if (!is_admissible(g, c.path)) throw ValidationError("cylinder path " + path_str(c.path) + " is not admissible");
    if (c.set.empty()) throw ValidationError("cylinder over an empty set");
    if (!c.set.is_subset_of(g.all_vertices())) throw ValidationError("cylinder set has unknown vertices");
    if (!c.path.empty() && !c.set.is_subset_of(g.range(c.path.back())))
        throw ValidationError("cylinder set " + c.set.pretty() + " is not inside r(" + c.path.back().str() + ")");
    if (c.excluded_edges.cardinality().infinite || c.excluded_sinks.cardinality().infinite)
        throw ValidationError("cylinder exclusions must be finite");
    if (!c.excluded_edges.is_subset_of(g.epsilon(c.set)))
        throw ValidationError("excluded edges must leave the cylinder set");
    if (!c.excluded_sinks.is_subset_of(c.set.intersect(g.sinks())))
        throw ValidationError("excluded vertices must be sinks in the cylinder set");
}

Cylinder normalized(const VertexAlgebra& alg, Cylinder c) {
    const Ultragraph& g = alg.graph();
    c.excluded_edges = c.excluded_edges.intersect(g.epsilon(c.set));
    c.excluded_sinks = c.excluded_sinks.intersect(c.set).intersect(g.sinks());
    // D over a single sink is that one point whatever the exclusions say.
    if (is_sink_singleton(g, c.set)) c.excluded_sinks = {};
    return c;
}

CylinderKind semiring_kind(const VertexAlgebra& alg, const Cylinder& c) {
    if (alg.is_minimal(c.set)) return CylinderKind::Minimal;
    if (c.plain_form() && alg.is_finite_regular(c.set)) return CylinderKind::FiniteRegular;
    return CylinderKind::Other;
}

bool contains(const VertexAlgebra& alg, const Cylinder& c, const BoundaryPoint& p) {
    const Ultragraph& g = alg.graph();
    std::size_t n = c.path.size();
    auto len = p.length();
    if (len && *len < n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (!(p.edge_at(i) == c.path[i])) return false;
    if (len && *len == n) {
        const auto& a = p.path.range;
        if (!a.is_subset_of(c.set)) return false;
        return !(is_sink_singleton(g, a) && a.is_subset_of(c.excluded_sinks));
    }
    const EdgeRef& e = p.edge_at(n);
    return c.set.contains(g.source(e)) && !c.excluded_edges.contains(e);
}

// ---------------------------------------------------------- semiring ops

std::vector<Cylinder> decompose_to_semiring(const VertexAlgebra& alg, const Cylinder& input) {
    const Ultragraph& g = alg.graph();
    Cylinder c = normalized(alg, input);
    if (semiring_kind(alg, c) == CylinderKind::Minimal) return {c};
    if (is_sink_singleton(g, c.set)) return {Cylinder::plain(c.path, c.set)};

    Decomposition d = alg.decompose(c.set);
    std::vector<SymbolicVertexSet> parts = d.minimal_parts();
    SymbolicVertexSet overlap;
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j) overlap = overlap.unite(parts[i].intersect(parts[j]));

    std::vector<Cylinder> out;
    for (const auto& part : parts) {
        SymbolicVertexSet shared = part.intersect(overlap);
        Cylinder piece{c.path, part, g.epsilon(shared).unite(c.excluded_edges.intersect(g.epsilon(part))),
                       shared.intersect(g.sinks()).unite(c.excluded_sinks.intersect(part))};
        out.push_back(normalized(alg, piece));
    }
    append(out, split_finite(alg, c.path, overlap.unite(d.finite_part), c.excluded_edges, c.excluded_sinks, false));
    return out;
}

std::vector<Cylinder> basis_intersect(const VertexAlgebra& alg, const Cylinder& c1, const Cylinder& c2) {
    if (normalized(alg, c1) == normalized(alg, c2)) return semiring_pieces(alg, c1);
    std::vector<Cylinder> out;
    for (const auto& p : semiring_pieces(alg, c1))
        for (const auto& q : semiring_pieces(alg, c2)) append(out, intersect_members(alg, p, q));
    return out;
}

bool is_contained(const VertexAlgebra& alg, const Cylinder& inner_in, const Cylinder& outer_in) {
    const Ultragraph& g = alg.graph();
    Cylinder inner = normalized(alg, inner_in), outer = normalized(alg, outer_in);
    if (!has_prefix(inner.path, outer.path)) return false;
    if (inner.path.size() > outer.path.size()) {
        const EdgeRef& e = inner.path[outer.path.size()];
        return outer.set.contains(g.source(e)) && !outer.excluded_edges.contains(e);
    }
    if (inner == outer) return true;
    CylinderKind ko = semiring_kind(alg, outer), ki = semiring_kind(alg, inner);
    if (ko == CylinderKind::Minimal && ki == CylinderKind::Minimal)
        return inner.set == outer.set && outer.excluded_edges.is_subset_of(inner.excluded_edges) &&
               outer.excluded_sinks.is_subset_of(inner.excluded_sinks);
    if (ki == CylinderKind::FiniteRegular) {
        if (!inner.set.is_subset_of(outer.set)) return false;
        if (is_sink_singleton(g, inner.set) && inner.set == outer.set) return true;
        return g.epsilon(inner.set).intersect(outer.excluded_edges).empty() &&
               inner.set.intersect(outer.excluded_sinks).empty();
    }
    return false;
}

std::vector<Cylinder> semiring_diff(const VertexAlgebra& alg, const Cylinder& c_in, const Cylinder& c0_in) {
    const Ultragraph& g = alg.graph();
    Cylinder c = normalized(alg, c_in), c0 = normalized(alg, c0_in);
    if (semiring_kind(alg, c) == CylinderKind::Other || semiring_kind(alg, c0) == CylinderKind::Other)
        throw std::invalid_argument("semiring_diff needs semiring members");
    if (!is_contained(alg, c0, c)) throw NotContained(c0.str() + " is not contained in " + c.str());
    if (c == c0) return {};
    CylinderKind kc = semiring_kind(alg, c), k0 = semiring_kind(alg, c0);
    std::vector<Cylinder> out;

    if (c0.path.size() == c.path.size()) {
        if (kc == CylinderKind::Minimal && k0 == CylinderKind::Minimal) {
            for (const auto& e : c0.excluded_edges.minus(c.excluded_edges).members())
                append(out, decompose_to_semiring(alg, Cylinder::plain(extended(c.path, e), g.range(e))));
            for (const auto& v : c0.excluded_sinks.minus(c.excluded_sinks).members())
                out.push_back(Cylinder::plain(c.path, SymbolicVertexSet::single(v)));
        } else if (kc == CylinderKind::Minimal) {
            out.push_back(normalized(alg, {c.path, c.set, c.excluded_edges.unite(g.epsilon(c0.set)),
                                           c.excluded_sinks.unite(c0.set.intersect(g.sinks()))}));
        } else {
            SymbolicVertexSet rest = c.set.minus(c0.set);
            if (!rest.empty()) out.push_back(Cylinder::plain(c.path, rest));
        }
        return out;
    }

    // c0 sits below the one-edge extension through e.
    const EdgeRef& e = c0.path[c.path.size()];
    if (kc == CylinderKind::Minimal) {
        out.push_back(normalized(alg, {c.path, c.set, c.excluded_edges.unite(EdgeSet::of({e})), c.excluded_sinks}));
    } else {
        VertexRef u = g.source(e);
        SymbolicVertexSet rest = c.set.minus(SymbolicVertexSet::single(u));
        if (!rest.empty()) out.push_back(Cylinder::plain(c.path, rest));
        for (const auto& other : g.edges_from(u).minus(EdgeSet::of({e})).members())
            append(out, decompose_to_semiring(alg, Cylinder::plain(extended(c.path, other), g.range(other))));
    }
    append(out, subtract(alg, decompose_to_semiring(alg, Cylinder::plain(extended(c.path, e), g.range(e))), {c0}));
    return out;
}

std::vector<Cylinder> subtract(const VertexAlgebra& alg, const std::vector<Cylinder>& region,
                               const std::vector<Cylinder>& removed) {
    std::vector<Cylinder> pieces;
    for (const auto& r : region) append(pieces, semiring_pieces(alg, r));
    for (const auto& q_raw : removed) {
        for (const auto& q : semiring_pieces(alg, q_raw)) {
            std::vector<Cylinder> next;
            for (const auto& p : pieces) append(next, subtract_one(alg, p, q, 0));
            pieces = std::move(next);
        }
    }
    return pieces;
}

std::vector<Cylinder> disjointify(const VertexAlgebra& alg, const std::vector<Cylinder>& cylinders) {
    std::vector<Cylinder> out;
    for (const auto& c : cylinders) append(out, subtract(alg, {c}, out));
    return out;
}

bool pairwise_disjoint(const VertexAlgebra& alg, const std::vector<Cylinder>& cylinders) {
    for (std::size_t i = 0; i < cylinders.size(); ++i)
        for (std::size_t j = i + 1; j < cylinders.size(); ++j)
            if (!basis_intersect(alg, cylinders[i], cylinders[j]).empty()) return false;
    return true;
}

// ----------------------------------------------------- regions and theta

std::vector<Cylinder> region_XA(const VertexAlgebra& alg, const SymbolicVertexSet& a) {
    if (a.empty()) return {};
    return decompose_to_semiring(alg, Cylinder::plain({}, a));
}

Region region_Xc(const VertexAlgebra& alg, const GroupWord& w_in, Index truncation) {
    const Ultragraph& g = alg.graph();
    GroupWord w = GroupWord::make(w_in.positive, w_in.negative);
    Region region;
    if (w.is_identity()) {
        SymbolicVertexSet all = g.all_vertices();
        if (alg.as_generalized(all)) {
            region.cylinders = region_XA(alg, all);
            return region;
        }
        // Finite stage of the exhaustion: ranges, named vertices, family heads.
        truncation = std::max(truncation, g.explicit_index_bound());
        std::vector<VertexRef> heads;
        for (const auto& n : g.named_vertices()) heads.push_back(VertexRef::named(n));
        for (const auto& f : g.vertex_families())
            for (Index i = f.base; i <= truncation; ++i) heads.push_back(VertexRef::indexed(f.id, i));
        SymbolicVertexSet stage = SymbolicVertexSet::of(heads);
        for (const auto& e : g.edges_up_to(truncation)) stage = stage.unite(g.range(e));
        region.cylinders = region_XA(alg, stage);
        region.exhaustive = false;
        region.truncation = truncation;
        return region;
    }
    if (!is_admissible(g, w.positive) || !is_admissible(g, w.negative)) return region;
    SymbolicVertexSet common = common_range(g, w);
    if (common.empty()) return region;
    if (w.positive.empty())
        region.cylinders = region_XA(alg, common);
    else
        region.cylinders = decompose_to_semiring(alg, Cylinder::plain(w.positive, common));
    return region;
}

bool in_region(const VertexAlgebra& alg, const GroupWord& w_in, const BoundaryPoint& x) {
    const Ultragraph& g = alg.graph();
    GroupWord w = GroupWord::make(w_in.positive, w_in.negative);
    if (w.is_identity()) return true;
    if (!is_admissible(g, w.positive) || !is_admissible(g, w.negative)) return false;
    const EdgePath& a = w.positive;
    auto len = x.length();
    if (len && *len < a.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(x.edge_at(i) == a[i])) return false;
    SymbolicVertexSet common = common_range(g, w);
    if (len && *len == a.size()) return x.path.range.is_subset_of(common);
    return common.contains(g.source(x.edge_at(a.size())));
}

BoundaryPoint theta_apply(const VertexAlgebra& alg, const GroupWord& w_in, const BoundaryPoint& x) {
    GroupWord w = GroupWord::make(w_in.positive, w_in.negative);
    if (!in_region(alg, w.inverse(), x))
        throw OutsideDomain(x.str() + " is outside the domain of theta_" + w.str());
    const EdgePath& a = w.positive;
    const EdgePath& b = w.negative;
    if (!x.infinite) {
        EdgePath edges = a;
        edges.insert(edges.end(), x.path.edges.begin() + static_cast<std::ptrdiff_t>(b.size()), x.path.edges.end());
        return BoundaryPoint::finite(std::move(edges), x.path.range);
    }
    // Drop b from the unrolled sequence, then prepend a.
    EdgePath head = x.first_edges(b.size() + x.prefix.size() + x.cycle.size());
    EdgePath prefix = a;
    prefix.insert(prefix.end(), head.begin() + static_cast<std::ptrdiff_t>(b.size()), head.end());
    std::size_t consumed = head.size() - x.prefix.size();  // edges of the cycle already unrolled
    EdgePath cycle;
    for (std::size_t i = 0; i < x.cycle.size(); ++i) cycle.push_back(x.cycle[(consumed + i) % x.cycle.size()]);
    return BoundaryPoint::periodic(std::move(prefix), std::move(cycle));
}

Cylinder theta_apply_cyl(const VertexAlgebra& alg, const GroupWord& w_in, const Cylinder& c) {
    const Ultragraph& g = alg.graph();
    GroupWord w = GroupWord::make(w_in.positive, w_in.negative);
    const EdgePath& a = w.positive;
    const EdgePath& b = w.negative;
    auto outside = [&] { return OutsideDomain(c.str() + " is not inside the domain of theta_" + w.str()); };
    if (!is_admissible(g, a) || !is_admissible(g, b) || !has_prefix(c.path, b)) throw outside();
    SymbolicVertexSet common = common_range(g, w);
    if (c.path.size() > b.size()) {
        if (!common.contains(g.source(c.path[b.size()]))) throw outside();
    } else if (!c.set.is_subset_of(common)) {
        throw outside();
    }
    Cylinder out = c;
    out.path = a;
    out.path.insert(out.path.end(), c.path.begin() + static_cast<std::ptrdiff_t>(b.size()), c.path.end());
    return out;
}

}  // namespace ultra
