#include "ultra/vertex_algebra.hpp"

#include <algorithm>

namespace ultra {

namespace {

constexpr std::size_t kClosureLimit = 4096;

}  // namespace

// --------------------------------------------------------------- Provenance

Provenance Provenance::of_vertex(const VertexRef& v) {
    Provenance p;
    p.kind = Kind::Vertex;
    p.vertex = v;
    return p;
}

Provenance Provenance::of_range(const EdgeRef& e) {
    Provenance p;
    p.kind = Kind::Range;
    p.edge = e;
    return p;
}

Provenance Provenance::union_of(std::vector<Provenance> parts) {
    if (parts.size() == 1) return parts[0];
    Provenance p;
    p.kind = Kind::Union;
    p.children = std::move(parts);
    return p;
}

Provenance Provenance::inter_of(std::vector<Provenance> parts) {
    if (parts.size() == 1) return parts[0];
    Provenance p;
    p.kind = Kind::Inter;
    p.children = std::move(parts);
    return p;
}

SymbolicVertexSet Provenance::evaluate(const Ultragraph& g) const {
    switch (kind) {
        case Kind::Vertex:
            return SymbolicVertexSet::single(vertex);
        case Kind::Range:
            return g.range(edge);
        case Kind::Union: {
            SymbolicVertexSet s;
            for (const auto& c : children) s = s.unite(c.evaluate(g));
            return s;
        }
        case Kind::Inter: {
            if (children.empty()) return {};
            SymbolicVertexSet s = children[0].evaluate(g);
            for (std::size_t i = 1; i < children.size(); ++i) s = s.intersect(children[i].evaluate(g));
            return s;
        }
    }
    return {};
}

std::string Provenance::str() const {
    switch (kind) {
        case Kind::Vertex:
            return "{" + vertex.str() + "}";
        case Kind::Range:
            return "r(" + edge.str() + ")";
        case Kind::Union:
        case Kind::Inter: {
            if (children.empty()) return "{}";
            std::string sep = kind == Kind::Union ? " | " : " & ";
            std::string out = "(";
            for (std::size_t i = 0; i < children.size(); ++i) out += (i ? sep : "") + children[i].str();
            return out + ")";
        }
    }
    return "";
}

GeneralizedVertex GeneralizedVertex::from(const Ultragraph& g, Provenance p) {
    SymbolicVertexSet s = p.evaluate(g);
    return {std::move(s), std::move(p)};
}

GeneralizedVertex GeneralizedVertex::checked(const Ultragraph& g, SymbolicVertexSet s, Provenance p) {
    if (p.evaluate(g) != s) throw std::logic_error("provenance " + p.str() + " does not evaluate to " + s.pretty());
    return {std::move(s), std::move(p)};
}

// ------------------------------------------------------------ Decomposition

SymbolicVertexSet Decomposition::reunion() const {
    SymbolicVertexSet s = finite_part;
    for (const auto& p : minimal_infinite_emitters) s = s.unite(p.set);
    for (const auto& p : minimal_sinks) s = s.unite(p.set);
    return s;
}

std::vector<SymbolicVertexSet> Decomposition::minimal_parts() const {
    std::vector<SymbolicVertexSet> out;
    for (const auto& p : minimal_infinite_emitters) out.push_back(p.set);
    for (const auto& p : minimal_sinks) out.push_back(p.set);
    return out;
}

// ------------------------------------------------------------ VertexAlgebra

VertexAlgebra::VertexAlgebra(Ultragraph g) : g_(std::move(g)) {
    for (const auto& d : g_.edge_families()) {
        if (d.range.indexed || d.range.set.cardinality().is_finite()) continue;
        EdgeRef e = d.indexed ? EdgeRef::indexed(d.id, d.base) : EdgeRef::single(d.id);
        if (std::none_of(closure_.begin(), closure_.end(), [&](const Element& x) { return x.set == d.range.set; }))
            closure_.push_back({d.range.set, Provenance::of_range(e)});
    }
    // Close under pairwise intersection, keeping only infinite results.
    for (std::size_t i = 0; i < closure_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            SymbolicVertexSet s = closure_[i].set.intersect(closure_[j].set);
            if (s.cardinality().is_finite()) continue;
            if (std::any_of(closure_.begin(), closure_.end(), [&](const Element& x) { return x.set == s; }))
                continue;
            if (closure_.size() >= kClosureLimit) throw std::length_error("generator closure too large");
            closure_.push_back({s, Provenance::inter_of({closure_[i].provenance, closure_[j].provenance})});
        }
    }

    for (const auto& c : closure_) {
        bool minimal = std::none_of(closure_.begin(), closure_.end(), [&](const Element& o) {
            return o.set != c.set && o.set.is_subset_of(c.set);
        });
        if (!minimal) continue;
        bool has_emitter_vertex = std::any_of(g_.infinite_emitter_vertices().begin(), g_.infinite_emitter_vertices().end(),
                                              [&](const VertexRef& v) { return c.set.contains(v); });
        if (has_emitter_vertex) continue;
        if (g_.epsilon(c.set).cardinality().infinite)
            min_emitters_.push_back({c.set, c.provenance});
        else
            min_sinks_.push_back({c.set, c.provenance});
    }
    for (const auto& v : g_.infinite_emitter_vertices())
        min_emitters_.push_back({SymbolicVertexSet::single(v), Provenance::of_vertex(v)});
    auto by_set = [](const GeneralizedVertex& a, const GeneralizedVertex& b) { return a.set < b.set; };
    std::sort(min_emitters_.begin(), min_emitters_.end(), by_set);
    std::sort(min_sinks_.begin(), min_sinks_.end(), by_set);
}

std::vector<GeneralizedVertex> VertexAlgebra::minimal_sets() const {
    std::vector<GeneralizedVertex> out = min_emitters_;
    out.insert(out.end(), min_sinks_.begin(), min_sinks_.end());
    return out;
}

bool VertexAlgebra::is_minimal_infinite_emitter(const SymbolicVertexSet& a) const {
    return std::any_of(min_emitters_.begin(), min_emitters_.end(), [&](const GeneralizedVertex& m) { return m.set == a; });
}

bool VertexAlgebra::is_minimal_sink(const SymbolicVertexSet& a) const {
    return std::any_of(min_sinks_.begin(), min_sinks_.end(), [&](const GeneralizedVertex& m) { return m.set == a; });
}

bool VertexAlgebra::is_finite_regular(const SymbolicVertexSet& a) const {
    return a.cardinality().is_finite() && g_.epsilon(a).cardinality().is_finite();
}

std::optional<GeneralizedVertex> VertexAlgebra::as_generalized(const SymbolicVertexSet& a) const {
    std::vector<Provenance> parts;
    SymbolicVertexSet covered;
    for (const auto& c : closure_) {
        if (!c.set.is_subset_of(a) || c.set.is_subset_of(covered)) continue;
        covered = covered.unite(c.set);
        parts.push_back(c.provenance);
    }
    SymbolicVertexSet rest = a.minus(covered);
    if (rest.cardinality().infinite) return std::nullopt;
    for (const auto& v : rest.members()) parts.push_back(Provenance::of_vertex(v));
    if (parts.empty()) return GeneralizedVertex{a, Provenance::union_of({})};
    return GeneralizedVertex::checked(g_, a, Provenance::union_of(std::move(parts)));
}

Decomposition VertexAlgebra::decompose(const SymbolicVertexSet& a) const {
    Decomposition d;
    SymbolicVertexSet covered;
    for (const auto& m : min_emitters_)
        if (m.set.is_subset_of(a)) {
            d.minimal_infinite_emitters.push_back(m);
            covered = covered.unite(m.set);
        }
    for (const auto& m : min_sinks_)
        if (m.set.is_subset_of(a)) {
            d.minimal_sinks.push_back(m);
            covered = covered.unite(m.set);
        }
    d.finite_part = a.minus(covered);
    if (d.finite_part.cardinality().infinite)
        throw NotRfum2("set " + a.pretty() + " leaves an infinite remainder " + d.finite_part.pretty() +
                           " after removing its minimal subsets",
                       d.finite_part);
    return d;
}

Rfum2Verdict VertexAlgebra::check_rfum2() const {
    Rfum2Verdict v;
    for (const auto& d : g_.edge_families()) {
        EdgeRef e = d.indexed ? EdgeRef::indexed(d.id, d.base) : EdgeRef::single(d.id);
        try {
            v.witnesses.emplace(d.id, decompose(g_.range(e)));
        } catch (const NotRfum2& err) {
            v.holds = false;
            v.counterexample = d.id;
            v.residue = err.residue;
            return v;
        }
    }
    return v;
}

}  // namespace ultra
