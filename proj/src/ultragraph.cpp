#include "ultra/ultragraph.hpp"

#include <algorithm>

namespace ultra {

// ------------------------------------------------------------------ EdgeRef

std::string EdgeRef::str() const { return index ? family + "[" + std::to_string(*index) + "]" : family; }

std::strong_ordering EdgeRef::operator<=>(const EdgeRef& o) const {
    if (auto c = family <=> o.family; c != 0) return c;
    if (index.has_value() != o.index.has_value())
        return index.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
    return index.value_or(0) <=> o.index.value_or(0);
}

// ------------------------------------------------------------------ EdgeSet

void EdgeSet::normalize() {
    for (auto it = indexed.begin(); it != indexed.end();) {
        if (it->second.cofinite) it->second = IndexSet::all_but(it->second.base, it->second.indices);
        if (!it->second.cofinite) it->second.base = 0;
        if (it->second.empty())
            it = indexed.erase(it);
        else
            ++it;
    }
}

EdgeSet EdgeSet::of(const std::vector<EdgeRef>& edges) {
    EdgeSet s;
    for (const auto& e : edges) {
        if (e.index)
            s.indexed[e.family].indices.insert(*e.index);
        else
            s.singles.insert(e.family);
    }
    s.normalize();
    return s;
}

bool EdgeSet::contains(const EdgeRef& e) const {
    if (!e.index) return singles.count(e.family) > 0;
    auto it = indexed.find(e.family);
    return it != indexed.end() && it->second.contains(*e.index);
}

Cardinality EdgeSet::cardinality() const {
    std::uint64_t n = singles.size();
    for (const auto& [id, part] : indexed) {
        if (part.cofinite) return Cardinality::unbounded();
        n += part.indices.size();
    }
    return Cardinality::finite(n);
}

std::vector<EdgeRef> EdgeSet::enumerate(std::size_t limit) const {
    // Merge singles and families by id so the order matches EdgeRef ordering.
    std::vector<EdgeRef> out;
    std::set<std::string> ids(singles);
    for (const auto& [id, part] : indexed) ids.insert(id);
    for (const auto& id : ids) {
        if (out.size() >= limit) break;
        if (singles.count(id)) out.push_back(EdgeRef::single(id));
        auto it = indexed.find(id);
        if (it != indexed.end())
            for (Index i : it->second.first(limit - out.size())) out.push_back(EdgeRef::indexed(id, i));
    }
    if (out.size() > limit) out.resize(limit);
    return out;
}

std::vector<EdgeRef> EdgeSet::members() const {
    Cardinality c = cardinality();
    if (c.infinite) throw std::logic_error("members() called on an infinite edge set");
    return enumerate(c.count);
}

EdgeSet EdgeSet::unite(const EdgeSet& o) const {
    EdgeSet r = *this;
    r.singles.insert(o.singles.begin(), o.singles.end());
    for (const auto& [id, part] : o.indexed) {
        auto it = r.indexed.find(id);
        if (it == r.indexed.end())
            r.indexed[id] = part;
        else
            it->second = it->second.unite(part);
    }
    r.normalize();
    return r;
}

EdgeSet EdgeSet::intersect(const EdgeSet& o) const {
    EdgeSet r;
    for (const auto& s : singles)
        if (o.singles.count(s)) r.singles.insert(s);
    for (const auto& [id, part] : indexed) {
        auto it = o.indexed.find(id);
        if (it != o.indexed.end()) r.indexed[id] = part.intersect(it->second);
    }
    r.normalize();
    return r;
}

EdgeSet EdgeSet::minus(const EdgeSet& o) const {
    EdgeSet r;
    for (const auto& s : singles)
        if (!o.singles.count(s)) r.singles.insert(s);
    for (const auto& [id, part] : indexed) {
        auto it = o.indexed.find(id);
        r.indexed[id] = it == o.indexed.end() ? part : part.minus(it->second);
    }
    r.normalize();
    return r;
}

std::string EdgeSet::pretty() const {
    std::string out;
    auto add = [&](const std::string& s) { out += (out.empty() ? "" : ", ") + s; };
    for (const auto& s : singles) add(s);
    for (const auto& [id, part] : indexed) {
        if (part.cofinite) {
            std::string p = id + "[>=" + std::to_string(part.base) + "]";
            if (!part.indices.empty()) {
                p += "\\{";
                bool first = true;
                for (Index i : part.indices) {
                    p += (first ? "" : ",") + std::to_string(i);
                    first = false;
                }
                p += "}";
            }
            add(p);
        } else {
            for (Index i : part.indices) add(id + "[" + std::to_string(i) + "]");
        }
    }
    return "{" + out + "}";
}

// --------------------------------------------------------------- Ultragraph

Ultragraph::Ultragraph(std::vector<VertexFamilyDecl> families, std::vector<std::string> named,
                       std::vector<EdgeFamilyDecl> edges)
    : vertex_families_(std::move(families)), named_(std::move(named)), edges_(std::move(edges)) {
    validate();
    derive();
}

const EdgeFamilyDecl& Ultragraph::edge_decl(const std::string& id) const {
    auto it = edge_index_.find(id);
    if (it == edge_index_.end()) throw ValidationError("unknown edge '" + id + "'");
    return edges_[it->second];
}

Index Ultragraph::family_base(const std::string& id) const {
    auto it = family_base_.find(id);
    if (it == family_base_.end()) throw ValidationError("unknown vertex family '" + id + "'");
    return it->second;
}

bool Ultragraph::has_vertex(const VertexRef& v) const {
    if (v.is_named()) return named_set_.count(v.name) > 0;
    auto it = family_base_.find(v.name);
    return it != family_base_.end() && *v.index >= it->second;
}

bool Ultragraph::has_edge(const EdgeRef& e) const {
    auto it = edge_index_.find(e.family);
    if (it == edge_index_.end()) return false;
    const auto& d = edges_[it->second];
    if (!d.indexed) return !e.index.has_value();
    return e.index.has_value() && *e.index >= d.base;
}

VertexRef Ultragraph::source(const EdgeRef& e) const {
    if (!has_edge(e)) throw ValidationError("no such edge '" + e.str() + "'");
    const auto& d = edge_decl(e.family);
    if (!d.source.indexed) return d.source.vertex;
    return VertexRef::indexed(d.source.family, *e.index + d.source.offset);
}

SymbolicVertexSet Ultragraph::range(const EdgeRef& e) const {
    if (!has_edge(e)) throw ValidationError("no such edge '" + e.str() + "'");
    const auto& d = edge_decl(e.family);
    if (!d.range.indexed) return d.range.set;
    std::vector<VertexRef> refs;
    for (const auto& r : d.range.refs) {
        Index j = *e.index + r.offset;
        if (j >= family_base(r.family)) refs.push_back(VertexRef::indexed(r.family, j));
    }
    return SymbolicVertexSet::of(refs);
}

SymbolicVertexSet Ultragraph::all_vertices() const {
    std::vector<VertexRef> refs;
    for (const auto& n : named_) refs.push_back(VertexRef::named(n));
    SymbolicVertexSet s = SymbolicVertexSet::of(refs);
    for (const auto& f : vertex_families_) s = s.unite(SymbolicVertexSet::family(f.id, f.base));
    return s;
}

EdgeSet Ultragraph::epsilon(const SymbolicVertexSet& a) const {
    EdgeSet out;
    for (const auto& d : edges_) {
        if (!d.indexed) {
            if (a.contains(d.source.vertex)) out.singles.insert(d.id);
            continue;
        }
        if (!d.source.indexed) {
            if (a.contains(d.source.vertex)) out.indexed[d.id] = IndexSet::all_but(d.base, {});
            continue;
        }
        auto it = a.families().find(d.source.family);
        if (it == a.families().end()) continue;
        IndexSet idx = it->second.shifted(-d.source.offset).rebase(d.base);
        if (!idx.empty()) out.indexed[d.id] = idx;
    }
    return out;
}

EdgeSet Ultragraph::edges_from(const VertexRef& v) const { return epsilon(SymbolicVertexSet::single(v)); }

bool Ultragraph::is_sink(const VertexRef& v) const { return sinks_.contains(v); }

bool Ultragraph::is_infinite_emitter_vertex(const VertexRef& v) const {
    return std::find(inf_emitters_.begin(), inf_emitters_.end(), v) != inf_emitters_.end();
}

std::vector<EdgeRef> Ultragraph::edges_up_to(Index truncation) const {
    std::vector<EdgeRef> out;
    for (const auto& d : edges_) {
        if (!d.indexed)
            out.push_back(EdgeRef::single(d.id));
        else
            for (Index i = d.base; i <= truncation; ++i) out.push_back(EdgeRef::indexed(d.id, i));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Ultragraph::has_source_indexed_family() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const EdgeFamilyDecl& d) { return d.indexed && d.source.indexed; });
}

void Ultragraph::validate() {
    for (const auto& f : vertex_families_) {
        if (f.id.empty()) throw ValidationError("vertex family with empty id");
        if (f.base < 0) throw ValidationError("vertex family '" + f.id + "' has a negative base index");
        if (!family_base_.emplace(f.id, f.base).second)
            throw ValidationError("duplicate vertex family '" + f.id + "'");
    }
    for (const auto& n : named_) {
        if (n.empty()) throw ValidationError("vertex with empty id");
        if (family_base_.count(n)) throw ValidationError("vertex '" + n + "' clashes with a vertex family id");
        if (!named_set_.insert(n).second) throw ValidationError("duplicate vertex '" + n + "'");
    }
    auto check_vertex = [&](const VertexRef& v, const std::string& where) {
        if (!has_vertex(v)) throw ValidationError(where + ": unknown vertex '" + v.str() + "'");
    };
    auto check_set = [&](const SymbolicVertexSet& s, const std::string& where) {
        for (const auto& n : s.named()) check_vertex(VertexRef::named(n), where);
        for (const auto& [id, part] : s.families()) {
            if (!family_base_.count(id)) throw ValidationError(where + ": unknown vertex family '" + id + "'");
            Index b = family_base_.at(id);
            if (part.cofinite && part.base != b)
                throw ValidationError(where + ": family '" + id + "' used with base " + std::to_string(part.base) +
                                      " but declared with base " + std::to_string(b));
            if (!part.cofinite)
                for (Index i : part.indices) check_vertex(VertexRef::indexed(id, i), where);
        }
    };
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto& d = edges_[k];
        const std::string where = "edge '" + d.id + "'";
        if (d.id.empty()) throw ValidationError("edge with empty id");
        if (!edge_index_.emplace(d.id, k).second) throw ValidationError("duplicate edge '" + d.id + "'");
        if (!d.indexed && (d.source.indexed || d.range.indexed))
            throw ValidationError(where + ": a single edge needs a constant source and range");
        if (d.source.indexed) {
            if (!family_base_.count(d.source.family))
                throw ValidationError(where + ": unknown source family '" + d.source.family + "'");
            if (d.base + d.source.offset < family_base_.at(d.source.family))
                throw ValidationError(where + ": source index falls below the family base");
        } else {
            check_vertex(d.source.vertex, where);
        }
        if (d.range.indexed) {
            if (d.range.refs.empty()) throw ValidationError(where + ": empty range reference list");
            bool nonempty = false;
            for (const auto& r : d.range.refs) {
                if (!family_base_.count(r.family))
                    throw ValidationError(where + ": unknown range family '" + r.family + "'");
                if (d.base + r.offset >= family_base_.at(r.family)) nonempty = true;
            }
            if (!nonempty) throw ValidationError(where + ": range is empty at index " + std::to_string(d.base));
        } else {
            check_set(d.range.set, where);
            if (d.range.set.empty()) throw ValidationError(where + ": range is empty");
        }
    }
}

void Ultragraph::derive() {
    index_bound_ = 0;
    auto bump = [&](Index i) { index_bound_ = std::max(index_bound_, i); };
    for (const auto& f : vertex_families_) bump(f.base);

    std::set<VertexRef> const_sources;
    std::set<VertexRef> inf;
    std::map<std::string, IndexSet> non_sink;  // per vertex family
    for (const auto& d : edges_) {
        if (d.indexed) bump(d.base);
        if (!d.source.indexed) {
            const_sources.insert(d.source.vertex);
            if (d.indexed) inf.insert(d.source.vertex);
            if (d.source.vertex.index) bump(*d.source.vertex.index);
        } else {
            Index b = family_base_.at(d.source.family);
            IndexSet from = IndexSet::all_but(b, {}).at_least(d.base + d.source.offset);
            auto it = non_sink.find(d.source.family);
            if (it == non_sink.end())
                non_sink[d.source.family] = from;
            else
                it->second = it->second.unite(from);
            bump(d.base + std::abs(d.source.offset));
        }
        if (d.range.indexed) {
            for (const auto& r : d.range.refs) bump(d.base + std::abs(r.offset));
        } else {
            for (const auto& [id, part] : d.range.set.families())
                if (auto m = part.max_explicit()) bump(*m);
        }
    }
    inf_emitters_.assign(inf.begin(), inf.end());

    std::vector<VertexRef> named_sinks;
    for (const auto& n : named_)
        if (!const_sources.count(VertexRef::named(n))) named_sinks.push_back(VertexRef::named(n));
    sinks_ = SymbolicVertexSet::of(named_sinks);
    for (const auto& f : vertex_families_) {
        IndexSet ns = IndexSet::finite({});
        auto it = non_sink.find(f.id);
        if (it != non_sink.end()) ns = it->second;
        std::set<Index> consts;
        for (const auto& v : const_sources)
            if (!v.is_named() && v.name == f.id) consts.insert(*v.index);
        ns = ns.unite(IndexSet::finite(consts));
        IndexSet sinks = IndexSet::all_but(f.base, {}).minus(ns);
        if (sinks.empty()) continue;
        SymbolicVertexSet part;
        if (sinks.cofinite)
            part = SymbolicVertexSet::family(f.id, f.base, sinks.indices);
        else {
            std::vector<VertexRef> refs;
            for (Index i : sinks.indices) refs.push_back(VertexRef::indexed(f.id, i));
            part = SymbolicVertexSet::of(refs);
        }
        sinks_ = sinks_.unite(part);
    }
}

Ultragraph graph_to_ultragraph(const std::vector<std::pair<std::string, std::string>>& edges,
                               const std::vector<std::string>& extra_vertices) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    auto add = [&](const std::string& v) {
        if (seen.insert(v).second) names.push_back(v);
    };
    for (const auto& [s, t] : edges) {
        add(s);
        add(t);
    }
    for (const auto& v : extra_vertices) add(v);
    std::vector<EdgeFamilyDecl> decls;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        EdgeFamilyDecl d;
        d.id = "e" + std::to_string(i);
        d.source.vertex = VertexRef::named(edges[i].first);
        d.range.set = SymbolicVertexSet::single(VertexRef::named(edges[i].second));
        decls.push_back(std::move(d));
    }
    return Ultragraph({}, names, decls);
}

}  // namespace ultra
