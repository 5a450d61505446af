#include "ultra/symbolic_set.hpp"

#include <algorithm>
#include <iterator>

namespace ultra {

namespace {

std::set<Index> set_union(const std::set<Index>& a, const std::set<Index>& b) {
    std::set<Index> r = a;
    r.insert(b.begin(), b.end());
    return r;
}

std::set<Index> set_inter(const std::set<Index>& a, const std::set<Index>& b) {
    std::set<Index> r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
    return r;
}

std::set<Index> set_minus(const std::set<Index>& a, const std::set<Index>& b) {
    std::set<Index> r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
    return r;
}

void check_bases(const IndexSet& a, const IndexSet& b) {
    if (a.cofinite && b.cofinite && a.base != b.base)
        throw DeclarationError("family slices disagree on base index (" + std::to_string(a.base) + " vs " +
                               std::to_string(b.base) + ")");
}

std::string join_refs(const std::vector<VertexRef>& refs) {
    std::string out;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i) out += ", ";
        out += refs[i].str();
    }
    return out;
}

}  // namespace

std::string VertexRef::str() const {
    return index ? name + "[" + std::to_string(*index) + "]" : name;
}

std::strong_ordering VertexRef::operator<=>(const VertexRef& o) const {
    if (is_named() != o.is_named()) return is_named() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = name <=> o.name; c != 0) return c;
    return index.value_or(0) <=> o.index.value_or(0);
}

// ---------------------------------------------------------------- IndexSet

IndexSet IndexSet::all_but(Index base, std::set<Index> excluded) {
    IndexSet s{true, base, {}};
    for (Index i : excluded)
        if (i >= base) s.indices.insert(i);
    return s;
}

bool IndexSet::contains(Index i) const {
    if (!cofinite) return indices.count(i) > 0;
    return i >= base && indices.count(i) == 0;
}

Cardinality IndexSet::cardinality() const {
    return cofinite ? Cardinality::unbounded() : Cardinality::finite(indices.size());
}

std::vector<Index> IndexSet::first(std::size_t limit) const {
    std::vector<Index> out;
    if (!cofinite) {
        for (Index i : indices) {
            if (out.size() >= limit) break;
            out.push_back(i);
        }
        return out;
    }
    for (Index i = base; out.size() < limit; ++i)
        if (!indices.count(i)) out.push_back(i);
    return out;
}

std::optional<Index> IndexSet::max_explicit() const {
    if (indices.empty()) return cofinite ? std::optional<Index>(base) : std::nullopt;
    Index m = *indices.rbegin();
    return cofinite ? std::max(m, base) : m;
}

IndexSet IndexSet::shifted(Index delta) const {
    IndexSet r{cofinite, base + delta, {}};
    for (Index i : indices) r.indices.insert(i + delta);
    return r;
}

IndexSet IndexSet::at_least(Index lo) const {
    if (!cofinite) {
        IndexSet r = *this;
        r.indices.erase(r.indices.begin(), r.indices.lower_bound(lo));
        return r;
    }
    std::set<Index> excl = indices;
    for (Index i = base; i < lo; ++i) excl.insert(i);
    return all_but(base, excl);
}

IndexSet IndexSet::rebase(Index new_base) const {
    if (!cofinite) return at_least(new_base);
    std::set<Index> excl;
    for (Index i : indices)
        if (i >= new_base) excl.insert(i);
    for (Index i = new_base; i < base; ++i) excl.insert(i);
    return all_but(new_base, excl);
}

IndexSet IndexSet::unite(const IndexSet& o) const {
    check_bases(*this, o);
    if (!cofinite && !o.cofinite) return finite(set_union(indices, o.indices));
    if (cofinite && o.cofinite) return all_but(base, set_inter(indices, o.indices));
    const IndexSet& cof = cofinite ? *this : o;
    const IndexSet& fin = cofinite ? o : *this;
    for (Index i : fin.indices)
        if (i < cof.base)
            throw DeclarationError("index " + std::to_string(i) + " lies below base " + std::to_string(cof.base));
    return all_but(cof.base, set_minus(cof.indices, fin.indices));
}

IndexSet IndexSet::intersect(const IndexSet& o) const {
    check_bases(*this, o);
    if (!cofinite && !o.cofinite) return finite(set_inter(indices, o.indices));
    if (cofinite && o.cofinite) return all_but(base, set_union(indices, o.indices));
    const IndexSet& cof = cofinite ? *this : o;
    const IndexSet& fin = cofinite ? o : *this;
    std::set<Index> r;
    for (Index i : fin.indices)
        if (cof.contains(i)) r.insert(i);
    return finite(r);
}

IndexSet IndexSet::minus(const IndexSet& o) const {
    check_bases(*this, o);
    if (!cofinite && !o.cofinite) return finite(set_minus(indices, o.indices));
    if (cofinite && o.cofinite) return all_but(base, {}).intersect(finite(set_minus(o.indices, indices)));
    if (cofinite) return all_but(base, set_union(indices, o.indices));
    std::set<Index> r;
    for (Index i : indices)
        if (!o.contains(i)) r.insert(i);
    return finite(r);
}

std::strong_ordering IndexSet::operator<=>(const IndexSet& o) const {
    if (cofinite != o.cofinite) return cofinite ? std::strong_ordering::greater : std::strong_ordering::less;
    if (cofinite)
        if (auto c = base <=> o.base; c != 0) return c;
    return std::lexicographical_compare_three_way(indices.begin(), indices.end(), o.indices.begin(),
                                                  o.indices.end());
}

// ------------------------------------------------------- SymbolicVertexSet

void SymbolicVertexSet::normalize() {
    for (auto it = families_.begin(); it != families_.end();) {
        if (it->second.cofinite) it->second = IndexSet::all_but(it->second.base, it->second.indices);
        if (!it->second.cofinite) it->second.base = 0;
        if (it->second.empty())
            it = families_.erase(it);
        else
            ++it;
    }
}

SymbolicVertexSet SymbolicVertexSet::of(const std::vector<VertexRef>& refs) {
    SymbolicVertexSet s;
    for (const auto& r : refs) {
        if (r.is_named())
            s.named_.insert(r.name);
        else
            s.families_[r.name].indices.insert(*r.index);
    }
    s.normalize();
    return s;
}

SymbolicVertexSet SymbolicVertexSet::family(const std::string& id, Index base, std::set<Index> excluded) {
    SymbolicVertexSet s;
    s.families_[id] = IndexSet::all_but(base, std::move(excluded));
    return s;
}

bool SymbolicVertexSet::contains(const VertexRef& v) const {
    if (v.is_named()) return named_.count(v.name) > 0;
    auto it = families_.find(v.name);
    return it != families_.end() && it->second.contains(*v.index);
}

Cardinality SymbolicVertexSet::cardinality() const {
    std::uint64_t n = named_.size();
    for (const auto& [id, part] : families_) {
        if (part.cofinite) return Cardinality::unbounded();
        n += part.indices.size();
    }
    return Cardinality::finite(n);
}

std::vector<VertexRef> SymbolicVertexSet::enumerate(std::size_t limit) const {
    std::vector<VertexRef> out;
    for (const auto& n : named_) {
        if (out.size() >= limit) return out;
        out.push_back(VertexRef::named(n));
    }
    for (const auto& [id, part] : families_) {
        if (out.size() >= limit) break;
        for (Index i : part.first(limit - out.size())) out.push_back(VertexRef::indexed(id, i));
    }
    return out;
}

std::vector<VertexRef> SymbolicVertexSet::members() const {
    Cardinality c = cardinality();
    if (c.infinite) throw std::logic_error("members() called on an infinite set " + pretty());
    return enumerate(c.count);
}

SymbolicVertexSet SymbolicVertexSet::unite(const SymbolicVertexSet& o) const {
    SymbolicVertexSet r = *this;
    r.named_.insert(o.named_.begin(), o.named_.end());
    for (const auto& [id, part] : o.families_) {
        auto it = r.families_.find(id);
        if (it == r.families_.end())
            r.families_[id] = part;
        else
            it->second = it->second.unite(part);
    }
    r.normalize();
    return r;
}

SymbolicVertexSet SymbolicVertexSet::intersect(const SymbolicVertexSet& o) const {
    SymbolicVertexSet r;
    std::set_intersection(named_.begin(), named_.end(), o.named_.begin(), o.named_.end(),
                          std::inserter(r.named_, r.named_.end()));
    for (const auto& [id, part] : families_) {
        auto it = o.families_.find(id);
        if (it != o.families_.end()) r.families_[id] = part.intersect(it->second);
    }
    r.normalize();
    return r;
}

SymbolicVertexSet SymbolicVertexSet::minus(const SymbolicVertexSet& o) const {
    SymbolicVertexSet r;
    std::set_difference(named_.begin(), named_.end(), o.named_.begin(), o.named_.end(),
                        std::inserter(r.named_, r.named_.end()));
    for (const auto& [id, part] : families_) {
        auto it = o.families_.find(id);
        r.families_[id] = it == o.families_.end() ? part : part.minus(it->second);
    }
    r.normalize();
    return r;
}

SymbolicVertexSet SymbolicVertexSet::canonical() const {
    SymbolicVertexSet r = *this;
    r.normalize();
    return r;
}

std::string SymbolicVertexSet::str() const {
    std::vector<std::string> parts;
    std::vector<VertexRef> finite_refs;
    for (const auto& n : named_) finite_refs.push_back(VertexRef::named(n));
    for (const auto& [id, part] : families_)
        if (!part.cofinite)
            for (Index i : part.indices) finite_refs.push_back(VertexRef::indexed(id, i));
    if (!finite_refs.empty() || families_.empty()) parts.push_back("FINITE(" + join_refs(finite_refs) + ")");
    for (const auto& [id, part] : families_) {
        if (!part.cofinite) continue;
        std::string p = "FAMILY(" + id + ")";
        if (!part.indices.empty()) {
            std::vector<VertexRef> ex;
            for (Index i : part.indices) ex.push_back(VertexRef::indexed(id, i));
            p += " MINUS FINITE(" + join_refs(ex) + ")";
        }
        parts.push_back(p);
    }
    if (parts.size() == 1) return parts[0];
    std::string out = "UNION(";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out + ")";
}

std::string SymbolicVertexSet::pretty() const {
    std::vector<VertexRef> finite_refs;
    for (const auto& n : named_) finite_refs.push_back(VertexRef::named(n));
    for (const auto& [id, part] : families_)
        if (!part.cofinite)
            for (Index i : part.indices) finite_refs.push_back(VertexRef::indexed(id, i));
    std::string out;
    if (!finite_refs.empty() || families_.empty()) out = "{" + join_refs(finite_refs) + "}";
    for (const auto& [id, part] : families_) {
        if (!part.cofinite) continue;
        if (!out.empty()) out += " + ";
        out += id;
        if (!part.indices.empty()) {
            out += "\\{";
            bool first = true;
            for (Index i : part.indices) {
                out += (first ? "" : ",") + std::to_string(i);
                first = false;
            }
            out += "}";
        }
    }
    return out;
}

std::strong_ordering SymbolicVertexSet::operator<=>(const SymbolicVertexSet& o) const {
    if (auto c = std::lexicographical_compare_three_way(named_.begin(), named_.end(), o.named_.begin(),
                                                        o.named_.end());
        c != 0)
        return c;
    auto a = families_.begin(), b = o.families_.begin();
    for (; a != families_.end() && b != o.families_.end(); ++a, ++b) {
        if (auto c = a->first <=> b->first; c != 0) return c;
        if (auto c = a->second <=> b->second; c != 0) return c;
    }
    if (a == families_.end() && b == o.families_.end()) return std::strong_ordering::equal;
    return a == families_.end() ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace ultra
