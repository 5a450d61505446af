#include "ultra/dynamics.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace ultra {

namespace {

constexpr std::size_t kCycleLimit = 200000;
constexpr std::size_t kRewriteSteps = 100000;

std::map<EdgeRef, std::vector<EdgeRef>> successors(const Ultragraph& g, const std::vector<EdgeRef>& edges) {
    std::map<EdgeRef, std::vector<EdgeRef>> next;
    for (const auto& e : edges) {
        SymbolicVertexSet r = g.range(e);
        auto& out = next[e];
        for (const auto& f : edges)
            if (r.contains(g.source(f))) out.push_back(f);
    }
    return next;
}

std::string rename_id(const std::map<std::string, std::string>& m, const std::string& id) {
    auto it = m.find(id);
    return it == m.end() ? id : it->second;
}

SymbolicVertexSet rename_set(const std::map<std::string, std::string>& m, const SymbolicVertexSet& s) {
    std::vector<VertexRef> refs;
    for (const auto& n : s.named()) refs.push_back(VertexRef::named(rename_id(m, n)));
    SymbolicVertexSet out = SymbolicVertexSet::of(refs);
    for (const auto& [id, part] : s.families()) {
        std::string to = rename_id(m, id);
        if (part.cofinite) {
            out = out.unite(SymbolicVertexSet::family(to, part.base, part.indices));
        } else {
            std::vector<VertexRef> members;
            for (Index i : part.indices) members.push_back(VertexRef::indexed(to, i));
            out = out.unite(SymbolicVertexSet::of(members));
        }
    }
    return out;
}

std::map<std::string, std::string> inverted(const std::map<std::string, std::string>& m) {
    std::map<std::string, std::string> r;
    for (const auto& [a, b] : m) r[b] = a;
    return r;
}

// Longest rule whose left side matches at `pos`; `available` bounds the
// lookahead for finite sequences.
template <class EdgeAt>
const std::pair<EdgePath, EdgePath>* match_rule(const std::vector<std::pair<EdgePath, EdgePath>>& rules, EdgeAt edge_at,
                                                std::size_t pos, std::optional<std::size_t> available) {
    const std::pair<EdgePath, EdgePath>* best = nullptr;
    for (const auto& rule : rules) {
        const EdgePath& lhs = rule.first;
        if (lhs.empty()) continue;
        if (available && pos + lhs.size() > *available) continue;
        bool ok = true;
        for (std::size_t i = 0; i < lhs.size() && ok; ++i) ok = edge_at(pos + i) == lhs[i];
        if (ok && (!best || lhs.size() > best->first.size())) best = &rule;
    }
    return best;
}

BoundaryPoint rewrite(const std::vector<std::pair<EdgePath, EdgePath>>& rules,
                      const std::map<std::string, std::string>& rename, bool passthrough, const BoundaryPoint& x) {
    auto edge_at = [&](std::size_t i) { return x.edge_at(i); };
    EdgePath out;
    auto step = [&](std::size_t pos, std::optional<std::size_t> available) -> std::size_t {
        if (const auto* rule = match_rule(rules, edge_at, pos, available)) {
            out.insert(out.end(), rule->second.begin(), rule->second.end());
            return rule->first.size();
        }
        if (!passthrough) throw RuleGap("no rule matches " + x.str() + " at position " + std::to_string(pos));
        const EdgeRef& e = x.edge_at(pos);
        out.push_back({rename_id(rename, e.family), e.index});
        return 1;
    };
    if (!x.infinite) {
        std::size_t pos = 0;
        while (pos < x.path.length()) pos += step(pos, x.path.length());
        return BoundaryPoint::finite(out, rename_set(rename, x.path.range));
    }
    std::map<std::size_t, std::size_t> seen;  // cycle phase -> output length
    std::size_t pos = 0;
    for (std::size_t steps = 0; steps < kRewriteSteps; ++steps) {
        if (pos >= x.prefix.size()) {
            std::size_t phase = (pos - x.prefix.size()) % x.cycle.size();
            auto it = seen.find(phase);
            if (it != seen.end()) {
                EdgePath prefix(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(it->second));
                EdgePath cycle(out.begin() + static_cast<std::ptrdiff_t>(it->second), out.end());
                if (cycle.empty()) throw RuleGap("rules map the infinite point " + x.str() + " to a finite word");
                return BoundaryPoint::periodic(prefix, cycle);
            }
            seen[phase] = out.size();
        }
        pos += step(pos, std::nullopt);
    }
    throw RuleGap("rewriting " + x.str() + " does not settle into a period");
}

std::optional<std::size_t> stab_min_of(const BoundaryPoint& p) {
    if (!p.infinite) return std::nullopt;
    return p.cycle.size();
}

void fail(CheckResult& c, std::string witness) {
    c.pass = false;
    if (c.witnesses.size() < 10 && std::find(c.witnesses.begin(), c.witnesses.end(), witness) == c.witnesses.end())
        c.witnesses.push_back(std::move(witness));
}

}  // namespace

// ------------------------------------------------------------------ shift

BoundaryPoint shift(const BoundaryPoint& p) {
    if (!p.infinite) {
        if (p.path.length() == 0) throw LengthTooShort("the shift is undefined on " + p.str());
        EdgePath rest(p.path.edges.begin() + 1, p.path.edges.end());
        return BoundaryPoint::finite(std::move(rest), p.path.range);
    }
    if (!p.prefix.empty()) return BoundaryPoint::periodic(EdgePath(p.prefix.begin() + 1, p.prefix.end()), p.cycle);
    EdgePath c = p.cycle;
    std::rotate(c.begin(), c.begin() + 1, c.end());
    return BoundaryPoint::periodic({}, c);
}

BoundaryPoint shift_n(const BoundaryPoint& p, std::size_t n) {
    if (!p.infinite) {
        if (n > p.path.length())
            throw LengthTooShort("cannot shift " + p.str() + " by " + std::to_string(n));
        return BoundaryPoint::finite(EdgePath(p.path.edges.begin() + static_cast<std::ptrdiff_t>(n), p.path.edges.end()),
                                     p.path.range);
    }
    if (n <= p.prefix.size())
        return BoundaryPoint::periodic(EdgePath(p.prefix.begin() + static_cast<std::ptrdiff_t>(n), p.prefix.end()),
                                       p.cycle);
    EdgePath c = p.cycle;
    std::rotate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>((n - p.prefix.size()) % c.size()), c.end());
    return BoundaryPoint::periodic({}, c);
}

// ----------------------------------------------------------------- cycles

std::string ExitWitness::str() const {
    if (kind == Kind::Sink) return "(" + edge.str() + ", {" + sink.str() + "})";
    return "(" + edge.str() + ", r(" + edge.str() + "))";
}

bool is_concatenation_of_cycles(const Ultragraph& g, const EdgePath& edges, const SymbolicVertexSet& range) {
    std::size_t n = edges.size();
    if (n < 2) return false;
    // split[j]: edges[0, j) is a concatenation of closed pieces.
    std::vector<bool> split(n, false);
    split[0] = true;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j && !split[j]; ++i)
            split[j] = split[i] && g.range(edges[j - 1]).contains(g.source(edges[i]));
    for (std::size_t i = 1; i < n; ++i)
        if (split[i] && range.contains(g.source(edges[i]))) return true;
    return false;
}

std::vector<Cycle> find_cycles(const Ultragraph& g, std::size_t max_len, Index truncation) {
    if (max_len < 1) throw std::invalid_argument("max_len must be at least 1");
    std::vector<EdgeRef> edges = g.edges_up_to(truncation);
    auto next = successors(g, edges);
    std::vector<Cycle> out;
    EdgePath path;
    std::function<void()> dfs = [&] {
        const EdgeRef& last = path.back();
        SymbolicVertexSet r = g.range(last);
        if (r.contains(g.source(path.front()))) {
            if (out.size() >= kCycleLimit) throw std::length_error("too many cycles; lower --max-len");
            out.push_back({{path, r}, !is_concatenation_of_cycles(g, path, r)});
        }
        if (path.size() >= max_len) return;
        for (const auto& f : next[last]) {
            path.push_back(f);
            dfs();
            path.pop_back();
        }
    };
    for (const auto& e : edges) {
        path = {e};
        dfs();
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Cycle& a, const Cycle& b) { return a.path.length() < b.path.length(); });
    return out;
}

std::optional<ExitWitness> find_exit(const Ultragraph& g, const EdgePath& cycle) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        SymbolicVertexSet r = g.range(cycle[i]);
        const EdgeRef& next = cycle[(i + 1) % cycle.size()];
        EdgeSet others = g.epsilon(r).minus(EdgeSet::of({next}));
        if (!others.empty()) return ExitWitness{ExitWitness::Kind::Edge, i, others.enumerate(1)[0], {}};
        SymbolicVertexSet sinks = r.intersect(g.sinks());
        if (!sinks.empty()) return ExitWitness{ExitWitness::Kind::Sink, i, cycle[i], sinks.enumerate(1)[0]};
    }
    return std::nullopt;
}

ConditionLResult check_condition_L(const Ultragraph& g, std::size_t max_len, Index truncation) {
    ConditionLResult res;
    res.max_len = max_len;
    res.truncation = truncation;
    std::vector<Cycle> cycles = find_cycles(g, max_len, truncation);
    res.cycles_checked = cycles.size();
    for (const auto& c : cycles) {
        if (!find_exit(g, c.path.edges)) {
            res.verdict = ConditionLResult::Verdict::Fails;
            res.counterexample = c;
            return res;
        }
    }
    // An exitless cycle repeats a block of distinct single edges, and any
    // cycle through a constant-source family has an exit; so the search is
    // complete once max_len covers all single edges, unless some family takes
    // its sources from a vertex family.
    std::size_t singles = 0;
    for (const auto& d : g.edge_families())
        if (!d.indexed) ++singles;
    bool complete = !g.has_source_indexed_family() && max_len >= singles;
    res.verdict = complete ? ConditionLResult::Verdict::Holds : ConditionLResult::Verdict::Unknown;
    return res;
}

// --------------------------------------------------------------- isolation

IsolationResult classify_isolated(const VertexAlgebra& alg, const BoundaryPoint& p) {
    const Ultragraph& g = alg.graph();
    IsolationResult r;
    if (!p.infinite) {
        auto c = p.path.range.cardinality();
        bool sink = c.is_finite() && c.count == 1 && g.is_sink(p.path.range.members()[0]);
        r.isolated = sink;
        r.reason = sink ? "eventual-sink" : "minimal-range";
        return r;
    }
    r.witness = find_exit(g, p.cycle);
    r.isolated = !r.witness;
    r.reason = r.isolated ? "exitless-cycle" : "cycle-has-exit";
    return r;
}

IsolationResult classify_isolated(const VertexAlgebra& alg, const FamilyTail& x) {
    const Ultragraph& g = alg.graph();
    if (!g.has_edge_family(x.family) || !g.edge_decl(x.family).indexed)
        throw std::invalid_argument("'" + x.family + "' is not an indexed edge family");
    Index generic = std::max(x.start, 2 * g.explicit_index_bound() + 2);
    EdgePath walk = x.prefix;
    for (Index i = x.start; i <= generic + 1; ++i) walk.push_back(EdgeRef::indexed(x.family, i));
    if (!is_admissible(g, walk)) throw std::invalid_argument("the family tail is not an ultrapath");
    SymbolicVertexSet r = g.range(EdgeRef::indexed(x.family, generic));
    Cardinality size = r.cardinality(), out = g.epsilon(r).cardinality();
    bool many_vertices = size.infinite || size.count >= 2;
    bool many_edges = out.infinite || out.count >= 2;
    IsolationResult res;
    res.isolated = !many_vertices && !many_edges;
    res.reason = res.isolated ? "eventually-non-wandering" : "wandering-structure";
    return res;
}

StabReport stabilizers(const Ultragraph& g, const BoundaryPoint& p) {
    StabReport s;
    if (!p.infinite) {
        s.rule = "finite point";
        return s;
    }
    std::size_t d = p.cycle.size();
    s.stab = {d};
    s.stab_min = d;
    if (find_exit(g, p.cycle)) {
        s.rule = "cycle has an exit";
    } else {
        s.stab_ess = {d};
        s.stab_ess_min = d;
        s.rule = "cycle has no exit";
    }
    return s;
}

// ---------------------------------------------------------------- groupoid

GroupoidElement GroupoidElement::make(BoundaryPoint x, std::size_t m, BoundaryPoint y, std::size_t n) {
    GroupoidElement g{std::move(x), static_cast<std::int64_t>(m) - static_cast<std::int64_t>(n), std::move(y), m, n};
    if (!g.certified()) throw std::invalid_argument("shift certificate fails for " + g.x.str() + " and " + g.y.str());
    return g;
}

bool GroupoidElement::certified() const {
    try {
        return k == static_cast<std::int64_t>(m) - static_cast<std::int64_t>(n) && shift_n(x, m) == shift_n(y, n);
    } catch (const LengthTooShort&) {
        return false;
    }
}

GroupoidElement groupoid_compose(const GroupoidElement& g1, const GroupoidElement& g2) {
    if (!(g1.y == g2.x)) throw std::invalid_argument("elements are not composable");
    std::size_t p = std::max(g1.n, g2.m);
    return GroupoidElement::make(g1.x, g1.m + p - g1.n, g2.y, g2.n + p - g2.m);
}

GroupoidElement groupoid_inverse(const GroupoidElement& g) { return {g.y, -g.k, g.x, g.n, g.m}; }

// ------------------------------------------------------------- block maps

std::int64_t CocycleTable::at(const BoundaryPoint& x) const {
    std::size_t best_len = 0;
    std::int64_t value = fallback;
    bool found = false;
    for (const auto& [key, v] : entries) {
        if (found && key.size() <= best_len) continue;
        if (x.first_edges(key.size()) != key) continue;
        best_len = key.size();
        value = v;
        found = true;
    }
    return value;
}

BlockMap BlockMap::identity() {
    BlockMap h;
    h.passthrough = true;
    h.l.fallback = 1;
    h.l_inv.fallback = 1;
    return h;
}

BoundaryPoint apply_forward(const BlockMap& h, const BoundaryPoint& x) {
    return rewrite(h.forward, h.rename, h.passthrough, x);
}

BoundaryPoint apply_backward(const BlockMap& h, const BoundaryPoint& y) {
    return rewrite(h.backward, inverted(h.rename), h.passthrough, y);
}

// ---------------------------------------------------------------- sampling

std::vector<BoundaryPoint> enumerate_points(const VertexAlgebra& alg, const PointBounds& b) {
    const Ultragraph& g = alg.graph();
    std::vector<EdgeRef> edges = g.edges_up_to(b.truncation);
    auto next = successors(g, edges);
    std::vector<BoundaryPoint> out;
    std::set<std::string> seen;
    auto add = [&](BoundaryPoint p) {
        if (out.size() >= b.limit) return;
        if (seen.insert(p.str()).second) out.push_back(std::move(p));
    };
    auto stopping_ranges = [&](const SymbolicVertexSet& r) {
        std::vector<SymbolicVertexSet> ends;
        for (const auto& m : alg.minimal_sets())
            if (m.set.is_subset_of(r)) ends.push_back(m.set);
        for (const auto& v : r.intersect(g.sinks()).enumerate(3)) ends.push_back(SymbolicVertexSet::single(v));
        return ends;
    };

    for (const auto& end : stopping_ranges(g.all_vertices())) add(BoundaryPoint::finite({}, end));

    // Admissible paths by increasing length.
    std::vector<EdgePath> layer;
    for (const auto& e : edges) layer.push_back({e});
    std::vector<EdgePath> short_paths{{}};
    std::vector<std::vector<EdgePath>> layers;
    for (std::size_t len = 1; len <= std::max(b.max_finite_length, b.max_prefix) && !layer.empty(); ++len) {
        layers.push_back(layer);
        std::vector<EdgePath> grown;
        for (const auto& p : layer) {
            if (grown.size() > 4 * b.limit) break;
            for (const auto& f : next[p.back()]) {
                EdgePath q = p;
                q.push_back(f);
                grown.push_back(std::move(q));
            }
        }
        layer = std::move(grown);
    }
    for (std::size_t len = 1; len <= b.max_prefix && len <= layers.size(); ++len)
        for (const auto& p : layers[len - 1]) short_paths.push_back(p);

    for (const auto& c : find_cycles(g, b.max_cycle, b.truncation)) {
        for (const auto& mu : short_paths) {
            if (!mu.empty() && !g.range(mu.back()).contains(g.source(c.path.edges.front()))) continue;
            add(BoundaryPoint::periodic(mu, c.path.edges));
        }
    }
    for (std::size_t len = 1; len <= b.max_finite_length && len <= layers.size(); ++len)
        for (const auto& p : layers[len - 1])
            for (const auto& end : stopping_ranges(g.range(p.back()))) add(BoundaryPoint::finite(p, end));
    return out;
}

// ------------------------------------------------------------ orbit check

OrbitReport check_orbit_equivalence(const VertexAlgebra& source, const VertexAlgebra& target, const BlockMap& h,
                                    std::size_t samples, std::size_t depth, std::uint64_t seed) {
    OrbitReport rep;
    rep.coe_identities.name = "coe-identities";
    rep.stab_preservation.name = "stabiliser-preservation";
    rep.eq1.name = "forward-cocycle";
    rep.eq2.name = "backward-cocycle";
    rep.eventual_conjugacy.name = "eventual-conjugacy";

    PointBounds bounds;
    bounds.max_finite_length = depth;
    std::vector<BoundaryPoint> pool_x = enumerate_points(source, bounds);
    std::vector<BoundaryPoint> pool_y = enumerate_points(target, bounds);

    std::mt19937_64 rng(seed);
    auto draw = [&](const std::vector<BoundaryPoint>& pool) {
        std::vector<BoundaryPoint> picked;
        if (pool.empty()) return picked;
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (std::size_t i = 0; i < samples; ++i) picked.push_back(pool[pick(rng)]);
        return picked;
    };
    std::vector<BoundaryPoint> xs = draw(pool_x), ys = draw(pool_y);
    rep.samples = xs.size() + ys.size();

    auto identities = [&](const std::vector<BoundaryPoint>& pts, auto map, const CocycleTable& k, const CocycleTable& l,
                          const VertexAlgebra& image_space, const char* label) {
        for (const auto& x : pts) {
            BoundaryPoint hx = map(x);
            if (!in_boundary(image_space, hx)) fail(rep.coe_identities, std::string(label) + " image " + hx.str() + " of " + x.str() + " is not a point");
            if (x.length() == std::optional<std::size_t>(0)) continue;
            ++rep.coe_identities.checked;
            std::int64_t kx = k.at(x), lx = l.at(x);
            if (lx != kx + 1) fail(rep.eventual_conjugacy, std::string(label) + " x=" + x.str() + " l=" + std::to_string(lx) + " k=" + std::to_string(kx));
            ++rep.eventual_conjugacy.checked;
            try {
                BoundaryPoint lhs = shift_n(hx, static_cast<std::size_t>(lx));
                BoundaryPoint rhs = shift_n(map(shift(x)), static_cast<std::size_t>(kx));
                if (!(lhs == rhs))
                    fail(rep.coe_identities, std::string(label) + " x=" + x.str() + ": " + lhs.str() + " != " + rhs.str());
            } catch (const LengthTooShort& e) {
                fail(rep.coe_identities, std::string(label) + " x=" + x.str() + ": " + e.what());
            }
            ++rep.stab_preservation.checked;
            if (stab_min_of(x).has_value() != stab_min_of(hx).has_value())
                fail(rep.stab_preservation, std::string(label) + " x=" + x.str() + " h(x)=" + hx.str());
        }
    };
    auto fwd = [&](const BoundaryPoint& x) { return apply_forward(h, x); };
    auto bwd = [&](const BoundaryPoint& y) { return apply_backward(h, y); };
    identities(xs, fwd, h.k, h.l, target, "forward");
    identities(ys, bwd, h.k_inv, h.l_inv, source, "backward");

    auto equation = [&](CheckResult& check, const std::vector<BoundaryPoint>& pool, auto map, const CocycleTable& k,
                        const CocycleTable& l) {
        for (const auto& x : pool) {
            if (!x.infinite || !x.prefix.empty()) continue;
            ++check.checked;
            std::size_t p = x.cycle.size();
            std::int64_t sum = 0;
            BoundaryPoint cur = x;
            for (std::size_t n = 0; n < p; ++n) {
                sum += l.at(cur) - k.at(cur);
                cur = shift(cur);
            }
            auto image_min = stab_min_of(map(x));
            std::int64_t lhs = sum < 0 ? -sum : sum;
            if (!image_min || static_cast<std::int64_t>(*image_min) != lhs)
                fail(check, "x=" + x.str() + ": |sum(l-k)|=" + std::to_string(lhs) + " but stab_min(h(x))=" +
                                (image_min ? std::to_string(*image_min) : std::string("inf")));
        }
    };
    equation(rep.eq1, pool_x, fwd, h.k, h.l);
    equation(rep.eq2, pool_y, bwd, h.k_inv, h.l_inv);
    return rep;
}

}  // namespace ultra
