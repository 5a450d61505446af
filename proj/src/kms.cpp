#include "ultra/kms.hpp"

#include <algorithm>

namespace ultra {

const Scalar& EdgeWeight::at(const EdgeRef& e) const {
    auto it = values.find(e.family);
    return it == values.end() ? fallback : it->second;
}

void EdgeWeight::check() const {
    if (fallback <= Scalar(1)) throw std::invalid_argument("edge weights must exceed 1");
    for (const auto& [id, v] : values)
        if (v <= Scalar(1)) throw std::invalid_argument("weight of '" + id + "' must exceed 1, got " + v.str());
}

std::string KmsVariable::name() const {
    switch (kind) {
        case Kind::Vertex:
            return "m(" + vertex.str() + ")";
        case Kind::Tail:
            return "tail(" + family + ")";
        case Kind::Minimal:
            return "m(" + (label.empty() ? set.pretty() : label) + ")";
    }
    return "";
}

std::string KmsConstraint::str(const std::vector<KmsVariable>& vars) const {
    std::string lhs;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const Scalar& c = coeffs[i];
        if (c.is_zero()) continue;
        bool neg = c.sign() < 0;
        Scalar mag = abs(c);
        if (!lhs.empty())
            lhs += neg ? " - " : " + ";
        else if (neg)
            lhs += "-";
        if (mag != Scalar(1)) lhs += mag.str() + " ";
        lhs += vars[i].name();
    }
    if (lhs.empty()) lhs = "0";
    return condition + " at " + set + ": " + lhs + (sense == Sense::Equal ? " = " : " >= ") + rhs.str();
}

// ------------------------------------------------------------ system

Scalar ConstraintSystem::factor(const EdgeRef& e) const {
    if (ground) return 0;
    return inverse_power(weights.at(e), beta);
}

Scalar ConstraintSystem::factor(const EdgePath& p) const {
    Scalar f = 1;
    for (const auto& e : p) f *= factor(e);
    return f;
}

void ConstraintSystem::add(std::vector<Scalar>& acc, const std::vector<Scalar>& f, const Scalar& scale) const {
    for (std::size_t i = 0; i < acc.size(); ++i)
        if (!f[i].is_zero()) acc[i] += scale * f[i];
}

std::vector<Scalar> ConstraintSystem::vertex_form(const SymbolicVertexSet& a) const {
    std::vector<Scalar> f(variables.size());
    for (const auto& n : a.named()) f[vertex_var_.at(VertexRef::named(n))] += 1;
    for (const auto& [id, part] : a.families()) {
        Index base = graph_->family_base(id);
        for (Index i = base; i <= truncation; ++i)
            if (part.contains(i)) f[vertex_var_.at(VertexRef::indexed(id, i))] += 1;
        if (part.cofinite) {
            f[tail_var_.at(id)] += 1;
        } else if (auto hi = part.max_explicit(); hi && *hi > truncation) {
            throw std::invalid_argument("vertex " + VertexRef::indexed(id, *hi).str() + " lies beyond truncation " +
                                        std::to_string(truncation));
        }
    }
    return f;
}

std::vector<Scalar> ConstraintSystem::form(const SymbolicVertexSet& a) const {
    std::vector<Scalar> f = vertex_form(a);
    for (const auto& [set, idx] : minimal_var_) {
        if (!set.is_subset_of(a)) continue;
        f[idx] += 1;
        add(f, vertex_form(set), Scalar(-1));
    }
    return f;
}

Scalar ConstraintSystem::value(const std::vector<Scalar>& x, const SymbolicVertexSet& a) const {
    std::vector<Scalar> f = form(a);
    Scalar v = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!f[i].is_zero()) v += f[i] * x[i];
    return v;
}

std::vector<Scalar> ConstraintSystem::assignment(const MFunction& m) const {
    std::vector<Scalar> x(variables.size());
    std::set<std::string> used_vertices;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const KmsVariable& v = variables[i];
        if (v.kind == KmsVariable::Kind::Vertex) {
            std::string key = v.vertex.str();
            if (auto it = m.vertices.find(key); it != m.vertices.end()) {
                x[i] = it->second;
                used_vertices.insert(key);
            } else if (v.vertex.index) {
                auto fam = m.families.find(v.vertex.name);
                auto k = static_cast<std::size_t>(*v.vertex.index - graph_->family_base(v.vertex.name));
                if (fam != m.families.end() && k < fam->second.heads.size()) x[i] = fam->second.heads[k];
            }
        } else if (v.kind == KmsVariable::Kind::Tail) {
            if (auto fam = m.families.find(v.family); fam != m.families.end()) x[i] = fam->second.tail;
        }
    }
    for (const auto& key : m.vertices)
        if (!used_vertices.count(key.first))
            throw std::invalid_argument("m assigns a value to unknown vertex '" + key.first + "'");
    for (const auto& [id, fam] : m.families) {
        if (!graph_->has_vertex_family(id)) throw std::invalid_argument("m names unknown vertex family '" + id + "'");
        if (static_cast<Index>(fam.heads.size()) > truncation - graph_->family_base(id) + 1)
            throw std::invalid_argument("family '" + id + "' lists heads beyond truncation " +
                                        std::to_string(truncation));
    }
    for (const auto& [set, idx] : minimal_var_) {
        auto it = std::find_if(m.minimal_sets.begin(), m.minimal_sets.end(),
                               [&](const auto& p) { return p.first == set; });
        if (it != m.minimal_sets.end()) {
            x[idx] = it->second;
        } else {
            // No surplus beyond the vertices.
            std::vector<Scalar> f = vertex_form(set);
            for (std::size_t i = 0; i < f.size(); ++i)
                if (!f[i].is_zero()) x[idx] += f[i] * x[i];
        }
    }
    for (const auto& [set, value] : m.minimal_sets)
        if (std::none_of(minimal_var_.begin(), minimal_var_.end(), [&](const auto& p) { return p.first == set; }))
            throw std::invalid_argument(set.pretty() + " is not an infinite minimal set");
    return x;
}

MFunction ConstraintSystem::mfunction(const std::vector<Scalar>& x) const {
    MFunction m;
    m.truncation = truncation;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const KmsVariable& v = variables[i];
        switch (v.kind) {
            case KmsVariable::Kind::Vertex:
                if (v.vertex.index)
                    m.families[v.vertex.name].heads.push_back(x[i]);
                else
                    m.vertices[v.vertex.name] = x[i];
                break;
            case KmsVariable::Kind::Tail:
                m.families[v.family].tail = x[i];
                break;
            case KmsVariable::Kind::Minimal:
                m.minimal_sets.emplace_back(v.set, x[i]);
                break;
        }
    }
    return m;
}

ConstraintSystem build_system(const VertexAlgebra& alg, const EdgeWeight& n, const Scalar& beta, Index truncation,
                              bool ground, GroundConvention convention) {
    const Ultragraph& g = alg.graph();
    if (g.has_source_indexed_family())
        throw Unsupported("edge families with vertex-family sources are not supported by the KMS compiler");
    if (Rfum2Verdict v = alg.check_rfum2(); !v.holds)
        throw NotRfum2("range of '" + v.counterexample.value_or("?") +
                           "' is not a finite union of minimal sets and vertices",
                       v.residue.value_or(SymbolicVertexSet{}));
    if (beta.sign() < 0) throw std::invalid_argument("beta must be nonnegative");
    if (!ground) n.check();

    ConstraintSystem s;
    s.graph_ = &g;
    s.ground = ground;
    s.beta = beta;
    s.weights = n;
    s.truncation = std::max(truncation, g.explicit_index_bound());

    auto add_var = [&](KmsVariable v) {
        s.variables.push_back(std::move(v));
        return s.variables.size() - 1;
    };
    std::vector<VertexRef> atoms;
    for (const auto& name : g.named_vertices()) {
        VertexRef v = VertexRef::named(name);
        s.vertex_var_[v] = add_var({KmsVariable::Kind::Vertex, v, {}, {}, {}});
        atoms.push_back(v);
    }
    for (const auto& fam : g.vertex_families()) {
        for (Index i = fam.base; i <= s.truncation; ++i) {
            VertexRef v = VertexRef::indexed(fam.id, i);
            s.vertex_var_[v] = add_var({KmsVariable::Kind::Vertex, v, {}, {}, {}});
            atoms.push_back(v);
        }
        s.tail_var_[fam.id] = add_var({KmsVariable::Kind::Tail, {}, fam.id, {}, {}});
    }
    for (const auto& mset : alg.minimal_sets()) {
        if (mset.set.cardinality().is_finite()) continue;
        s.minimal_var_.emplace_back(mset.set, add_var({KmsVariable::Kind::Minimal, {}, {}, mset.set, mset.provenance.str()}));
    }

    const std::size_t nv = s.variables.size();
    auto push = [&](std::string condition, std::string set, std::vector<Scalar> coeffs, KmsConstraint::Sense sense,
                    Scalar rhs) {
        s.constraints.push_back({std::move(condition), std::move(set), std::move(coeffs), sense, std::move(rhs)});
    };

    // m1: total mass of all atoms plus every minimal-set surplus.
    SymbolicVertexSet everything = g.all_vertices();
    std::vector<Scalar> total = s.vertex_form(everything);
    for (const auto& [set, idx] : s.minimal_var_) {
        total[idx] += 1;
        s.add(total, s.vertex_form(set), Scalar(-1));
    }
    s.m1_attained = alg.as_generalized(everything).has_value();
    push("m1", everything.pretty(), total, KmsConstraint::Sense::Equal, 1);

    // m2 on singletons; finite regular sets follow by additivity.
    for (const auto& v : atoms) {
        if (g.is_infinite_emitter_vertex(v)) continue;
        SymbolicVertexSet single = SymbolicVertexSet::single(v);
        std::vector<Scalar> f = s.vertex_form(single);
        if (g.is_sink(v)) {
            if (ground && convention == GroundConvention::Printed)
                push("m2", single.pretty(), f, KmsConstraint::Sense::Equal, 0);
            continue;
        }
        for (const auto& e : g.edges_from(v).members()) s.add(f, s.form(g.range(e)), -s.factor(e));
        push("m2", single.pretty(), f, KmsConstraint::Sense::Equal, 0);
    }
    // Vertices past the truncation are sinks.
    if (ground && convention == GroundConvention::Printed) {
        for (const auto& [id, idx] : s.tail_var_) {
            std::vector<Scalar> f(nv);
            f[idx] = 1;
            push("m2", id + "[i], i > " + std::to_string(s.truncation), f, KmsConstraint::Sense::Equal, 0);
        }
    }

    // m3 at infinite emitter vertices, summing over all of their edges.
    if (!ground) {
        for (const auto& v : g.infinite_emitter_vertices()) {
            std::string label = SymbolicVertexSet::single(v).pretty();
            std::vector<Scalar> f = s.vertex_form(SymbolicVertexSet::single(v));
            for (const auto& d : g.edge_families()) {
                if (d.source.indexed || d.source.vertex != v) continue;
                EdgeRef first = d.indexed ? EdgeRef::indexed(d.id, d.base) : EdgeRef::single(d.id);
                Scalar w = s.factor(first);
                if (!d.indexed) {
                    s.add(f, s.form(d.range.set), -w);
                } else if (!d.range.indexed) {
                    // Infinitely many edges share one range, whose mass must vanish.
                    std::vector<Scalar> r = s.form(d.range.set);
                    for (auto& c : r) c = -c;
                    push("m3", label, r, KmsConstraint::Sense::AtLeast, 0);
                } else {
                    for (const auto& ref : d.range.refs) {
                        Index lo = std::max(d.base + ref.offset, g.family_base(ref.family));
                        s.add(f, s.vertex_form(SymbolicVertexSet::family(ref.family, lo)), -w);
                    }
                }
            }
            push("m3", label, f, KmsConstraint::Sense::AtLeast, 0);
        }
    }
    // m3 at minimal sets: m(M) covers the vertices of M.
    for (const auto& [set, idx] : s.minimal_var_) {
        std::vector<Scalar> f(nv);
        f[idx] = 1;
        s.add(f, s.vertex_form(set), Scalar(-1));
        push("m3", set.pretty(), f, KmsConstraint::Sense::AtLeast, 0);
    }
    for (std::size_t i = 0; i < nv; ++i) {
        std::vector<Scalar> lo(nv), hi(nv);
        lo[i] = 1;
        hi[i] = -1;
        push("bound", s.variables[i].name(), lo, KmsConstraint::Sense::AtLeast, 0);
        push("bound", s.variables[i].name(), hi, KmsConstraint::Sense::AtLeast, -1);
    }
    return s;
}

ConstraintSystem build_constraints(const VertexAlgebra& alg, const EdgeWeight& n, const Scalar& beta,
                                   Index truncation) {
    return build_system(alg, n, beta, truncation, false, GroundConvention::Printed);
}

KmsSolution solve_kms(const ConstraintSystem& system) {
    LinearProblem p;
    p.variables = system.variables.size();
    for (const auto& c : system.constraints) {
        if (c.sense == KmsConstraint::Sense::Equal) {
            p.equalities.push_back({c.coeffs, c.rhs, false});
        } else {
            LinearRow r{c.coeffs, -c.rhs, false};
            for (auto& x : r.a) x = -x;
            p.inequalities.push_back(std::move(r));
        }
    }
    LinearSolution ls = solve_linear(p);
    KmsSolution out;
    out.feasible = ls.feasible;
    if (!ls.feasible) return out;
    out.assignment = ls.point;
    out.dimension = ls.dimension;
    out.m = system.mfunction(ls.point);
    return out;
}

KmsSolution solve_ground(const VertexAlgebra& alg, Index truncation, GroundConvention convention) {
    return solve_kms(build_system(alg, EdgeWeight{}, Scalar(0), truncation, true, convention));
}

std::vector<Violation> check_assignment(const ConstraintSystem& system, const std::vector<Scalar>& x,
                                        const Scalar& tol) {
    std::vector<Violation> out;
    for (const auto& c : system.constraints) {
        Scalar lhs = 0;
        for (std::size_t i = 0; i < c.coeffs.size(); ++i)
            if (!c.coeffs[i].is_zero()) lhs += c.coeffs[i] * x[i];
        Scalar residual = lhs - c.rhs;
        bool bad = c.sense == KmsConstraint::Sense::Equal ? abs(residual) > tol : residual < -tol;
        if (bad) out.push_back({c.condition, c.set, residual});
    }
    return out;
}

std::vector<Violation> verify_m(const MFunction& m, const VertexAlgebra& alg, const EdgeWeight& n,
                                const Scalar& beta, const Scalar& tol) {
    ConstraintSystem s = build_constraints(alg, n, beta, m.truncation);
    if (s.truncation != m.truncation)
        throw std::invalid_argument("truncation " + std::to_string(m.truncation) +
                                    " is below the largest explicit index " + std::to_string(s.truncation));
    return check_assignment(s, s.assignment(m), tol);
}

// ----------------------------------------------------------- measure

Scalar SemiringMeasure::kappa(const Cylinder& c) const {
    if (c.set.empty()) return 0;
    const Ultragraph& g = alg_->graph();
    if (c.excluded_edges.cardinality().infinite || c.excluded_sinks.cardinality().infinite)
        throw std::invalid_argument("kappa needs finite exclusions: " + c.str());
    Scalar weight = system_.factor(c.path);
    Scalar v = weight * m(c.set);
    for (const auto& e : c.excluded_edges.members()) v -= weight * system_.factor(e) * m(g.range(e));
    for (const auto& s : c.excluded_sinks.members()) v -= weight * m(SymbolicVertexSet::single(s));
    if (v.sign() < 0) throw NegativeMass("kappa(" + c.str() + ") = " + v.str() + " < 0");
    return v;
}

Scalar SemiringMeasure::mu(const std::vector<Cylinder>& region) const {
    Scalar total = 0;
    for (const auto& c : disjointify(*alg_, region)) total += kappa(c);
    return total;
}

std::vector<SweepRow> beta_sweep(const VertexAlgebra& alg, const EdgeWeight& n, const std::vector<Scalar>& betas,
                                 Index truncation) {
    std::vector<SweepRow> rows;
    for (const auto& b : betas) {
        SweepRow row;
        row.beta = b;
        try {
            KmsSolution sol = solve_kms(build_constraints(alg, n, b, truncation));
            row.feasible = sol.feasible;
            row.dimension = sol.dimension;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ultra
