#include "ultra/linear.hpp"

#include <map>
#include <optional>
#include <string>

namespace ultra {

namespace {

constexpr std::size_t kRowLimit = 200000;

bool all_zero(const std::vector<Scalar>& a) {
    for (const auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

bool constant_holds(const LinearRow& r) { return r.strict ? r.b.sign() > 0 : r.b.sign() >= 0; }

/// Scales so the first nonzero coefficient has absolute value 1 and merges
/// rows with identical left sides. Returns false on a violated constant row.
bool tidy(std::vector<LinearRow>& rows) {
    std::map<std::string, LinearRow> kept;
    std::vector<std::string> order;
    for (auto& r : rows) {
        if (all_zero(r.a)) {
            if (!constant_holds(r)) return false;
            continue;
        }
        Scalar lead;
        for (const auto& x : r.a)
            if (!x.is_zero()) {
                lead = abs(x);
                break;
            }
        std::string key;
        for (auto& x : r.a) {
            x = x.is_zero() ? Scalar(0) : x / lead;
            key += x.str() + ",";
        }
        r.b /= lead;
        auto it = kept.find(key);
        if (it == kept.end()) {
            order.push_back(key);
            kept.emplace(key, std::move(r));
        } else if (r.b < it->second.b || (r.b == it->second.b && r.strict)) {
            it->second = std::move(r);
        }
    }
    rows.clear();
    for (const auto& k : order) rows.push_back(std::move(kept.at(k)));
    return true;
}

/// Removes variable j; returns false if the system is found infeasible.
bool eliminate(std::vector<LinearRow>& rows, std::size_t j) {
    std::vector<LinearRow> pos, neg, out;
    for (auto& r : rows) {
        int s = r.a[j].sign();
        if (s > 0)
            pos.push_back(std::move(r));
        else if (s < 0)
            neg.push_back(std::move(r));
        else
            out.push_back(std::move(r));
    }
    if (pos.size() * neg.size() + out.size() > kRowLimit) throw SizeLimit("Fourier-Motzkin produced too many rows");
    for (const auto& p : pos) {
        Scalar sp = p.a[j];
        for (const auto& q : neg) {
            Scalar sq = -q.a[j];
            LinearRow r;
            r.a.resize(p.a.size());
            for (std::size_t i = 0; i < p.a.size(); ++i) r.a[i] = i == j ? Scalar(0) : p.a[i] / sp + q.a[i] / sq;
            r.b = p.b / sp + q.b / sq;
            r.strict = p.strict || q.strict;
            out.push_back(std::move(r));
        }
    }
    rows = std::move(out);
    return tidy(rows);
}

/// Projections: levels[k] only involves variables < k.
std::optional<std::vector<std::vector<LinearRow>>> project(std::vector<LinearRow> rows, std::size_t n) {
    std::vector<std::vector<LinearRow>> levels(n + 1);
    if (!tidy(rows)) return std::nullopt;
    levels[n] = rows;
    for (std::size_t j = n; j-- > 0;) {
        if (!eliminate(rows, j)) return std::nullopt;
        levels[j] = rows;
    }
    return levels;
}

}  // namespace

bool row_reduce(std::vector<LinearRow>& rows, std::size_t columns, std::vector<std::size_t>& pivots) {
    pivots.clear();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < columns && rank < rows.size(); ++c) {
        std::size_t r = rank;
        while (r < rows.size() && rows[r].a[c].is_zero()) ++r;
        if (r == rows.size()) continue;
        std::swap(rows[rank], rows[r]);
        Scalar lead = rows[rank].a[c];
        for (auto& x : rows[rank].a) x /= lead;
        rows[rank].b /= lead;
        for (std::size_t o = 0; o < rows.size(); ++o) {
            if (o == rank || rows[o].a[c].is_zero()) continue;
            Scalar f = rows[o].a[c];
            for (std::size_t i = 0; i < columns; ++i) rows[o].a[i] -= f * rows[rank].a[i];
            rows[o].a[c] = 0;
            rows[o].b -= f * rows[rank].b;
        }
        pivots.push_back(c);
        ++rank;
    }
    for (std::size_t r = rank; r < rows.size(); ++r)
        if (!rows[r].b.is_zero()) return false;
    rows.resize(rank);
    return true;
}

bool fm_feasible(std::vector<LinearRow> rows, std::size_t variables) {
    if (!tidy(rows)) return false;
    for (std::size_t j = variables; j-- > 0;)
        if (!eliminate(rows, j)) return false;
    return true;
}

LinearSolution solve_linear(const LinearProblem& p, std::size_t max_free) {
    const std::size_t n = p.variables;
    LinearSolution sol;
    std::vector<LinearRow> eq = p.equalities;
    std::vector<std::size_t> pivots;
    if (!row_reduce(eq, n, pivots)) return sol;

    std::vector<bool> is_pivot(n, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    const std::size_t m = free_cols.size();
    if (m > max_free)
        throw SizeLimit(std::to_string(m) + " free variables exceed the limit of " + std::to_string(max_free));

    // x = offset + basis * y over the free coordinates y.
    std::vector<Scalar> offset(n);
    std::vector<std::vector<Scalar>> basis(n, std::vector<Scalar>(m));
    for (std::size_t k = 0; k < m; ++k) basis[free_cols[k]][k] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        offset[pivots[r]] = eq[r].b;
        for (std::size_t k = 0; k < m; ++k) basis[pivots[r]][k] = -eq[r].a[free_cols[k]];
    }

    std::vector<LinearRow> reduced;
    for (const auto& row : p.inequalities) {
        LinearRow r;
        r.a.assign(m, Scalar(0));
        r.b = row.b;
        r.strict = row.strict;
        for (std::size_t i = 0; i < n; ++i) {
            if (row.a[i].is_zero()) continue;
            r.b -= row.a[i] * offset[i];
            for (std::size_t k = 0; k < m; ++k)
                if (!basis[i][k].is_zero()) r.a[k] += row.a[i] * basis[i][k];
        }
        reduced.push_back(std::move(r));
    }

    auto levels = project(reduced, m);
    if (!levels) return sol;
    sol.feasible = true;

    std::vector<Scalar> y(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::optional<Scalar> lower, upper;
        for (const auto& r : (*levels)[j + 1]) {
            const Scalar& c = r.a[j];
            if (c.is_zero()) continue;
            Scalar rest = r.b;
            for (std::size_t i = 0; i < j; ++i) rest -= r.a[i] * y[i];
            Scalar bound = rest / c;
            if (c.sign() > 0) {
                if (!upper || bound < *upper) upper = bound;
            } else if (!lower || bound > *lower) {
                lower = bound;
            }
        }
        if (lower)
            y[j] = *lower;
        else
            y[j] = upper && *upper < Scalar(0) ? *upper : Scalar(0);
    }
    sol.point.assign(n, Scalar(0));
    for (std::size_t i = 0; i < n; ++i) {
        sol.point[i] = offset[i];
        for (std::size_t k = 0; k < m; ++k)
            if (!basis[i][k].is_zero()) sol.point[i] += basis[i][k] * y[k];
    }

    // Inequalities that cannot hold strictly are implicit equalities; they
    // cut the dimension by their rank.
    std::vector<LinearRow> tight;
    std::vector<LinearRow> base = reduced;
    tidy(base);
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::vector<LinearRow> trial = base;
        trial[i].strict = true;
        if (!fm_feasible(std::move(trial), m)) tight.push_back(base[i]);
    }
    std::vector<std::size_t> tight_pivots;
    for (auto& r : tight) r.b = 0;
    row_reduce(tight, m, tight_pivots);
    sol.dimension = m - tight_pivots.size();
    return sol;
}

}  // namespace ultra
