#pragma once

#include "ultra/boundary.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ultra {

/// The shift is undefined on points of length 0 (or shorter than n).
class LengthTooShort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A block map has no rule for some sampled prefix.
class RuleGap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

BoundaryPoint shift(const BoundaryPoint& p);
BoundaryPoint shift_n(const BoundaryPoint& p, std::size_t n);

struct Cycle {
    Ultrapath path;  ///< range is r(last edge)
    bool simple = true;
};

struct ExitWitness {
    enum class Kind { Edge, Sink };
    Kind kind = Kind::Edge;
    std::size_t position = 0;  ///< index i with the witness inside r(alpha_i)
    EdgeRef edge;              ///< Kind::Edge: the leaving edge; Kind::Sink: alpha_i
    VertexRef sink;            ///< Kind::Sink
    std::string str() const;
};

/// True when `edges` splits into two or more consecutive closed pieces.
bool is_concatenation_of_cycles(const Ultragraph& g, const EdgePath& edges, const SymbolicVertexSet& range);
std::vector<Cycle> find_cycles(const Ultragraph& g, std::size_t max_len, Index truncation);
std::optional<ExitWitness> find_exit(const Ultragraph& g, const EdgePath& cycle);
inline bool has_exit(const Ultragraph& g, const Cycle& c) { return find_exit(g, c.path.edges).has_value(); }

struct ConditionLResult {
    enum class Verdict { Holds, Fails, Unknown };
    Verdict verdict = Verdict::Holds;
    std::optional<Cycle> counterexample;
    std::size_t max_len = 0;
    Index truncation = 0;
    std::size_t cycles_checked = 0;
};

ConditionLResult check_condition_L(const Ultragraph& g, std::size_t max_len, Index truncation);

struct IsolationResult {
    bool isolated = false;
    std::string reason;  ///< eventual-sink, minimal-range, exitless-cycle, cycle-has-exit, ...
    std::optional<ExitWitness> witness;
};

/// An infinite path prefix g[start] g[start+1] ... along one indexed edge family.
struct FamilyTail {
    EdgePath prefix;
    std::string family;
    Index start = 0;
};

IsolationResult classify_isolated(const VertexAlgebra& alg, const BoundaryPoint& p);
IsolationResult classify_isolated(const VertexAlgebra& alg, const FamilyTail& x);

/// d*Z with d >= 1, or {0} when d = 0.
struct Subgroup {
    std::size_t generator = 0;
    std::string str() const { return generator == 0 ? "{0}" : std::to_string(generator) + "Z"; }
    bool contains(std::int64_t k) const {
        return generator == 0 ? k == 0 : k % static_cast<std::int64_t>(generator) == 0;
    }
    bool operator==(const Subgroup&) const = default;
};

struct StabReport {
    Subgroup stab;
    std::optional<std::size_t> stab_min;  ///< nullopt = infinity
    Subgroup stab_ess;
    std::optional<std::size_t> stab_ess_min;
    std::string rule;  ///< how stab_ess was obtained
};

StabReport stabilizers(const Ultragraph& g, const BoundaryPoint& p);

/// (x, m - n, y) with shift^m(x) = shift^n(y).
struct GroupoidElement {
    BoundaryPoint x;
    std::int64_t k = 0;
    BoundaryPoint y;
    std::size_t m = 0;
    std::size_t n = 0;

    /// Throws std::invalid_argument if the certificate does not hold.
    static GroupoidElement make(BoundaryPoint x, std::size_t m, BoundaryPoint y, std::size_t n);
    static GroupoidElement unit(const BoundaryPoint& x) { return {x, 0, x, 0, 0}; }
    bool certified() const;
};

GroupoidElement groupoid_compose(const GroupoidElement& g1, const GroupoidElement& g2);
GroupoidElement groupoid_inverse(const GroupoidElement& g);

/// Value table keyed by longest matching edge prefix.
struct CocycleTable {
    std::vector<std::pair<EdgePath, std::int64_t>> entries;
    std::int64_t fallback = 0;
    std::int64_t at(const BoundaryPoint& x) const;
};

/**
 * @brief Finite presentation of a map between boundary spaces.
 *
 * Edge sequences are rewritten block by block using the longest matching
 * left-hand side; ranges of finite points are carried over with vertex and
 * family ids renamed. The backward rules present the inverse map.
 */
struct BlockMap {
    std::vector<std::pair<EdgePath, EdgePath>> forward;
    std::vector<std::pair<EdgePath, EdgePath>> backward;
    std::map<std::string, std::string> rename;  ///< source id -> target id (edges and vertices)
    bool passthrough = false;                   ///< unmatched edges map to their renamed selves
    CocycleTable k, l, k_inv, l_inv;

    static BlockMap identity();
};

BoundaryPoint apply_forward(const BlockMap& h, const BoundaryPoint& x);
BoundaryPoint apply_backward(const BlockMap& h, const BoundaryPoint& y);

struct PointBounds {
    std::size_t max_finite_length = 8;
    std::size_t max_prefix = 4;
    std::size_t max_cycle = 6;
    Index truncation = 4;
    std::size_t limit = 2000;
};

/// Deterministic list of representable points within the bounds.
std::vector<BoundaryPoint> enumerate_points(const VertexAlgebra& alg, const PointBounds& b);

struct CheckResult {
    std::string name;
    bool pass = true;
    std::size_t checked = 0;
    std::vector<std::string> witnesses;
};

struct OrbitReport {
    CheckResult coe_identities;
    CheckResult stab_preservation;
    CheckResult eq1;
    CheckResult eq2;
    CheckResult eventual_conjugacy;
    std::size_t samples = 0;
    bool all_pass() const { return coe_identities.pass && stab_preservation.pass && eq1.pass && eq2.pass; }
};

OrbitReport check_orbit_equivalence(const VertexAlgebra& source, const VertexAlgebra& target, const BlockMap& h,
                                    std::size_t samples, std::size_t depth, std::uint64_t seed);

}  // namespace ultra
