#pragma once

#include "ultra/boundary.hpp"
#include "ultra/linear.hpp"
#include "ultra/scalar.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ultra {

/// The ultragraph has a feature the KMS compiler does not encode.
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A cylinder would receive negative mass; the function violates m3.
class NegativeMass : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// N(e) > 1 per single edge or edge family; unlisted edges get `fallback`.
struct EdgeWeight {
    std::map<std::string, Scalar> values;
    Scalar fallback = 2;

    static EdgeWeight uniform(Scalar n) { return {{}, std::move(n)}; }
    const Scalar& at(const EdgeRef& e) const;
    /// Throws std::invalid_argument unless every value exceeds 1.
    void check() const;
};

/**
 * @brief Candidate values of m on atoms.
 *
 * Named vertices and family heads F[base..truncation] carry their own
 * values, `tail` is the total over F[i] for i > truncation, and each
 * infinite minimal set carries m of the whole set.
 */
struct MFunction {
    struct FamilyValues {
        std::vector<Scalar> heads;  ///< from the family base upwards
        Scalar tail;
    };
    Index truncation = 0;
    std::map<std::string, Scalar> vertices;
    std::map<std::string, FamilyValues> families;
    std::vector<std::pair<SymbolicVertexSet, Scalar>> minimal_sets;
};

enum class GroundConvention {
    Printed,          ///< m(A) = 0 for every finite set emitting finitely many edges, sinks included
    ZeroTemperature,  ///< sinks keep their mass; only vertices that emit edges are forced to 0
};

struct KmsVariable {
    enum class Kind { Vertex, Tail, Minimal };
    Kind kind = Kind::Vertex;
    VertexRef vertex;       ///< Kind::Vertex
    std::string family;     ///< Kind::Tail
    SymbolicVertexSet set;  ///< Kind::Minimal
    std::string label;      ///< Kind::Minimal: how the set is generated, e.g. "r(e)"
    std::string name() const;
};

struct KmsConstraint {
    enum class Sense { Equal, AtLeast };
    std::string condition;  ///< m1, m2, m3 or bound
    std::string set;        ///< generating set A
    std::vector<Scalar> coeffs;
    Sense sense = Sense::Equal;
    Scalar rhs;
    std::string str(const std::vector<KmsVariable>& vars) const;
};

/**
 * @brief The compiled conditions on m for one ultragraph, weight and beta.
 *
 * m(A) is linear in the variables: the atom values of A plus, for each
 * infinite minimal set M inside A, the mass m(M) carries beyond its vertices.
 */
class ConstraintSystem {
public:
    std::vector<KmsVariable> variables;
    std::vector<KmsConstraint> constraints;
    Index truncation = 0;
    bool m1_attained = true;
    bool ground = false;
    Scalar beta;
    EdgeWeight weights;

    /// N(e)^(-beta); 0 for ground systems.
    Scalar factor(const EdgeRef& e) const;
    Scalar factor(const EdgePath& p) const;

    /// m(A) as coefficients over the variables.
    std::vector<Scalar> form(const SymbolicVertexSet& a) const;
    /// Sum of the vertex masses of A, without minimal-set surplus.
    std::vector<Scalar> vertex_form(const SymbolicVertexSet& a) const;
    Scalar value(const std::vector<Scalar>& x, const SymbolicVertexSet& a) const;

    std::vector<Scalar> assignment(const MFunction& m) const;
    MFunction mfunction(const std::vector<Scalar>& x) const;

private:
    friend ConstraintSystem build_system(const VertexAlgebra&, const EdgeWeight&, const Scalar&, Index, bool,
                                         GroundConvention);
    const Ultragraph* graph_ = nullptr;
    std::map<VertexRef, std::size_t> vertex_var_;
    std::map<std::string, std::size_t> tail_var_;
    std::vector<std::pair<SymbolicVertexSet, std::size_t>> minimal_var_;
    void add(std::vector<Scalar>& acc, const std::vector<Scalar>& f, const Scalar& scale) const;
};

ConstraintSystem build_system(const VertexAlgebra& alg, const EdgeWeight& n, const Scalar& beta, Index truncation,
                              bool ground, GroundConvention convention);

/// Throws NotRfum2, Unsupported (source-indexed edge families), std::invalid_argument.
ConstraintSystem build_constraints(const VertexAlgebra& alg, const EdgeWeight& n, const Scalar& beta,
                                   Index truncation);

struct KmsSolution {
    bool feasible = false;
    std::vector<Scalar> assignment;
    MFunction m;
    std::size_t dimension = 0;
};

KmsSolution solve_kms(const ConstraintSystem& system);
KmsSolution solve_ground(const VertexAlgebra& alg, Index truncation,
                         GroundConvention convention = GroundConvention::Printed);

struct Violation {
    std::string condition;
    std::string set;
    Scalar residual;
};

std::vector<Violation> check_assignment(const ConstraintSystem& system, const std::vector<Scalar>& x,
                                        const Scalar& tol);
std::vector<Violation> verify_m(const MFunction& m, const VertexAlgebra& alg, const EdgeWeight& n,
                                const Scalar& beta, const Scalar& tol);

/// kappa and mu for a fixed m.
class SemiringMeasure {
public:
    SemiringMeasure(const VertexAlgebra& alg, ConstraintSystem system, std::vector<Scalar> x)
        : alg_(&alg), system_(std::move(system)), x_(std::move(x)) {}

    Scalar m(const SymbolicVertexSet& a) const { return system_.value(x_, a); }
    /// Throws NegativeMass.
    Scalar kappa(const Cylinder& c) const;
    Scalar mu(const std::vector<Cylinder>& region) const;
    const ConstraintSystem& system() const { return system_; }

private:
    const VertexAlgebra* alg_;
    ConstraintSystem system_;
    std::vector<Scalar> x_;
};

struct SweepRow {
    Scalar beta;
    bool feasible = false;
    std::size_t dimension = 0;
    std::optional<std::string> error;
};

std::vector<SweepRow> beta_sweep(const VertexAlgebra& alg, const EdgeWeight& n, const std::vector<Scalar>& betas,
                                 Index truncation);

}  // namespace ultra
