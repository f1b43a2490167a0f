#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "natalg/natset.hpp"

namespace natalg {

// =========================================================================
// Finite commutative Boolean monoids presented by atoms.
//
// Elements are atom subsets packed into a bit mask; the monoid operation
// is given on atoms and extended additively, which bakes in normality and
// additivity. Whether a given table is commutative, associative and has e
// as unit is a property to check, not an assumption.
// =========================================================================

using CbmElement = std::uint32_t;

class FiniteCBM {
public:
    FiniteCBM(unsigned atom_count, std::vector<std::vector<CbmElement>> atom_table,
              CbmElement e);

    unsigned atom_count() const { return atom_count_; }
    std::size_t element_count() const { return std::size_t{1} << atom_count_; }
    CbmElement top() const { return static_cast<CbmElement>(element_count() - 1); }
    CbmElement e() const { return e_; }

    // Interpretation of the constant g. Defaults to the value of the term
    // comp(comp(e) o comp(e)) /\ comp(e) at construction time; survives
    // later table mutations so that checkers can expose a broken table.
    CbmElement g_element() const { return g_; }

    CbmElement atom_product(unsigned i, unsigned j) const { return table_[i][j]; }

    // Additive extension of the atom table.
    CbmElement circ(CbmElement x, CbmElement y) const;

    CbmElement closure(CbmElement x) const { return circ(x, top()); }
    bool is_congruence_element(CbmElement x) const { return closure(x) == x; }

    // Replace one atom product. Keeps the recorded g.
    void mutate_atom_product(unsigned i, unsigned j, CbmElement value);

    std::string format_element(CbmElement x) const;  // e.g. "{g0,g2}" or "bot"

private:
    unsigned atom_count_;
    std::vector<std::vector<CbmElement>> table_;
    CbmElement e_;
    CbmElement g_;
};

// Quotient of the plus monoid's complex algebra by the congruence that
// collapses everything above n: atoms g0..gn, gi o gj = g(i+j) truncated.
FiniteCBM make_bn(unsigned n);

// pi_n: sends a set to the atoms below n it meets. A homomorphism for the
// Boolean operations, oplus and the constants.
CbmElement quotient_pi(unsigned n, const FinCofSet& a);

// ---- terms over the CBM signature ---------------------------------------

struct AlgTerm;
using AlgTermPtr = std::shared_ptr<const AlgTerm>;

struct AlgTerm {
    enum class Op { Var, Bot, Top, E, G, Join, Meet, Compl, Circ };
    Op op;
    std::string var;
    AlgTermPtr left, right;
};

AlgTermPtr alg_var(std::string name);
AlgTermPtr alg_bot();
AlgTermPtr alg_top();
AlgTermPtr alg_e();
AlgTermPtr alg_g();
AlgTermPtr alg_join(AlgTermPtr l, AlgTermPtr r);
AlgTermPtr alg_meet(AlgTermPtr l, AlgTermPtr r);
AlgTermPtr alg_compl(AlgTermPtr t);
AlgTermPtr alg_circ(AlgTermPtr l, AlgTermPtr r);
AlgTermPtr alg_closure(AlgTermPtr t);      // t o top
AlgTermPtr alg_g_power(unsigned n);        // e for n = 0

using AlgAssignment = std::map<std::string, CbmElement>;

CbmElement eval_alg_term(const AlgTerm& t, const FiniteCBM& alg,
                         const AlgAssignment& asg);

// ---- identity checking ---------------------------------------------------

struct IdentityScheme {
    std::string name;
    AlgTermPtr lhs, rhs;
};

// The corpus checked against every algebra: the monoid and operator axioms
// plus the structural identities of the variety.
IdentityScheme cbm_axiom_commutative();
IdentityScheme cbm_axiom_associative();
IdentityScheme cbm_axiom_unit();
IdentityScheme cbm_axiom_normal();
IdentityScheme cbm_axiom_additive();
std::vector<IdentityScheme> cbm_axiom_suite();

IdentityScheme identity_ge0();
IdentityScheme identity_ge1(unsigned n);
IdentityScheme identity_ge2();
IdentityScheme identity_ge4();
IdentityScheme identity_ge5(unsigned n);
IdentityScheme identity_ge7();
// ge0/ge2/ge4/ge7 plus ge1/ge5 instantiated for indices 0..index_limit.
std::vector<IdentityScheme> ge_identity_suite(unsigned index_limit);

struct CheckMode {
    enum class Kind { Exhaustive, Random } kind = Kind::Exhaustive;
    std::uint64_t seed = 0;
    std::uint64_t trials = 1000;
};

struct IdentityResult {
    bool holds = true;
    AlgAssignment counterexample;  // populated when holds is false
};

// Exhaustive mode is a decision and reports the lexicographically least
// counterexample; random mode is sound for counterexamples only.
IdentityResult check_identity(const IdentityScheme& s, const FiniteCBM& alg,
                              const CheckMode& mode = {});

// ---- congruence structure ------------------------------------------------

struct CongruenceIdeal {
    CbmElement generator;               // a congruence element
    std::vector<CbmElement> elements;   // its principal ideal, ascending
};

// All congruence ideals, ordered by inclusion (size, then generator).
// Requires element_count() <= 2^16.
std::vector<CongruenceIdeal> congruences(const FiniteCBM& alg);

struct Classification {
    bool subdirectly_irreducible = false;
    bool simple = false;
    std::vector<CbmElement> annihilators;
    std::optional<unsigned> isomorphic_to_bn;
    bool congruence_elements_chain = false;
    bool e_is_atom = false;
};

Classification classify(const FiniteCBM& alg);

// ---- the idempotent semigroup of prime-power sets -------------------------

struct PoSubsetCheck {
    std::vector<Nat> primes;    // the nonempty subset M
    std::vector<Nat> window;    // a_M within [1, B]
    bool idempotent = false;    // a_M (x) a_M = a_M on the window
};

struct PoReport {
    bool ok = false;
    std::vector<PoSubsetCheck> checks;   // one per nonempty subset, 2^n - 1 total
    bool windows_distinct = false;
    bool union_law = false;              // a_M (x) a_N = a_{M u N} on the window
    bool full_product_absorbs = false;   // a_P (x) a_M = a_P for every M
};

// Verifies the semigroup within [1, B]. At most 3 distinct primes.
PoReport check_po_idempotents(const std::vector<Nat>& primes, Nat bound);

}  // namespace natalg
