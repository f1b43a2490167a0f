#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "natalg/circuit.hpp"
#include "natalg/natset.hpp"

namespace natalg {

// =========================================================================
// Terms over the circuit signature, equation systems over set variables,
// and the bounded-stage machinery. A stage-n check interprets everything
// inside the finite universe [0, n]: omega is [0, n], complement is taken
// relative to it, sums and products are truncated, and emptiness means
// emptiness of the truncated set.
// =========================================================================

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    NodeOp op;
    Nat value = 0;     // Const
    std::string var;   // Var
    TermPtr left, right;
};

TermPtr t_const(Nat n);
TermPtr t_empty();
TermPtr t_omega();
TermPtr t_var(std::string name);
TermPtr t_comp(TermPtr t);
TermPtr t_down(TermPtr t);
TermPtr t_union(TermPtr l, TermPtr r);
TermPtr t_inter(TermPtr l, TermPtr r);
TermPtr t_plus(TermPtr l, TermPtr r);
TermPtr t_times(TermPtr l, TermPtr r);

struct Equation {
    TermPtr lhs, rhs;
};

struct EquationSystem {
    std::vector<Equation> equations;

    // Variable names in sorted order; assignment vectors are index-aligned.
    std::vector<std::string> variables() const;
    bool monotone() const;  // no complement anywhere
};

// ---- s-expression front end ----------------------------------------------
//
//   term     := var | empty | omega | (const N) | (comp t) | (down t)
//             | (union t t) | (inter t t) | (plus t t) | (times t t)
//   equation := (= term term)
//
// A system file is a sequence of equations; '#' starts a comment.

TermPtr parse_term(const std::string& text);
Equation parse_equation(const std::string& text);
EquationSystem parse_equation_system(const std::string& text);

std::string format_term(const Term& t);
std::string format_equation(const Equation& eq);
std::string format_system(const EquationSystem& sys);

// ---- term evaluation -------------------------------------------------------

FinCofSet eval_term_fincof(const Term& t, const FinCofAssignment& asg);
WindowSet eval_term_window(const Term& t, const WindowAssignment& asg, Nat bound);

// Truncated semantics over [0, stage]; variable values are index-aligned
// with `vars`. The word variant requires stage <= 63.
Bits eval_term_stage(const Term& t, const std::map<std::string, std::size_t>& index,
                     const std::vector<Bits>& values, Nat stage);
std::uint64_t eval_term_stage64(const Term& t,
                                const std::map<std::string, std::size_t>& index,
                                const std::vector<std::uint64_t>& values, Nat stage);

// ---- bounded-stage satisfiability -----------------------------------------

using StageWitness = std::vector<std::vector<Nat>>;  // elements per variable

struct SearchLimits {
    unsigned exhaustive_bits = 24;   // enumerate when m*(n+1) fits
    std::uint64_t random_trials = 0; // fallback budget; 0 disables it
    std::uint64_t seed = 0;
};

enum class StageOutcome { SolutionFound, NoSolution, BudgetExhausted };

struct StageResult {
    Nat stage = 0;
    StageOutcome outcome = StageOutcome::NoSolution;
    std::optional<StageWitness> witness;  // lexicographically least solution
};

// Decides stage-n satisfiability when the assignment space fits the
// exhaustive budget (or the system is a resolved one plus emptiness
// constraints, which is decided through its least fixpoint); otherwise
// falls back to seeded random search, sound for SolutionFound only.
StageResult bounded_sat(const EquationSystem& sys, Nat stage,
                        const SearchLimits& limits = {});

// All stage-n solutions in lexicographic order. Exhaustive budget applies.
std::vector<StageWitness> stage_solutions(const EquationSystem& sys, Nat stage,
                                          const SearchLimits& limits = {});

bool is_stage_solution(const EquationSystem& sys, const StageWitness& w, Nat stage);

// ---- the unsatisfiability semidecision --------------------------------------

struct SemidecideResult {
    enum class Kind { Unsat, Unknown } kind;
    Nat stage;  // first failing stage, or the last stage tried
};

// Runs the stage checks for n = 0..max_n. Requires a monotone system in
// which every equation either uses only union/inter/plus or literally
// requires a term to be empty; for those, failure of a stage refutes every
// solution over full powersets. Never claims satisfiability.
SemidecideResult semidecide_unsat(const EquationSystem& sys, Nat max_n,
                                  const SearchLimits& limits = {});

// Longest nested chain of stage solutions s0 <= s1 <= ... up to max_n,
// preferring lexicographically least members. Evidence, not proof, of
// satisfiability in the limit.
std::vector<StageWitness> stage_chain(const EquationSystem& sys, Nat max_n,
                                      const SearchLimits& limits = {});

// ---- resolved systems and least fixpoints -----------------------------------

struct ResolvedSystem {
    std::vector<std::string> vars;  // ordered as given
    std::vector<TermPtr> defs;      // one monotone defining term per variable
};

// Reads a system as X_i = phi_i; requires exactly one defining equation per
// variable and complement- and down-free right-hand sides.
ResolvedSystem to_resolved(const EquationSystem& sys);

struct ResolvedWithConstraints {
    ResolvedSystem resolved;
    std::vector<TermPtr> empty_constraints;  // each required to denote empty
};

// Splits a system into defining equations plus tau = empty constraints,
// when it has that shape.
std::optional<ResolvedWithConstraints> decompose_resolved(const EquationSystem& sys);

// Kleene iteration from the empty assignment over [0, bound]; stabilizes
// within vars * (bound + 1) rounds. Result windows carry Unknown tails.
std::vector<WindowSet> least_fixpoint(const ResolvedSystem& rs, Nat bound);

// ---- inequation transforms ---------------------------------------------------

enum class InequationMode { Discriminator, Annihilator };
enum class DiscriminatorKind { PlusTimes, PlusLeq };

// Rewrites tau != sigma into an equation through the symmetric difference:
// a discriminator pushes it to "= omega", the zero annihilator of the
// product monoid to "= {0}". Rejects terms outside the signature the
// chosen device lives in.
Equation transform_inequation(const TermPtr& tau, const TermPtr& sigma,
                              InequationMode mode,
                              DiscriminatorKind kind = DiscriminatorKind::PlusTimes);

}  // namespace natalg
