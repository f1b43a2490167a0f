#pragma once

#include <string>
#include <vector>

#include "natalg/equations.hpp"
#include "natalg/natset.hpp"

namespace natalg {

// =========================================================================
// Conjunctive grammars over the one-letter alphabet {a}: context-free
// productions extended with an intersection between conjuncts. A word is
// derived by an alternative when every conjunct of that alternative
// derives it.
// =========================================================================

struct GrammarSymbol {
    enum class Kind { Terminal, Epsilon, Nonterminal } kind;
    std::string name;  // nonterminal name
};

using Concatenation = std::vector<GrammarSymbol>;  // nonempty

struct Alternative {
    std::vector<Concatenation> conjuncts;  // nonempty; all must match
};

struct Production {
    std::string lhs;
    std::vector<Alternative> alternatives;
};

struct ConjGrammar {
    std::string start;  // the first production's left-hand side
    std::vector<Production> productions;

    std::vector<std::string> nonterminals() const;
};

class GrammarError : public std::runtime_error {
public:
    GrammarError(std::string message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                  : std::move(message)),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Line format:  Nonterminal -> conjunct & conjunct | alternative
// where a conjunct is a space-separated string over `a`, `eps` and
// nonterminal names. '#' starts a comment. Multiple lines for the same
// nonterminal accumulate alternatives. Every referenced nonterminal needs
// at least one production.
ConjGrammar parse_grammar(const std::string& text);

std::string format_grammar(const ConjGrammar& g);

// The length-image translation: eps to {0}, a to {1}, concatenation to
// plus, conjunction to inter, alternatives to union; one variable per
// nonterminal, named after it.
ResolvedSystem to_equation_system(const ConjGrammar& g);

// Index of the start variable within the translated system.
std::size_t start_variable_index(const ConjGrammar& g);

// Lengths of derivable words up to the bound: the start component of the
// translated system's least fixpoint.
std::vector<Nat> bounded_language(const ConjGrammar& g, Nat bound);

// Independent oracle: bottom-up saturation of (nonterminal, length) facts
// straight from the productions, no translation involved.
bool naive_derivable(const ConjGrammar& g, Nat length);

}  // namespace natalg
