#include "natalg/grammar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace natalg {

std::vector<std::string> ConjGrammar::nonterminals() const {
    std::vector<std::string> out;
    for (const Production& p : productions) out.push_back(p.lhs);
    return out;
}

// -------------------------------------------------------------- parsing --

namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

Concatenation parse_concatenation(const std::string& text, std::size_t line) {
    Concatenation out;
    std::istringstream is(text);
    std::string sym;
    while (is >> sym) {
        if (sym == "a")
            out.push_back({GrammarSymbol::Kind::Terminal, ""});
        else if (sym == "eps")
            out.push_back({GrammarSymbol::Kind::Epsilon, ""});
        else
            out.push_back({GrammarSymbol::Kind::Nonterminal, sym});
    }
    if (out.empty()) throw GrammarError("empty conjunct", line);
    return out;
}

}  // namespace

ConjGrammar parse_grammar(const std::string& text) {
    ConjGrammar g;
    std::map<std::string, std::size_t> by_name;

    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = line.substr(0, line.find('#'));
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        auto arrow = line.find("->");
        if (arrow == std::string::npos)
            throw GrammarError("expected 'Nonterminal -> ...'", lineno);

        std::istringstream head(line.substr(0, arrow));
        std::string lhs, extra;
        head >> lhs;
        if (lhs.empty() || (head >> extra))
            throw GrammarError("expected a single nonterminal before '->'", lineno);
        if (lhs == "a" || lhs == "eps")
            throw GrammarError("'" + lhs + "' cannot be a nonterminal", lineno);

        std::vector<Alternative> alts;
        for (const std::string& alt_text : split_on(line.substr(arrow + 2), '|')) {
            Alternative alt;
            for (const std::string& conj_text : split_on(alt_text, '&'))
                alt.conjuncts.push_back(parse_concatenation(conj_text, lineno));
            alts.push_back(std::move(alt));
        }

        auto it = by_name.find(lhs);
        if (it == by_name.end()) {
            by_name.emplace(lhs, g.productions.size());
            g.productions.push_back({lhs, std::move(alts)});
        } else {
            auto& dst = g.productions[it->second].alternatives;
            dst.insert(dst.end(), alts.begin(), alts.end());
        }
    }

    if (g.productions.empty()) throw GrammarError("no productions");
    g.start = g.productions.front().lhs;

    for (const Production& p : g.productions)
        for (const Alternative& alt : p.alternatives)
            for (const Concatenation& conj : alt.conjuncts)
                for (const GrammarSymbol& s : conj)
                    if (s.kind == GrammarSymbol::Kind::Nonterminal && !by_name.count(s.name))
                        throw GrammarError("undefined nonterminal '" + s.name + "'");

    return g;
}

std::string format_grammar(const ConjGrammar& g) {
    std::ostringstream os;
    for (const Production& p : g.productions) {
        os << p.lhs << " ->";
        for (std::size_t a = 0; a < p.alternatives.size(); ++a) {
            if (a) os << " |";
            const Alternative& alt = p.alternatives[a];
            for (std::size_t c = 0; c < alt.conjuncts.size(); ++c) {
                if (c) os << " &";
                for (const GrammarSymbol& s : alt.conjuncts[c]) {
                    os << ' ';
                    switch (s.kind) {
                        case GrammarSymbol::Kind::Terminal: os << 'a'; break;
                        case GrammarSymbol::Kind::Epsilon: os << "eps"; break;
                        case GrammarSymbol::Kind::Nonterminal: os << s.name; break;
                    }
                }
            }
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------- translation --

namespace {

TermPtr symbol_term(const GrammarSymbol& s) {
    switch (s.kind) {
        case GrammarSymbol::Kind::Terminal: return t_const(1);
        case GrammarSymbol::Kind::Epsilon: return t_const(0);
        default: return t_var(s.name);
    }
}

TermPtr concatenation_term(const Concatenation& conj) {
    TermPtr acc = symbol_term(conj.front());
    for (std::size_t i = 1; i < conj.size(); ++i)
        acc = t_plus(acc, symbol_term(conj[i]));
    return acc;
}

}  // namespace

ResolvedSystem to_equation_system(const ConjGrammar& g) {
    ResolvedSystem rs;
    for (const Production& p : g.productions) {
        TermPtr def;
        for (const Alternative& alt : p.alternatives) {
            TermPtr alt_term = concatenation_term(alt.conjuncts.front());
            for (std::size_t c = 1; c < alt.conjuncts.size(); ++c)
                alt_term = t_inter(alt_term, concatenation_term(alt.conjuncts[c]));
            def = def ? t_union(def, alt_term) : alt_term;
        }
        rs.vars.push_back(p.lhs);
        rs.defs.push_back(def);
    }
    return rs;
}

std::size_t start_variable_index(const ConjGrammar& g) {
    for (std::size_t i = 0; i < g.productions.size(); ++i)
        if (g.productions[i].lhs == g.start) return i;
    throw GrammarError("start symbol has no production");
}

std::vector<Nat> bounded_language(const ConjGrammar& g, Nat bound) {
    auto fixpoint = least_fixpoint(to_equation_system(g), bound);
    return fixpoint[start_variable_index(g)].one.elements();
}

// --------------------------------------------------------------- oracle --

bool naive_derivable(const ConjGrammar& g, Nat length) {
    if (length > (Nat{1} << 12))
        throw std::invalid_argument("oracle bound exceeded");
    const Nat size = length + 1;
    const auto names = g.nonterminals();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

    // derivable[i][k]: nonterminal i derives a^k
    std::vector<std::vector<char>> derivable(names.size(), std::vector<char>(size, 0));

    auto concat_lengths = [&](const Concatenation& conj) {
        std::vector<char> acc(size, 0);
        acc[0] = 1;
        for (const GrammarSymbol& s : conj) {
            std::vector<char> next(size, 0);
            switch (s.kind) {
                case GrammarSymbol::Kind::Epsilon:
                    next = acc;
                    break;
                case GrammarSymbol::Kind::Terminal:
                    for (Nat k = 0; k + 1 < size; ++k)
                        if (acc[k]) next[k + 1] = 1;
                    break;
                case GrammarSymbol::Kind::Nonterminal: {
                    const auto& d = derivable[index.at(s.name)];
                    for (Nat k = 0; k < size; ++k) {
                        if (!acc[k]) continue;
                        for (Nat j = 0; k + j < size; ++j)
                            if (d[j]) next[k + j] = 1;
                    }
                    break;
                }
            }
            acc = std::move(next);
        }
        return acc;
    };

    // saturate until no (nonterminal, length) fact is added
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < g.productions.size(); ++i) {
            for (const Alternative& alt : g.productions[i].alternatives) {
                std::vector<char> meet(size, 1);
                for (const Concatenation& conj : alt.conjuncts) {
                    auto lens = concat_lengths(conj);
                    for (Nat k = 0; k < size; ++k) meet[k] = meet[k] && lens[k];
                }
                for (Nat k = 0; k < size; ++k)
                    if (meet[k] && !derivable[i][k]) {
                        derivable[i][k] = 1;
                        changed = true;
                    }
            }
        }
    }

    return derivable[start_variable_index(g)][length];
}

}  // namespace natalg
