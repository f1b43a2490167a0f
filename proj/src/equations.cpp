#include "natalg/equations.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace natalg {

// ------------------------------------------------------------ factories --

namespace {
TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }
}  // namespace

TermPtr t_const(Nat n) { return make({NodeOp::Const, n, "", nullptr, nullptr}); }
TermPtr t_empty() { return make({NodeOp::Empty, 0, "", nullptr, nullptr}); }
TermPtr t_omega() { return make({NodeOp::Omega, 0, "", nullptr, nullptr}); }
TermPtr t_var(std::string name) {
    return make({NodeOp::Var, 0, std::move(name), nullptr, nullptr});
}
TermPtr t_comp(TermPtr t) { return make({NodeOp::Comp, 0, "", std::move(t), nullptr}); }
TermPtr t_down(TermPtr t) { return make({NodeOp::Down, 0, "", std::move(t), nullptr}); }
TermPtr t_union(TermPtr l, TermPtr r) {
    return make({NodeOp::Union, 0, "", std::move(l), std::move(r)});
}
TermPtr t_inter(TermPtr l, TermPtr r) {
    return make({NodeOp::Inter, 0, "", std::move(l), std::move(r)});
}
TermPtr t_plus(TermPtr l, TermPtr r) {
    return make({NodeOp::Plus, 0, "", std::move(l), std::move(r)});
}
TermPtr t_times(TermPtr l, TermPtr r) {
    return make({NodeOp::Times, 0, "", std::move(l), std::move(r)});
}

namespace {

void walk(const Term& t, const std::function<void(const Term&)>& f) {
    f(t);
    if (t.left) walk(*t.left, f);
    if (t.right) walk(*t.right, f);
}

void collect_vars(const Term& t, std::set<std::string>& out) {
    walk(t, [&](const Term& n) {
        if (n.op == NodeOp::Var) out.insert(n.var);
    });
}

bool term_has_op(const Term& t, NodeOp op) {
    bool found = false;
    walk(t, [&](const Term& n) { found = found || n.op == op; });
    return found;
}

// union/inter/plus and leaves: the operations whose stage views agree with
// restrictions of the unbounded values.
bool term_local(const Term& t) {
    bool ok = true;
    walk(t, [&](const Term& n) {
        switch (n.op) {
            case NodeOp::Comp:
            case NodeOp::Down:
            case NodeOp::Times:
                ok = false;
                break;
            default:
                break;
        }
    });
    return ok;
}

bool term_monotone(const Term& t) { return !term_has_op(t, NodeOp::Comp); }

bool is_empty_literal(const Term& t) { return t.op == NodeOp::Empty; }

}  // namespace

std::vector<std::string> EquationSystem::variables() const {
    std::set<std::string> vars;
    for (const Equation& eq : equations) {
        collect_vars(*eq.lhs, vars);
        collect_vars(*eq.rhs, vars);
    }
    return {vars.begin(), vars.end()};
}

bool EquationSystem::monotone() const {
    for (const Equation& eq : equations)
        if (!term_monotone(*eq.lhs) || !term_monotone(*eq.rhs)) return false;
    return true;
}

// ------------------------------------------------------------- parsing --

namespace {

std::vector<std::string> sexp_tokens(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            toks.push_back(cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(' || c == ')') {
            flush();
            toks.push_back(std::string(1, c));
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            cur += c;
        }
    }
    flush();
    return toks;
}

class SexpReader {
public:
    explicit SexpReader(std::vector<std::string> toks) : toks_(std::move(toks)) {}

    bool done() const { return pos_ >= toks_.size(); }

    const std::string& next() {
        if (done()) throw std::invalid_argument("unexpected end of input");
        return toks_[pos_++];
    }

    void expect(const std::string& tok) {
        if (next() != tok) throw std::invalid_argument("expected '" + tok + "'");
    }

    TermPtr term() {
        const std::string& tok = next();
        if (tok == ")") throw std::invalid_argument("unexpected ')'");
        if (tok != "(") {
            if (tok == "empty") return t_empty();
            if (tok == "omega") return t_omega();
            if (std::isdigit(static_cast<unsigned char>(tok[0])))
                throw std::invalid_argument("bare number '" + tok +
                                            "'; write (const " + tok + ")");
            return t_var(tok);
        }
        const std::string head = next();
        TermPtr out;
        if (head == "const") {
            const std::string& num = next();
            try {
                out = t_const(std::stoull(num));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad constant '" + num + "'");
            }
        } else if (head == "comp") {
            out = t_comp(term());
        } else if (head == "down") {
            out = t_down(term());
        } else if (head == "union") {
            out = t_union(term(), term());
        } else if (head == "inter") {
            out = t_inter(term(), term());
        } else if (head == "plus") {
            out = t_plus(term(), term());
        } else if (head == "times") {
            out = t_times(term(), term());
        } else {
            throw std::invalid_argument("unknown term head '" + head + "'");
        }
        expect(")");
        return out;
    }

    Equation equation() {
        expect("(");
        expect("=");
        Equation eq{term(), term()};
        expect(")");
        return eq;
    }

private:
    std::vector<std::string> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

TermPtr parse_term(const std::string& text) {
    SexpReader r(sexp_tokens(text));
    TermPtr t = r.term();
    if (!r.done()) throw std::invalid_argument("trailing tokens after term");
    return t;
}

Equation parse_equation(const std::string& text) {
    SexpReader r(sexp_tokens(text));
    Equation eq = r.equation();
    if (!r.done()) throw std::invalid_argument("trailing tokens after equation");
    return eq;
}

EquationSystem parse_equation_system(const std::string& text) {
    SexpReader r(sexp_tokens(text));
    EquationSystem sys;
    while (!r.done()) sys.equations.push_back(r.equation());
    return sys;
}

std::string format_term(const Term& t) {
    switch (t.op) {
        case NodeOp::Const: return "(const " + std::to_string(t.value) + ")";
        case NodeOp::Empty: return "empty";
        case NodeOp::Omega: return "omega";
        case NodeOp::Var: return t.var;
        case NodeOp::Comp: return "(comp " + format_term(*t.left) + ")";
        case NodeOp::Down: return "(down " + format_term(*t.left) + ")";
        case NodeOp::Union:
            return "(union " + format_term(*t.left) + " " + format_term(*t.right) + ")";
        case NodeOp::Inter:
            return "(inter " + format_term(*t.left) + " " + format_term(*t.right) + ")";
        case NodeOp::Plus:
            return "(plus " + format_term(*t.left) + " " + format_term(*t.right) + ")";
        case NodeOp::Times:
            return "(times " + format_term(*t.left) + " " + format_term(*t.right) + ")";
    }
    throw std::logic_error("unreachable");
}

std::string format_equation(const Equation& eq) {
    return "(= " + format_term(*eq.lhs) + " " + format_term(*eq.rhs) + ")";
}

std::string format_system(const EquationSystem& sys) {
    std::string out;
    for (const Equation& eq : sys.equations) {
        out += format_equation(eq);
        out += '\n';
    }
    return out;
}

// ----------------------------------------------------------- evaluation --

FinCofSet eval_term_fincof(const Term& t, const FinCofAssignment& asg) {
    switch (t.op) {
        case NodeOp::Const: return FinCofSet::singleton(t.value);
        case NodeOp::Empty: return FinCofSet::empty();
        case NodeOp::Omega: return FinCofSet::omega();
        case NodeOp::Var: {
            auto it = asg.find(t.var);
            if (it == asg.end())
                throw std::invalid_argument("unbound variable '" + t.var + "'");
            return it->second;
        }
        case NodeOp::Comp: return ~eval_term_fincof(*t.left, asg);
        case NodeOp::Down: return down_close(eval_term_fincof(*t.left, asg));
        case NodeOp::Union:
            return eval_term_fincof(*t.left, asg) | eval_term_fincof(*t.right, asg);
        case NodeOp::Inter:
            return eval_term_fincof(*t.left, asg) & eval_term_fincof(*t.right, asg);
        case NodeOp::Plus:
            return oplus(eval_term_fincof(*t.left, asg), eval_term_fincof(*t.right, asg));
        case NodeOp::Times:
            return otimes(eval_term_fincof(*t.left, asg), eval_term_fincof(*t.right, asg));
    }
    throw std::logic_error("unreachable");
}

WindowSet eval_term_window(const Term& t, const WindowAssignment& asg, Nat bound) {
    switch (t.op) {
        case NodeOp::Const: return to_window(FinCofSet::singleton(t.value), bound);
        case NodeOp::Empty: return to_window(FinCofSet::empty(), bound);
        case NodeOp::Omega: return to_window(FinCofSet::omega(), bound);
        case NodeOp::Var: {
            auto it = asg.find(t.var);
            if (it == asg.end())
                throw std::invalid_argument("unbound variable '" + t.var + "'");
            return it->second;
        }
        case NodeOp::Comp: return ~eval_term_window(*t.left, asg, bound);
        case NodeOp::Down: return down_close(eval_term_window(*t.left, asg, bound));
        case NodeOp::Union:
            return eval_term_window(*t.left, asg, bound) |
                   eval_term_window(*t.right, asg, bound);
        case NodeOp::Inter:
            return eval_term_window(*t.left, asg, bound) &
                   eval_term_window(*t.right, asg, bound);
        case NodeOp::Plus:
            return oplus(eval_term_window(*t.left, asg, bound),
                         eval_term_window(*t.right, asg, bound));
        case NodeOp::Times:
            return otimes(eval_term_window(*t.left, asg, bound),
                          eval_term_window(*t.right, asg, bound));
    }
    throw std::logic_error("unreachable");
}

Bits eval_term_stage(const Term& t, const std::map<std::string, std::size_t>& index,
                     const std::vector<Bits>& values, Nat stage) {
    const std::size_t size = stage + 1;
    switch (t.op) {
        case NodeOp::Const: {
            Bits b(size);
            if (t.value <= stage) b.set(t.value);
            return b;
        }
        case NodeOp::Empty: return Bits::zeros(size);
        case NodeOp::Omega: return Bits::ones(size);
        case NodeOp::Var: {
            auto it = index.find(t.var);
            if (it == index.end())
                throw std::invalid_argument("unbound variable '" + t.var + "'");
            return values[it->second];
        }
        case NodeOp::Comp: return ~eval_term_stage(*t.left, index, values, stage);
        case NodeOp::Down:
            return eval_term_stage(*t.left, index, values, stage).suffix_or();
        case NodeOp::Union:
            return eval_term_stage(*t.left, index, values, stage) |
                   eval_term_stage(*t.right, index, values, stage);
        case NodeOp::Inter:
            return eval_term_stage(*t.left, index, values, stage) &
                   eval_term_stage(*t.right, index, values, stage);
        case NodeOp::Plus: {
            Bits a = eval_term_stage(*t.left, index, values, stage);
            Bits b = eval_term_stage(*t.right, index, values, stage);
            Bits r(size);
            for (Nat k : a.elements()) r.or_shifted(b, k);
            return r;
        }
        case NodeOp::Times: {
            Bits a = eval_term_stage(*t.left, index, values, stage);
            Bits b = eval_term_stage(*t.right, index, values, stage);
            Bits r(size);
            for (Nat k : a.elements()) {
                if (k == 0) continue;
                for (Nat n : b.elements()) {
                    if (n == 0) continue;
                    if (n > stage / k) break;
                    r.set(k * n);
                }
            }
            if ((a.test(0) && b.any()) || (b.test(0) && a.any())) r.set(0);
            return r;
        }
    }
    throw std::logic_error("unreachable");
}

std::uint64_t eval_term_stage64(const Term& t,
                                const std::map<std::string, std::size_t>& index,
                                const std::vector<std::uint64_t>& values, Nat stage) {
    if (stage > 63) throw std::invalid_argument("word evaluator requires stage <= 63");
    const std::uint64_t full =
        stage == 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (stage + 1)) - 1;
    switch (t.op) {
        case NodeOp::Const:
            return t.value <= stage ? std::uint64_t{1} << t.value : 0;
        case NodeOp::Empty: return 0;
        case NodeOp::Omega: return full;
        case NodeOp::Var: {
            auto it = index.find(t.var);
            if (it == index.end())
                throw std::invalid_argument("unbound variable '" + t.var + "'");
            return values[it->second];
        }
        case NodeOp::Comp:
            return full & ~eval_term_stage64(*t.left, index, values, stage);
        case NodeOp::Down: {
            std::uint64_t x = eval_term_stage64(*t.left, index, values, stage);
            if (!x) return 0;
            unsigned h = 63 - std::countl_zero(x);
            return h == 63 ? full : ((std::uint64_t{1} << (h + 1)) - 1) & full;
        }
        case NodeOp::Union:
            return eval_term_stage64(*t.left, index, values, stage) |
                   eval_term_stage64(*t.right, index, values, stage);
        case NodeOp::Inter:
            return eval_term_stage64(*t.left, index, values, stage) &
                   eval_term_stage64(*t.right, index, values, stage);
        case NodeOp::Plus: {
            std::uint64_t a = eval_term_stage64(*t.left, index, values, stage);
            std::uint64_t b = eval_term_stage64(*t.right, index, values, stage);
            std::uint64_t r = 0;
            for (std::uint64_t xs = a; xs;) {
                unsigned k = std::countr_zero(xs);
                xs &= xs - 1;
                r |= b << k;
            }
            return r & full;
        }
        case NodeOp::Times: {
            std::uint64_t a = eval_term_stage64(*t.left, index, values, stage);
            std::uint64_t b = eval_term_stage64(*t.right, index, values, stage);
            std::uint64_t r = 0;
            if ((a & 1 && b) || (b & 1 && a)) r |= 1;
            for (std::uint64_t xs = a >> 1; xs;) {
                unsigned k = std::countr_zero(xs) + 1;
                xs &= xs - 1;
                for (std::uint64_t ys = b >> 1; ys;) {
                    unsigned n = std::countr_zero(ys) + 1;
                    ys &= ys - 1;
                    if (std::uint64_t{k} * n > stage) continue;
                    r |= std::uint64_t{1} << (std::uint64_t{k} * n);
                }
            }
            return r & full;
        }
    }
    throw std::logic_error("unreachable");
}

// -------------------------------------------------- resolved decomposition --

ResolvedSystem to_resolved(const EquationSystem& sys) {
    auto decomposed = decompose_resolved(sys);
    if (!decomposed || !decomposed->empty_constraints.empty())
        throw std::invalid_argument(
            "system is not a resolved one (one defining equation per variable)");
    return decomposed->resolved;
}

std::optional<ResolvedWithConstraints> decompose_resolved(const EquationSystem& sys) {
    ResolvedWithConstraints out;
    std::set<std::string> defined;
    for (const Equation& eq : sys.equations) {
        const bool lhs_is_var = eq.lhs->op == NodeOp::Var;
        if (lhs_is_var && !defined.count(eq.lhs->var) && term_monotone(*eq.rhs) &&
            !term_has_op(*eq.rhs, NodeOp::Down)) {
            defined.insert(eq.lhs->var);
            out.resolved.vars.push_back(eq.lhs->var);
            out.resolved.defs.push_back(eq.rhs);
            continue;
        }
        // remaining shape: some monotone term required to be empty
        TermPtr tau;
        if (is_empty_literal(*eq.rhs))
            tau = eq.lhs;
        else if (is_empty_literal(*eq.lhs))
            tau = eq.rhs;
        else
            return std::nullopt;
        if (!term_monotone(*tau)) return std::nullopt;
        out.empty_constraints.push_back(tau);
    }
    std::set<std::string> all;
    for (const Equation& eq : sys.equations) {
        collect_vars(*eq.lhs, all);
        collect_vars(*eq.rhs, all);
    }
    for (const std::string& v : all)
        if (!defined.count(v)) return std::nullopt;
    return out;
}

// ----------------------------------------------------------- fixpoints --

namespace {

std::vector<Bits> lfp_bits(const ResolvedSystem& rs, Nat bound) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < rs.vars.size(); ++i) index[rs.vars[i]] = i;

    std::vector<Bits> values(rs.vars.size(), Bits::zeros(bound + 1));
    const std::size_t cap = rs.vars.size() * (bound + 1) + 2;
    for (std::size_t round = 0; round < cap; ++round) {
        std::vector<Bits> next(rs.vars.size());
        for (std::size_t i = 0; i < rs.vars.size(); ++i)
            next[i] = eval_term_stage(*rs.defs[i], index, values, bound);
        if (next == values) return values;
        values = std::move(next);
    }
    throw std::logic_error("fixpoint iteration failed to stabilize");
}

}  // namespace

std::vector<WindowSet> least_fixpoint(const ResolvedSystem& rs, Nat bound) {
    for (const TermPtr& def : rs.defs)
        if (!term_monotone(*def))
            throw std::invalid_argument("least_fixpoint requires monotone definitions");
    std::vector<WindowSet> out;
    for (Bits& b : lfp_bits(rs, bound)) out.emplace_back(std::move(b), TailHint::Unknown);
    return out;
}

// ------------------------------------------------------------ stage search --

namespace {

StageWitness witness_from_masks(const std::vector<std::uint64_t>& masks) {
    StageWitness w;
    for (std::uint64_t m : masks) {
        std::vector<Nat> elems;
        for (std::uint64_t ms = m; ms;) {
            elems.push_back(std::countr_zero(ms));
            ms &= ms - 1;
        }
        w.push_back(std::move(elems));
    }
    return w;
}

StageWitness witness_from_bits(const std::vector<Bits>& values) {
    StageWitness w;
    for (const Bits& b : values) w.push_back(b.elements());
    return w;
}

std::vector<std::uint64_t> unpack_assignment(std::uint64_t packed, std::size_t m,
                                             Nat width) {
    const std::uint64_t mask =
        width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    std::vector<std::uint64_t> masks(m);
    for (std::size_t i = 0; i < m; ++i) masks[i] = (packed >> (i * width)) & mask;
    return masks;
}

bool check_all_equations64(const EquationSystem& sys,
                           const std::map<std::string, std::size_t>& index,
                           const std::vector<std::uint64_t>& values, Nat stage) {
    for (const Equation& eq : sys.equations)
        if (eval_term_stage64(*eq.lhs, index, values, stage) !=
            eval_term_stage64(*eq.rhs, index, values, stage))
            return false;
    return true;
}

// The defining equations pin every solution above the Kleene fixpoint, so
// the emptiness constraints are decided by evaluating them there.
std::optional<StageResult> try_lfp_decision(const EquationSystem& sys, Nat stage,
                                            const ResolvedWithConstraints& rc) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < rc.resolved.vars.size(); ++i)
        index[rc.resolved.vars[i]] = i;

    std::vector<Bits> lfp = lfp_bits(rc.resolved, stage);

    StageResult r;
    r.stage = stage;
    for (const TermPtr& tau : rc.empty_constraints) {
        if (eval_term_stage(*tau, index, lfp, stage).any()) {
            r.outcome = StageOutcome::NoSolution;
            return r;
        }
    }
    r.outcome = StageOutcome::SolutionFound;

    // report the witness in sorted-variable order
    auto sorted_vars = sys.variables();
    std::vector<Bits> ordered;
    for (const std::string& v : sorted_vars) ordered.push_back(lfp[index.at(v)]);
    r.witness = witness_from_bits(ordered);
    return r;
}

}  // namespace

StageResult bounded_sat(const EquationSystem& sys, Nat stage, const SearchLimits& limits) {
    const auto vars = sys.variables();
    const std::size_t m = vars.size();
    const Nat width = stage + 1;

    if (auto rc = decompose_resolved(sys)) {
        if (auto r = try_lfp_decision(sys, stage, *rc)) return *r;
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < m; ++i) index[vars[i]] = i;

    StageResult r;
    r.stage = stage;

    if (m * width <= limits.exhaustive_bits && m * width < 64 && stage <= 63) {
        const std::uint64_t total = std::uint64_t{1} << (m * width);
        for (std::uint64_t packed = 0; packed < total; ++packed) {
            auto masks = unpack_assignment(packed, m, width);
            if (check_all_equations64(sys, index, masks, stage)) {
                r.outcome = StageOutcome::SolutionFound;
                r.witness = witness_from_masks(masks);
                return r;
            }
        }
        r.outcome = StageOutcome::NoSolution;
        return r;
    }

    if (limits.random_trials > 0) {
        std::mt19937_64 rng(limits.seed);
        for (std::uint64_t trial = 0; trial < limits.random_trials; ++trial) {
            std::vector<Bits> values;
            values.reserve(m);
            for (std::size_t i = 0; i < m; ++i) {
                Bits b(stage + 1);
                for (Nat p = 0; p <= stage; ++p)
                    if (rng() & 1) b.set(p);
                values.push_back(std::move(b));
            }
            bool ok = true;
            for (const Equation& eq : sys.equations) {
                if (eval_term_stage(*eq.lhs, index, values, stage) !=
                    eval_term_stage(*eq.rhs, index, values, stage)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                r.outcome = StageOutcome::SolutionFound;
                r.witness = witness_from_bits(values);
                return r;
            }
        }
    }

    r.outcome = StageOutcome::BudgetExhausted;
    return r;
}

std::vector<StageWitness> stage_solutions(const EquationSystem& sys, Nat stage,
                                          const SearchLimits& limits) {
    const auto vars = sys.variables();
    const std::size_t m = vars.size();
    const Nat width = stage + 1;
    if (m * width > limits.exhaustive_bits || m * width >= 64)
        throw std::invalid_argument("stage solution space exceeds the exhaustive budget");

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < m; ++i) index[vars[i]] = i;

    std::vector<StageWitness> out;
    const std::uint64_t total = std::uint64_t{1} << (m * width);
    for (std::uint64_t packed = 0; packed < total; ++packed) {
        auto masks = unpack_assignment(packed, m, width);
        if (check_all_equations64(sys, index, masks, stage))
            out.push_back(witness_from_masks(masks));
    }
    return out;
}

bool is_stage_solution(const EquationSystem& sys, const StageWitness& w, Nat stage) {
    const auto vars = sys.variables();
    if (w.size() != vars.size()) return false;
    std::map<std::string, std::size_t> index;
    std::vector<Bits> values;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        index[vars[i]] = i;
        Bits b(stage + 1);
        for (Nat e : w[i]) {
            if (e > stage) return false;
            b.set(e);
        }
        values.push_back(std::move(b));
    }
    for (const Equation& eq : sys.equations)
        if (eval_term_stage(*eq.lhs, index, values, stage) !=
            eval_term_stage(*eq.rhs, index, values, stage))
            return false;
    return true;
}

// ------------------------------------------------------------ semidecide --

SemidecideResult semidecide_unsat(const EquationSystem& sys, Nat max_n,
                                  const SearchLimits& limits) {
    if (!sys.monotone())
        throw std::invalid_argument("semidecide_unsat requires a monotone system");
    // The stage checks refute unbounded solutions only when every equation
    // restricts faithfully: either both sides avoid the non-local
    // operations (product zero and down-closure look beyond the stage), or
    // the equation demands emptiness, which monotone operations preserve
    // downward.
    for (const Equation& eq : sys.equations) {
        bool local = term_local(*eq.lhs) && term_local(*eq.rhs);
        bool empty_form = is_empty_literal(*eq.lhs) || is_empty_literal(*eq.rhs);
        if (!local && !empty_form)
            throw std::invalid_argument(
                "semidecide_unsat: equation mixes times/down with a non-empty "
                "right-hand side; stage failures would not refute it");
    }

    for (Nat n = 0; n <= max_n; ++n) {
        StageResult r = bounded_sat(sys, n, limits);
        if (r.outcome == StageOutcome::NoSolution)
            return {SemidecideResult::Kind::Unsat, n};
        if (r.outcome == StageOutcome::BudgetExhausted)
            throw std::runtime_error("stage " + std::to_string(n) +
                                     " exceeds the search budget");
    }
    return {SemidecideResult::Kind::Unknown, max_n};
}

// ------------------------------------------------------------ stage chain --

std::vector<StageWitness> stage_chain(const EquationSystem& sys, Nat max_n,
                                      const SearchLimits& limits) {
    if (!sys.monotone())
        throw std::invalid_argument("stage_chain requires a monotone system");

    const auto vars = sys.variables();
    const std::size_t m = vars.size();

    // per-level solutions as per-variable masks, in enumeration order
    std::vector<std::vector<std::vector<std::uint64_t>>> levels;
    for (Nat n = 0; n <= max_n; ++n) {
        std::vector<std::vector<std::uint64_t>> level;
        for (const StageWitness& w : stage_solutions(sys, n, limits)) {
            std::vector<std::uint64_t> masks(m, 0);
            for (std::size_t i = 0; i < m; ++i)
                for (Nat e : w[i]) masks[i] |= std::uint64_t{1} << e;
            level.push_back(std::move(masks));
        }
        if (level.empty()) break;
        levels.push_back(std::move(level));
    }
    if (levels.empty()) return {};

    auto below = [m](const std::vector<std::uint64_t>& s,
                     const std::vector<std::uint64_t>& t) {
        for (std::size_t i = 0; i < m; ++i)
            if ((s[i] & t[i]) != s[i]) return false;
        return true;
    };

    // depth-first chain extension with a visit budget; first fit is the
    // lexicographically least extension because levels are enumerated in
    // packed ascending order
    std::size_t budget = 200000;
    std::vector<std::size_t> best;
    std::vector<std::size_t> current;
    std::function<void(std::size_t)> dfs = [&](std::size_t level) {
        if (current.size() > best.size()) best = current;
        if (level >= levels.size() || budget == 0) return;
        const auto& prev = levels[current.size() - 1][current.back()];
        for (std::size_t j = 0; j < levels[level].size() && budget; ++j) {
            --budget;
            if (below(prev, levels[level][j])) {
                current.push_back(j);
                dfs(level + 1);
                current.pop_back();
                if (best.size() == levels.size()) return;  // maximal already
            }
        }
    };
    for (std::size_t j = 0; j < levels[0].size() && budget; ++j) {
        current.assign(1, j);
        dfs(1);
        if (best.size() == levels.size()) break;
    }

    std::vector<StageWitness> chain;
    for (std::size_t n = 0; n < best.size(); ++n)
        chain.push_back(witness_from_masks(levels[n][best[n]]));
    return chain;
}

// ------------------------------------------------------------- transforms --

Equation transform_inequation(const TermPtr& tau, const TermPtr& sigma,
                              InequationMode mode, DiscriminatorKind kind) {
    auto reject_op = [&](NodeOp op, const std::string& why) {
        if (term_has_op(*tau, op) || term_has_op(*sigma, op))
            throw std::invalid_argument("transform unavailable: " + why);
    };

    TermPtr delta = t_union(t_inter(tau, t_comp(sigma)), t_inter(sigma, t_comp(tau)));

    if (mode == InequationMode::Annihilator) {
        // the zero-annihilator device lives in the product-only signature
        reject_op(NodeOp::Plus, "annihilator mode expects plus-free terms");
        reject_op(NodeOp::Down, "annihilator mode expects down-free terms");
        return {t_times(t_const(0), delta), t_const(0)};
    }

    if (kind == DiscriminatorKind::PlusTimes) {
        reject_op(NodeOp::Down, "the plus-times discriminator expects down-free terms");
        return {t_plus(t_omega(), t_times(t_const(0), delta)), t_omega()};
    }
    reject_op(NodeOp::Times, "the plus-leq discriminator expects times-free terms");
    return {t_plus(t_omega(), t_down(delta)), t_omega()};
}

}  // namespace natalg
