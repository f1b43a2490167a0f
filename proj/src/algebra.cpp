#include "natalg/algebra.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <set>
#include <sstream>

namespace natalg {

// ----------------------------------------------------------- FiniteCBM --

FiniteCBM::FiniteCBM(unsigned atom_count, std::vector<std::vector<CbmElement>> atom_table,
                     CbmElement e)
    : atom_count_(atom_count), table_(std::move(atom_table)), e_(e) {
    if (atom_count_ == 0 || atom_count_ > 31)
        throw std::invalid_argument("atom count must be within 1..31");
    if (table_.size() != atom_count_)
        throw std::invalid_argument("atom table has wrong dimensions");
    for (const auto& row : table_) {
        if (row.size() != atom_count_)
            throw std::invalid_argument("atom table has wrong dimensions");
        for (CbmElement v : row)
            if (v > top()) throw std::invalid_argument("atom table entry out of range");
    }
    if (e_ > top()) throw std::invalid_argument("identity element out of range");

    CbmElement ce = top() & ~e_;
    g_ = (top() & ~circ(ce, ce)) & ce;
}

CbmElement FiniteCBM::circ(CbmElement x, CbmElement y) const {
    CbmElement acc = 0;
    for (CbmElement xs = x; xs;) {
        unsigned i = std::countr_zero(xs);
        xs &= xs - 1;
        const auto& row = table_[i];
        for (CbmElement ys = y; ys;) {
            unsigned j = std::countr_zero(ys);
            ys &= ys - 1;
            acc |= row[j];
        }
    }
    return acc;
}

void FiniteCBM::mutate_atom_product(unsigned i, unsigned j, CbmElement value) {
    table_.at(i).at(j) = value;
    table_.at(j).at(i) = value;
}

std::string FiniteCBM::format_element(CbmElement x) const {
    if (x == 0) return "bot";
    if (x == top()) return "top";
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (unsigned i = 0; i < atom_count_; ++i) {
        if (!(x >> i & 1)) continue;
        if (!first) os << ',';
        os << 'g' << i;
        first = false;
    }
    os << '}';
    return os.str();
}

FiniteCBM make_bn(unsigned n) {
    const unsigned k = n + 1;
    std::vector<std::vector<CbmElement>> table(k, std::vector<CbmElement>(k, 0));
    for (unsigned i = 0; i < k; ++i)
        for (unsigned j = 0; j < k; ++j)
            table[i][j] = (i + j <= n) ? (CbmElement{1} << (i + j)) : 0;
    return FiniteCBM(k, std::move(table), CbmElement{1});
}

CbmElement quotient_pi(unsigned n, const FinCofSet& a) {
    CbmElement out = 0;
    for (unsigned i = 0; i <= n; ++i)
        if (a.contains(i)) out |= CbmElement{1} << i;
    return out;
}

// ------------------------------------------------------------ AlgTerm ---

namespace {
AlgTermPtr make_term(AlgTerm t) { return std::make_shared<const AlgTerm>(std::move(t)); }
}  // namespace

AlgTermPtr alg_var(std::string name) {
    return make_term({AlgTerm::Op::Var, std::move(name), nullptr, nullptr});
}
AlgTermPtr alg_bot() { return make_term({AlgTerm::Op::Bot, "", nullptr, nullptr}); }
AlgTermPtr alg_top() { return make_term({AlgTerm::Op::Top, "", nullptr, nullptr}); }
AlgTermPtr alg_e() { return make_term({AlgTerm::Op::E, "", nullptr, nullptr}); }
AlgTermPtr alg_g() { return make_term({AlgTerm::Op::G, "", nullptr, nullptr}); }
AlgTermPtr alg_join(AlgTermPtr l, AlgTermPtr r) {
    return make_term({AlgTerm::Op::Join, "", std::move(l), std::move(r)});
}
AlgTermPtr alg_meet(AlgTermPtr l, AlgTermPtr r) {
    return make_term({AlgTerm::Op::Meet, "", std::move(l), std::move(r)});
}
AlgTermPtr alg_compl(AlgTermPtr t) {
    return make_term({AlgTerm::Op::Compl, "", std::move(t), nullptr});
}
AlgTermPtr alg_circ(AlgTermPtr l, AlgTermPtr r) {
    return make_term({AlgTerm::Op::Circ, "", std::move(l), std::move(r)});
}
AlgTermPtr alg_closure(AlgTermPtr t) { return alg_circ(std::move(t), alg_top()); }

AlgTermPtr alg_g_power(unsigned n) {
    if (n == 0) return alg_e();
    AlgTermPtr acc = alg_g();
    for (unsigned i = 1; i < n; ++i) acc = alg_circ(acc, alg_g());
    return acc;
}

CbmElement eval_alg_term(const AlgTerm& t, const FiniteCBM& alg,
                         const AlgAssignment& asg) {
    switch (t.op) {
        case AlgTerm::Op::Var: {
            auto it = asg.find(t.var);
            if (it == asg.end())
                throw std::invalid_argument("unbound variable '" + t.var + "'");
            return it->second;
        }
        case AlgTerm::Op::Bot: return 0;
        case AlgTerm::Op::Top: return alg.top();
        case AlgTerm::Op::E: return alg.e();
        case AlgTerm::Op::G: return alg.g_element();
        case AlgTerm::Op::Join:
            return eval_alg_term(*t.left, alg, asg) | eval_alg_term(*t.right, alg, asg);
        case AlgTerm::Op::Meet:
            return eval_alg_term(*t.left, alg, asg) & eval_alg_term(*t.right, alg, asg);
        case AlgTerm::Op::Compl:
            return alg.top() & ~eval_alg_term(*t.left, alg, asg);
        case AlgTerm::Op::Circ:
            return alg.circ(eval_alg_term(*t.left, alg, asg),
                            eval_alg_term(*t.right, alg, asg));
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------- identities --

IdentityScheme cbm_axiom_commutative() {
    auto x = alg_var("x"), y = alg_var("y");
    return {"commutative", alg_circ(x, y), alg_circ(y, x)};
}
IdentityScheme cbm_axiom_associative() {
    auto x = alg_var("x"), y = alg_var("y"), z = alg_var("z");
    return {"associative", alg_circ(alg_circ(x, y), z), alg_circ(x, alg_circ(y, z))};
}
IdentityScheme cbm_axiom_unit() {
    auto x = alg_var("x");
    return {"unit", alg_circ(x, alg_e()), x};
}
IdentityScheme cbm_axiom_normal() {
    auto x = alg_var("x");
    return {"normal", alg_circ(x, alg_bot()), alg_bot()};
}
IdentityScheme cbm_axiom_additive() {
    auto x = alg_var("x"), y = alg_var("y"), z = alg_var("z");
    return {"additive", alg_circ(x, alg_join(y, z)),
            alg_join(alg_circ(x, y), alg_circ(x, z))};
}

std::vector<IdentityScheme> cbm_axiom_suite() {
    return {cbm_axiom_commutative(), cbm_axiom_associative(), cbm_axiom_unit(),
            cbm_axiom_normal(), cbm_axiom_additive()};
}

IdentityScheme identity_ge0() {
    auto x = alg_var("x"), y = alg_var("y");
    return {"ge0", alg_meet(alg_e(), alg_circ(x, y)),
            alg_meet(alg_e(), alg_meet(x, y))};
}

IdentityScheme identity_ge1(unsigned n) {
    AlgTermPtr join = alg_g_power(0);
    for (unsigned i = 1; i <= n; ++i) join = alg_join(join, alg_g_power(i));
    return {"ge1[" + std::to_string(n) + "]", alg_closure(alg_g_power(n + 1)),
            alg_compl(join)};
}

IdentityScheme identity_ge2() {
    auto x = alg_var("x"), y = alg_var("y");
    auto cx = alg_closure(x), cy = alg_closure(y);
    auto l = alg_closure(alg_meet(cx, alg_compl(cy)));
    auto r = alg_closure(alg_meet(cy, alg_compl(cx)));
    return {"ge2", alg_meet(l, r), alg_bot()};
}

IdentityScheme identity_ge4() {
    auto x = alg_var("x"), y = alg_var("y");
    auto lhs = alg_meet(alg_g(), alg_circ(x, y));
    auto rhs = alg_join(alg_circ(alg_meet(alg_e(), x), alg_meet(alg_g(), y)),
                        alg_circ(alg_meet(alg_g(), x), alg_meet(alg_e(), y)));
    return {"ge4", lhs, rhs};
}

IdentityScheme identity_ge5(unsigned n) {
    auto x = alg_var("x");
    auto gp = alg_g_power(n);
    return {"ge5[" + std::to_string(n) + "]",
            alg_circ(alg_meet(x, gp), alg_meet(alg_compl(x), gp)), alg_bot()};
}

IdentityScheme identity_ge7() {
    auto x = alg_var("x");
    auto rhs = alg_closure(alg_meet(x, alg_compl(alg_circ(x, alg_compl(alg_e())))));
    return {"ge7", alg_closure(x), rhs};
}

std::vector<IdentityScheme> ge_identity_suite(unsigned index_limit) {
    std::vector<IdentityScheme> out;
    out.push_back(identity_ge0());
    for (unsigned i = 0; i <= index_limit; ++i) out.push_back(identity_ge1(i));
    out.push_back(identity_ge2());
    out.push_back(identity_ge4());
    for (unsigned i = 0; i <= index_limit; ++i) out.push_back(identity_ge5(i));
    out.push_back(identity_ge7());
    return out;
}

namespace {

void collect_vars(const AlgTerm& t, std::set<std::string>& out) {
    if (t.op == AlgTerm::Op::Var) out.insert(t.var);
    if (t.left) collect_vars(*t.left, out);
    if (t.right) collect_vars(*t.right, out);
}

}  // namespace

IdentityResult check_identity(const IdentityScheme& s, const FiniteCBM& alg,
                              const CheckMode& mode) {
    std::set<std::string> var_set;
    collect_vars(*s.lhs, var_set);
    collect_vars(*s.rhs, var_set);
    std::vector<std::string> vars(var_set.begin(), var_set.end());

    const std::size_t n_elems = alg.element_count();
    AlgAssignment asg;
    for (const auto& v : vars) asg[v] = 0;

    auto differs = [&] {
        return eval_alg_term(*s.lhs, alg, asg) != eval_alg_term(*s.rhs, alg, asg);
    };

    if (mode.kind == CheckMode::Kind::Exhaustive) {
        double space = 1;
        for (std::size_t i = 0; i < vars.size(); ++i) space *= double(n_elems);
        if (space > double(1 << 24))
            throw std::invalid_argument("exhaustive identity check too large");

        // odometer over assignments, most significant variable first
        std::vector<CbmElement> vals(vars.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = vals[i];
            if (differs()) return {false, asg};
            std::size_t i = vars.size();
            while (i > 0) {
                --i;
                if (++vals[i] < n_elems) break;
                vals[i] = 0;
                if (i == 0) return {true, {}};
            }
            if (vars.empty()) return {true, {}};
        }
    }

    std::mt19937_64 rng(mode.seed);
    std::uniform_int_distribution<CbmElement> dist(0, static_cast<CbmElement>(n_elems - 1));
    for (std::uint64_t t = 0; t < mode.trials; ++t) {
        for (const auto& v : vars) asg[v] = dist(rng);
        if (differs()) return {false, asg};
    }
    return {true, {}};
}

// --------------------------------------------------------- congruences --

std::vector<CongruenceIdeal> congruences(const FiniteCBM& alg) {
    if (alg.element_count() > (std::size_t{1} << 16))
        throw std::invalid_argument("algebra too large for congruence enumeration");

    std::vector<CongruenceIdeal> out;
    for (CbmElement x = 0;; ++x) {
        if (alg.is_congruence_element(x)) {
            CongruenceIdeal ideal;
            ideal.generator = x;
            // submasks of x ascending, each checked to stay below x after closure
            for (CbmElement y = 0;; y = ((y | ~x) + 1) & x) {
                if ((alg.closure(y) | x) != x)
                    throw std::logic_error("principal ideal not closed; table not isotone");
                ideal.elements.push_back(y);
                if (y == x) break;
            }
            out.push_back(std::move(ideal));
        }
        if (x == alg.top()) break;
    }
    std::sort(out.begin(), out.end(), [](const CongruenceIdeal& a, const CongruenceIdeal& b) {
        if (a.elements.size() != b.elements.size())
            return a.elements.size() < b.elements.size();
        return a.generator < b.generator;
    });
    return out;
}

namespace {

// Constructive recognition: the term value of g and its powers must be
// distinct atoms exhausting top with the truncated addition table.
std::optional<unsigned> recognize_bn(const FiniteCBM& alg) {
    CbmElement ce = alg.top() & ~alg.e();
    CbmElement g = (alg.top() & ~alg.circ(ce, ce)) & ce;

    std::vector<CbmElement> powers{alg.e()};
    CbmElement cur = g;
    while (cur != 0) {
        if (powers.size() > alg.atom_count()) return std::nullopt;
        powers.push_back(cur);
        cur = alg.circ(cur, g);
    }
    const unsigned n = static_cast<unsigned>(powers.size() - 1);

    CbmElement join = 0;
    std::set<CbmElement> distinct;
    for (CbmElement p : powers) {
        if (std::popcount(p) != 1) return std::nullopt;
        join |= p;
        distinct.insert(p);
    }
    if (join != alg.top() || distinct.size() != powers.size()) return std::nullopt;
    for (unsigned i = 0; i <= n; ++i)
        for (unsigned j = 0; j <= n; ++j) {
            CbmElement expect = (i + j <= n) ? powers[i + j] : 0;
            if (alg.circ(powers[i], powers[j]) != expect) return std::nullopt;
        }
    return n;
}

}  // namespace

Classification classify(const FiniteCBM& alg) {
    Classification r;
    r.e_is_atom = std::popcount(alg.e()) == 1;

    auto ideals = congruences(alg);

    std::vector<CbmElement> nontrivial;
    for (const auto& ideal : ideals)
        if (ideal.generator != 0) nontrivial.push_back(ideal.generator);
    r.subdirectly_irreducible = false;
    for (CbmElement candidate : nontrivial) {
        bool below_all = true;
        for (CbmElement other : nontrivial)
            if ((candidate & other) != candidate) below_all = false;
        if (below_all) {
            r.subdirectly_irreducible = true;
            break;
        }
    }

    r.simple = true;
    for (CbmElement x = 1; x <= alg.top(); ++x)
        if (alg.closure(x) != alg.top()) {
            r.simple = false;
            break;
        }

    for (CbmElement z = 1; z <= alg.top(); ++z) {
        bool annihilates = true;
        for (CbmElement x = 1; x <= alg.top() && annihilates; ++x)
            annihilates = alg.circ(x, z) == z;
        if (annihilates) r.annihilators.push_back(z);
    }

    r.congruence_elements_chain = true;
    std::vector<CbmElement> celems;
    for (CbmElement x = 0;; ++x) {
        if (alg.is_congruence_element(x)) celems.push_back(x);
        if (x == alg.top()) break;
    }
    for (std::size_t i = 0; i < celems.size() && r.congruence_elements_chain; ++i)
        for (std::size_t j = i + 1; j < celems.size(); ++j) {
            CbmElement a = celems[i], b = celems[j];
            if ((a & b) != a && (a & b) != b) {
                r.congruence_elements_chain = false;
                break;
            }
        }

    r.isomorphic_to_bn = recognize_bn(alg);

    return r;
}

// --------------------------------------------------- prime power semigroup --

namespace {

// a_M restricted to [1, bound]: numbers whose prime support lies in M.
std::vector<char> po_window(const std::vector<Nat>& m_primes, Nat bound) {
    std::vector<char> in(bound + 1, 0);
    for (Nat v = 1; v <= bound; ++v) {
        Nat rest = v;
        for (Nat p : m_primes)
            while (rest % p == 0) rest /= p;
        in[v] = (rest == 1);
    }
    return in;
}

std::vector<char> window_product(const std::vector<char>& a, const std::vector<char>& b) {
    const Nat bound = a.size() - 1;
    std::vector<char> out(bound + 1, 0);
    for (Nat k = 1; k <= bound; ++k) {
        if (!a[k]) continue;
        for (Nat n = 1; k * n <= bound; ++n)
            if (b[n]) out[k * n] = 1;
    }
    return out;
}

std::vector<Nat> window_elements(const std::vector<char>& w) {
    std::vector<Nat> out;
    for (Nat v = 1; v < w.size(); ++v)
        if (w[v]) out.push_back(v);
    return out;
}

}  // namespace

PoReport check_po_idempotents(const std::vector<Nat>& primes, Nat bound) {
    if (primes.empty() || primes.size() > 3)
        throw std::invalid_argument("between 1 and 3 primes expected");
    for (Nat p : primes)
        if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");

    std::set<Nat> unique(primes.begin(), primes.end());
    if (unique.size() != primes.size())
        throw std::invalid_argument("primes must be distinct");

    const std::size_t n = primes.size();
    const std::size_t subsets = (std::size_t{1} << n) - 1;

    PoReport report;
    std::vector<std::vector<char>> windows(subsets + 1);
    for (std::size_t m = 1; m <= subsets; ++m) {
        std::vector<Nat> chosen;
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) chosen.push_back(primes[i]);
        windows[m] = po_window(chosen, bound);

        PoSubsetCheck check;
        check.primes = chosen;
        check.window = window_elements(windows[m]);
        check.idempotent = window_product(windows[m], windows[m]) == windows[m];
        report.checks.push_back(std::move(check));
    }

    report.windows_distinct = true;
    for (std::size_t a = 1; a <= subsets; ++a)
        for (std::size_t b = a + 1; b <= subsets; ++b)
            if (windows[a] == windows[b]) report.windows_distinct = false;

    report.union_law = true;
    for (std::size_t a = 1; a <= subsets; ++a)
        for (std::size_t b = 1; b <= subsets; ++b)
            if (window_product(windows[a], windows[b]) != windows[a | b])
                report.union_law = false;

    report.full_product_absorbs = true;
    for (std::size_t a = 1; a <= subsets; ++a)
        if (window_product(windows[subsets], windows[a]) != windows[subsets])
            report.full_product_absorbs = false;

    bool all_idempotent = true;
    for (const auto& c : report.checks) all_idempotent = all_idempotent && c.idempotent;
    report.ok = all_idempotent && report.windows_distinct && report.union_law &&
                report.full_product_absorbs;
    return report;
}

}  // namespace natalg
