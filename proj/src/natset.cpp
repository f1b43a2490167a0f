#include "natalg/natset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

namespace natalg {

// ---------------------------------------------------------------- Bits --

void Bits::trim() {
    if (size_ % 64 != 0 && !words_.empty())
        words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
}

bool Bits::all() const {
    Bits full = ones(size_);
    return *this == full;
}

std::size_t Bits::count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
}

std::optional<std::size_t> Bits::lowest() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i]) return i * 64 + std::countr_zero(words_[i]);
    return std::nullopt;
}

std::optional<std::size_t> Bits::highest() const {
    for (std::size_t i = words_.size(); i-- > 0;)
        if (words_[i]) return i * 64 + 63 - std::countl_zero(words_[i]);
    return std::nullopt;
}

std::vector<Nat> Bits::elements() const {
    std::vector<Nat> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w) {
            out.push_back(i * 64 + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

Bits Bits::operator&(const Bits& o) const {
    Bits r(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
}

Bits Bits::operator|(const Bits& o) const {
    Bits r(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] | o.words_[i];
    return r;
}

Bits Bits::operator~() const {
    Bits r(size_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    r.trim();
    return r;
}

Bits& Bits::operator|=(const Bits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
}

Bits& Bits::operator&=(const Bits& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
}

void Bits::or_shifted(const Bits& o, std::size_t k) {
    if (k >= size_) return;
    const std::size_t wshift = k >> 6, bshift = k & 63;
    for (std::size_t i = words_.size(); i-- > wshift;) {
        std::uint64_t v = o.words_[i - wshift] << bshift;
        if (bshift && i > wshift) v |= o.words_[i - wshift - 1] >> (64 - bshift);
        words_[i] |= v;
    }
    trim();
}

Bits Bits::suffix_or() const {
    Bits r(size_);
    bool seen = false;
    for (std::size_t i = size_; i-- > 0;) {
        seen = seen || test(i);
        if (seen) r.set(i);
    }
    return r;
}

// ----------------------------------------------------------- FinCofSet --

namespace {

std::vector<Nat> normalized(std::vector<Nat> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool sorted_contains(const std::vector<Nat>& v, Nat n) {
    return std::binary_search(v.begin(), v.end(), n);
}

// support of the union of two ascending lists
std::vector<Nat> list_union(const std::vector<Nat>& a, const std::vector<Nat>& b) {
    std::vector<Nat> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Nat> list_inter(const std::vector<Nat>& a, const std::vector<Nat>& b) {
    std::vector<Nat> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Nat> list_diff(const std::vector<Nat>& a, const std::vector<Nat>& b) {
    std::vector<Nat> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

FinCofSet FinCofSet::finite(std::vector<Nat> elems) {
    return FinCofSet(Kind::Finite, normalized(std::move(elems)));
}

FinCofSet FinCofSet::cofinite(std::vector<Nat> exceptions) {
    return FinCofSet(Kind::Cofinite, normalized(std::move(exceptions)));
}

bool FinCofSet::contains(Nat n) const {
    bool in_support = sorted_contains(support_, n);
    return is_finite() ? in_support : !in_support;
}

std::optional<Nat> FinCofSet::min() const {
    if (is_finite()) {
        if (support_.empty()) return std::nullopt;
        return support_.front();
    }
    Nat n = 0;
    for (Nat s : support_) {
        if (s == n)
            ++n;
        else
            break;
    }
    return n;
}

std::optional<Nat> FinCofSet::max() const {
    if (is_cofinite() || support_.empty()) return std::nullopt;
    return support_.back();
}

FinCofSet operator|(const FinCofSet& a, const FinCofSet& b) {
    using K = FinCofSet::Kind;
    if (a.kind() == K::Finite && b.kind() == K::Finite)
        return FinCofSet::finite(list_union(a.support(), b.support()));
    if (a.kind() == K::Cofinite && b.kind() == K::Cofinite)
        return FinCofSet::cofinite(list_inter(a.support(), b.support()));
    const FinCofSet& fin = a.is_finite() ? a : b;
    const FinCofSet& cof = a.is_finite() ? b : a;
    return FinCofSet::cofinite(list_diff(cof.support(), fin.support()));
}

FinCofSet operator&(const FinCofSet& a, const FinCofSet& b) {
    return ~(~a | ~b);
}

FinCofSet operator~(const FinCofSet& a) {
    return a.is_finite() ? FinCofSet::cofinite(a.support())
                         : FinCofSet::finite(a.support());
}

namespace {

// Largest excluded element plus one; 0 when the set is all of omega.
Nat cofinite_threshold(const FinCofSet& a) {
    return a.support().empty() ? 0 : a.support().back() + 1;
}

}  // namespace

FinCofSet oplus(const FinCofSet& a, const FinCofSet& b) {
    if (a.is_empty() || b.is_empty()) return FinCofSet::empty();

    if (a.is_finite() && b.is_finite()) {
        std::vector<Nat> sums;
        sums.reserve(a.support().size() * b.support().size());
        for (Nat x : a.support())
            for (Nat y : b.support()) sums.push_back(x + y);
        return FinCofSet::finite(std::move(sums));
    }

    // At least one operand cofinite: the sumset is cofinite. All m >= T are
    // in it, where T pairs the other operand's minimum with the cofinite
    // tail; below T membership is decided directly.
    Nat t = ~Nat{0};
    if (b.is_cofinite()) t = std::min(t, *a.min() + cofinite_threshold(b));
    if (a.is_cofinite()) t = std::min(t, *b.min() + cofinite_threshold(a));

    std::vector<Nat> exceptions;
    for (Nat m = 0; m < t; ++m) {
        bool in = false;
        for (Nat k = 0; k <= m && !in; ++k)
            in = a.contains(k) && b.contains(m - k);
        if (!in) exceptions.push_back(m);
    }
    return FinCofSet::cofinite(std::move(exceptions));
}

namespace {

bool zero_in_product(const FinCofSet& a, const FinCofSet& b) {
    return (a.contains(0) && !b.is_empty()) || (b.contains(0) && !a.is_empty());
}

// Valid when all m >= t belong to a (x) b; decides the rest pointwise.
FinCofSet cofinite_product(const FinCofSet& a, const FinCofSet& b, Nat t) {
    std::vector<Nat> exceptions;
    if (!zero_in_product(a, b)) exceptions.push_back(0);
    for (Nat m = 1; m < t; ++m) {
        bool in = false;
        for (Nat d = 1; d * d <= m && !in; ++d) {
            if (m % d != 0) continue;
            in = (a.contains(d) && b.contains(m / d)) ||
                 (a.contains(m / d) && b.contains(d));
        }
        if (!in) exceptions.push_back(m);
    }
    return FinCofSet::cofinite(std::move(exceptions));
}

bool within_01(const FinCofSet& a) {
    return a.is_finite() && a.max().value_or(0) <= 1;
}

}  // namespace

std::optional<FinCofSet> try_otimes(const FinCofSet& a, const FinCofSet& b) {
    if (a.is_empty() || b.is_empty()) return FinCofSet::empty();

    if (a.is_finite() && b.is_finite()) {
        std::vector<Nat> products;
        products.reserve(a.support().size() * b.support().size());
        for (Nat x : a.support())
            for (Nat y : b.support()) products.push_back(x * y);
        return FinCofSet::finite(std::move(products));
    }

    // {0}, {1} and {0,1} act trivially and keep the result representable.
    auto trivial = [](const FinCofSet& small, const FinCofSet& other) {
        FinCofSet r = small.contains(1) ? other : FinCofSet::empty();
        if (small.contains(0)) r = r | FinCofSet::singleton(0);
        return r;
    };
    if (within_01(a)) return trivial(a, b);
    if (within_01(b)) return trivial(b, a);

    // A unit in one operand absorbs a cofinite other operand.
    Nat t = ~Nat{0};
    if (a.contains(1) && b.is_cofinite()) t = std::min(t, std::max<Nat>(cofinite_threshold(b), 1));
    if (b.contains(1) && a.is_cofinite()) t = std::min(t, std::max<Nat>(cofinite_threshold(a), 1));
    if (t != ~Nat{0}) return cofinite_product(a, b, t);

    return std::nullopt;  // leaves the finite-cofinite class
}

FinCofSet otimes(const FinCofSet& a, const FinCofSet& b) {
    auto r = try_otimes(a, b);
    if (!r)
        throw NonClosureError(
            "otimes result is neither finite nor cofinite; evaluate in a window");
    return *r;
}

FinCofSet down_close(const FinCofSet& a) {
    if (a.is_empty()) return FinCofSet::empty();
    if (a.is_cofinite()) return FinCofSet::omega();  // unbounded
    Nat top = a.support().back();
    std::vector<Nat> elems(top + 1);
    for (Nat i = 0; i <= top; ++i) elems[i] = i;
    return FinCofSet::finite(std::move(elems));
}

SetAnalysis analyze(const FinCofSet& a) {
    SetAnalysis r;
    r.empty = a.is_empty() ? TriBool::In : TriBool::Out;
    auto m = a.min();
    if (m) {
        r.min_kind = SetAnalysis::Min::Known;
        r.min_value = *m;
    } else {
        r.min_kind = SetAnalysis::Min::None;
    }
    return r;
}

// ----------------------------------------------------------- WindowSet --

WindowSet exact_window(Bits bits, TailHint tail) {
    return WindowSet(std::move(bits), tail);
}

WindowSet to_window(const FinCofSet& a, Nat bound) {
    Bits bits(bound + 1);
    for (Nat i = 0; i <= bound; ++i)
        if (a.contains(i)) bits.set(i);

    TailHint tail;
    if (a.is_finite()) {
        tail = (a.max().value_or(0) <= bound) ? TailHint::Empty : TailHint::Nonempty;
    } else {
        Nat worst = a.support().empty() ? 0 : a.support().back();
        tail = (worst <= bound) ? TailHint::Full : TailHint::Nonempty;
    }
    return exact_window(std::move(bits), tail);
}

namespace {

void require_same_bound(const WindowSet& a, const WindowSet& b) {
    if (a.one.size() != b.one.size())
        throw std::invalid_argument("window bounds differ");
}

TailHint union_tail(TailHint a, TailHint b) {
    if (a == TailHint::Full || b == TailHint::Full) return TailHint::Full;
    if (a == TailHint::Empty) return b;
    if (b == TailHint::Empty) return a;
    if (a == TailHint::Nonempty || b == TailHint::Nonempty) return TailHint::Nonempty;
    return TailHint::Unknown;
}

TailHint inter_tail(TailHint a, TailHint b) {
    if (a == TailHint::Empty || b == TailHint::Empty) return TailHint::Empty;
    if (a == TailHint::Full) return b;
    if (b == TailHint::Full) return a;
    return TailHint::Unknown;  // two Nonempty claims may miss each other
}

TailHint comp_tail(TailHint a) {
    switch (a) {
        case TailHint::Empty: return TailHint::Full;
        case TailHint::Full: return TailHint::Empty;
        default: return TailHint::Unknown;
    }
}

}  // namespace

bool known_nonempty(const WindowSet& a) {
    return a.one.any() || a.tail == TailHint::Full || a.tail == TailHint::Nonempty;
}

bool known_empty(const WindowSet& a) {
    return a.maybe.none() && a.tail == TailHint::Empty;
}

WindowSet operator|(const WindowSet& a, const WindowSet& b) {
    require_same_bound(a, b);
    return WindowSet(a.one | b.one, a.maybe | b.maybe, union_tail(a.tail, b.tail));
}

WindowSet operator&(const WindowSet& a, const WindowSet& b) {
    require_same_bound(a, b);
    return WindowSet(a.one & b.one, a.maybe & b.maybe, inter_tail(a.tail, b.tail));
}

WindowSet operator~(const WindowSet& a) {
    return WindowSet(~a.maybe, ~a.one, comp_tail(a.tail));
}

namespace {

Bits convolve_plus(const Bits& a, const Bits& b) {
    Bits r(a.size());
    for (Nat k : a.elements()) r.or_shifted(b, k);
    return r;
}

// witness of an element >= 1, from decided bits or a tail claim
bool positive_witness(const WindowSet& a) {
    auto hi = a.one.highest();
    if (hi && *hi >= 1) return true;
    return a.tail == TailHint::Full || a.tail == TailHint::Nonempty;
}

}  // namespace

WindowSet oplus(const WindowSet& a, const WindowSet& b) {
    require_same_bound(a, b);
    const Nat bound = a.bound();
    Bits one = convolve_plus(a.one, b.one);
    Bits maybe = convolve_plus(a.maybe, b.maybe);

    TailHint tail;
    if (known_empty(a) || known_empty(b)) {
        tail = TailHint::Empty;
    } else if (a.tail == TailHint::Empty && b.tail == TailHint::Empty) {
        // both sets live inside their windows; the sum range is known
        Nat worst = a.maybe.highest().value_or(0) + b.maybe.highest().value_or(0);
        if (worst <= bound)
            tail = TailHint::Empty;
        else if (a.one.any() && b.one.any() &&
                 *a.one.highest() + *b.one.highest() > bound)
            tail = TailHint::Nonempty;
        else
            tail = TailHint::Unknown;
    } else if ((a.one.test(0) && b.tail == TailHint::Full) ||
               (b.one.test(0) && a.tail == TailHint::Full)) {
        tail = TailHint::Full;
    } else if ((known_nonempty(a) &&
                (b.tail == TailHint::Full || b.tail == TailHint::Nonempty)) ||
               (known_nonempty(b) &&
                (a.tail == TailHint::Full || a.tail == TailHint::Nonempty))) {
        tail = TailHint::Nonempty;
    } else if (a.one.any() && b.one.any() &&
               *a.one.highest() + *b.one.highest() > bound) {
        tail = TailHint::Nonempty;
    } else {
        tail = TailHint::Unknown;
    }
    return WindowSet(std::move(one), std::move(maybe), tail);
}

namespace {

Bits positive_products(const Bits& a, const Bits& b, Nat bound) {
    Bits r(bound + 1);
    for (Nat k : a.elements()) {
        if (k == 0) continue;
        for (Nat n : b.elements()) {
            if (n == 0) continue;
            if (n > bound / k) break;
            r.set(k * n);
        }
    }
    return r;
}

std::optional<Nat> highest_positive(const Bits& bits) {
    auto hi = bits.highest();
    if (hi && *hi >= 1) return *hi;
    return std::nullopt;
}

}  // namespace

WindowSet otimes(const WindowSet& a, const WindowSet& b) {
    require_same_bound(a, b);
    const Nat bound = a.bound();

    Bits one = positive_products(a.one, b.one, bound);
    Bits maybe = positive_products(a.maybe, b.maybe, bound);

    // 0 is in the product iff one side holds 0 and the other is nonempty.
    bool zero_one = (a.one.test(0) && known_nonempty(b)) ||
                    (b.one.test(0) && known_nonempty(a));
    bool zero_maybe = (a.maybe.test(0) && !known_empty(b)) ||
                      (b.maybe.test(0) && !known_empty(a));
    if (zero_one) {
        one.set(0);
        maybe.set(0);
    } else if (zero_maybe) {
        maybe.set(0);
    }

    TailHint tail;
    if (known_empty(a) || known_empty(b)) {
        tail = TailHint::Empty;
    } else if (a.tail == TailHint::Empty && b.tail == TailHint::Empty) {
        auto wa = highest_positive(a.maybe), wb = highest_positive(b.maybe);
        auto oa = highest_positive(a.one), ob = highest_positive(b.one);
        if (!wa || !wb || *wa * *wb <= bound)
            tail = TailHint::Empty;
        else if (oa && ob && *oa * *ob > bound)
            tail = TailHint::Nonempty;
        else
            tail = TailHint::Unknown;
    } else if ((a.one.test(1) && b.tail == TailHint::Full) ||
               (b.one.test(1) && a.tail == TailHint::Full)) {
        tail = TailHint::Full;
    } else if ((positive_witness(a) &&
                (b.tail == TailHint::Full || b.tail == TailHint::Nonempty)) ||
               (positive_witness(b) &&
                (a.tail == TailHint::Full || a.tail == TailHint::Nonempty))) {
        tail = TailHint::Nonempty;
    } else {
        auto oa = highest_positive(a.one), ob = highest_positive(b.one);
        if (oa && ob && *oa * *ob > bound)
            tail = TailHint::Nonempty;
        else
            tail = TailHint::Unknown;
    }
    return WindowSet(std::move(one), std::move(maybe), tail);
}

WindowSet down_close(const WindowSet& a) {
    const Nat bound = a.bound();
    if (a.tail == TailHint::Full || a.tail == TailHint::Nonempty) {
        // some element lies above the window, so [0, B] is fully covered
        return WindowSet(Bits::ones(bound + 1), Bits::ones(bound + 1),
                         a.tail == TailHint::Full ? TailHint::Full : TailHint::Nonempty);
    }
    Bits one = a.one.suffix_or();
    if (a.tail == TailHint::Empty)
        return WindowSet(std::move(one), a.maybe.suffix_or(), TailHint::Empty);
    // Unknown tail: everything above the highest decided element stays open
    return WindowSet(std::move(one), Bits::ones(bound + 1), TailHint::Unknown);
}

SetAnalysis analyze(const WindowSet& a) {
    SetAnalysis r;
    if (known_empty(a))
        r.empty = TriBool::In;
    else if (known_nonempty(a))
        r.empty = TriBool::Out;
    else
        r.empty = TriBool::Undecided;

    auto lo_one = a.one.lowest();
    auto lo_maybe = a.maybe.lowest();
    if (lo_one && (!lo_maybe || *lo_maybe >= *lo_one)) {
        r.min_kind = SetAnalysis::Min::Known;
        r.min_value = *lo_one;
    } else if (!lo_maybe && a.tail == TailHint::Empty) {
        r.min_kind = SetAnalysis::Min::None;
    } else if (!lo_maybe && a.tail == TailHint::Full) {
        r.min_kind = SetAnalysis::Min::Known;  // everything above the bound
        r.min_value = a.bound() + 1;
    } else {
        r.min_kind = SetAnalysis::Min::Undecided;
    }
    return r;
}

// --------------------------------------------------------------- others --

unsigned prime_factor_count(Nat m) {
    if (m == 0) throw std::invalid_argument("prime_factor_count: 0 has no factorization");
    unsigned count = 0;
    for (Nat d = 2; d * d <= m; ++d) {
        while (m % d == 0) {
            m /= d;
            ++count;
        }
    }
    if (m > 1) ++count;
    return count;
}

bool is_prime(Nat n) {
    if (n < 2) return false;
    for (Nat d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// ------------------------------------------------------------- literals --

namespace {

std::vector<Nat> parse_braced_list(const std::string& text, std::size_t start) {
    if (start >= text.size() || text[start] != '{')
        throw std::invalid_argument("expected '{' in set literal: " + text);
    std::vector<Nat> out;
    std::size_t i = start + 1;
    while (i < text.size() && text[i] != '}') {
        while (i < text.size() && (text[i] == ',' || std::isspace((unsigned char)text[i]))) ++i;
        if (i < text.size() && text[i] == '}') break;
        std::size_t j = i;
        while (j < text.size() && std::isdigit((unsigned char)text[j])) ++j;
        if (j == i) throw std::invalid_argument("bad set literal: " + text);
        out.push_back(std::stoull(text.substr(i, j - i)));
        i = j;
    }
    if (i >= text.size()) throw std::invalid_argument("unterminated set literal: " + text);
    return out;
}

}  // namespace

FinCofSet parse_fincof(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) t += c;
    if (t == "empty") return FinCofSet::empty();
    if (t == "omega") return FinCofSet::omega();
    if (!t.empty() && t[0] == '~') return FinCofSet::cofinite(parse_braced_list(t, 1));
    return FinCofSet::finite(parse_braced_list(t, 0));
}

std::string format_fincof(const FinCofSet& a) {
    if (a.is_empty()) return "empty";
    if (a.is_omega()) return "omega";
    std::ostringstream os;
    if (a.is_cofinite()) os << '~';
    os << '{';
    for (std::size_t i = 0; i < a.support().size(); ++i) {
        if (i) os << ',';
        os << a.support()[i];
    }
    os << '}';
    return os.str();
}

std::string format_tail(TailHint t) {
    switch (t) {
        case TailHint::Empty: return "empty";
        case TailHint::Full: return "full";
        case TailHint::Nonempty: return "nonempty";
        default: return "unknown";
    }
}

std::string format_window(const WindowSet& w) {
    std::ostringstream os;
    os << '{';
    auto elems = w.one.elements();
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) os << ',';
        os << elems[i];
    }
    os << "} tail=" << format_tail(w.tail);
    auto und = w.undecided().elements();
    if (!und.empty()) {
        os << " undecided={";
        for (std::size_t i = 0; i < und.size(); ++i) {
            if (i) os << ',';
            os << und[i];
        }
        os << '}';
    }
    return os.str();
}

}  // namespace natalg
