#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace natalg {

using Nat = std::uint64_t;

// =========================================================================
// Bits: fixed-size bit vector over positions [0, size).
// =========================================================================

class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    static Bits zeros(std::size_t size) { return Bits(size); }
    static Bits ones(std::size_t size) {
        Bits b(size);
        for (auto& w : b.words_) w = ~std::uint64_t{0};
        b.trim();
        return b;
    }

    std::size_t size() const { return size_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(std::size_t i, bool v = true) {
        if (v)
            words_[i >> 6] |= std::uint64_t{1} << (i & 63);
        else
            words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }
    bool all() const;
    std::size_t count() const;

    std::optional<std::size_t> lowest() const;
    std::optional<std::size_t> highest() const;

    std::vector<Nat> elements() const;

    Bits operator&(const Bits& o) const;
    Bits operator|(const Bits& o) const;
    Bits operator~() const;
    Bits& operator|=(const Bits& o);
    Bits& operator&=(const Bits& o);

    // this |= (o << k), truncated to size. Core of the sumset convolution.
    void or_shifted(const Bits& o, std::size_t k);

    // suffix[i] = any bit at position >= i. Used by the down-closure.
    Bits suffix_or() const;

    bool operator==(const Bits& o) const = default;

private:
    void trim();
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

// =========================================================================
// FinCofSet: a subset of omega that is finite or has finite complement.
// Canonical: `support` lists the set itself (Finite) or its complement
// (Cofinite), strictly ascending. empty = Finite{}, omega = Cofinite{}.
// =========================================================================

class FinCofSet {
public:
    enum class Kind { Finite, Cofinite };

    FinCofSet() : kind_(Kind::Finite) {}

    static FinCofSet empty() { return FinCofSet(); }
    static FinCofSet omega() { return FinCofSet(Kind::Cofinite, {}); }
    static FinCofSet finite(std::vector<Nat> elems);
    static FinCofSet cofinite(std::vector<Nat> exceptions);
    static FinCofSet singleton(Nat n) { return finite({n}); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_cofinite() const { return kind_ == Kind::Cofinite; }
    bool is_empty() const { return is_finite() && support_.empty(); }
    bool is_omega() const { return is_cofinite() && support_.empty(); }

    // The set itself when finite, its complement when cofinite.
    const std::vector<Nat>& support() const { return support_; }

    bool contains(Nat n) const;

    // Smallest element; nullopt for the empty set.
    std::optional<Nat> min() const;
    // Largest element; nullopt when empty or infinite.
    std::optional<Nat> max() const;

    bool operator==(const FinCofSet& o) const = default;

private:
    FinCofSet(Kind k, std::vector<Nat> s) : kind_(k), support_(std::move(s)) {}
    Kind kind_;
    std::vector<Nat> support_;
};

FinCofSet operator|(const FinCofSet& a, const FinCofSet& b);
FinCofSet operator&(const FinCofSet& a, const FinCofSet& b);
FinCofSet operator~(const FinCofSet& a);

// Sumset {k + n : k in a, n in b}. The class is closed under it.
FinCofSet oplus(const FinCofSet& a, const FinCofSet& b);

// Product set {k * n : k in a, n in b}. The class is NOT closed under it
// (e.g. {2} (x) omega is the even numbers); try_otimes reports closure
// failure as nullopt, otimes throws NonClosureError.
std::optional<FinCofSet> try_otimes(const FinCofSet& a, const FinCofSet& b);
FinCofSet otimes(const FinCofSet& a, const FinCofSet& b);

// {n : exists m in a with n <= m}.
FinCofSet down_close(const FinCofSet& a);

class NonClosureError : public std::runtime_error {
public:
    explicit NonClosureError(const std::string& what) : std::runtime_error(what) {}
};

// =========================================================================
// WindowSet: membership over [0, B] with three-valued positions plus a
// claim about the region above B.
//
//   one[i]          position i is known to be in the set
//   maybe[i]        position i may be in the set (one <= maybe)
//   tail            Empty / Full / Nonempty / Unknown, about all m > B
//
// Positions with maybe[i] and not one[i] are undecided. A tail other than
// Unknown must be true of the represented set; propagation rules below
// default to Unknown rather than guess.
// =========================================================================

enum class TailHint { Empty, Full, Nonempty, Unknown };

enum class TriBool { In, Out, Undecided };

struct WindowSet {
    Bits one;
    Bits maybe;
    TailHint tail = TailHint::Unknown;

    WindowSet() = default;
    WindowSet(Bits bits, TailHint t)
        : one(bits), maybe(std::move(bits)), tail(t) {}
    WindowSet(Bits one_, Bits maybe_, TailHint t)
        : one(std::move(one_)), maybe(std::move(maybe_)), tail(t) {}

    Nat bound() const { return one.size() - 1; }

    bool exact() const { return one == maybe; }

    TriBool membership(Nat n) const {
        if (one.test(n)) return TriBool::In;
        if (!maybe.test(n)) return TriBool::Out;
        return TriBool::Undecided;
    }

    Bits undecided() const { return maybe & ~one; }

    bool operator==(const WindowSet& o) const = default;
};

// Window with all positions known.
WindowSet exact_window(Bits bits, TailHint tail);

WindowSet to_window(const FinCofSet& a, Nat bound);

WindowSet operator|(const WindowSet& a, const WindowSet& b);
WindowSet operator&(const WindowSet& a, const WindowSet& b);
WindowSet operator~(const WindowSet& a);
WindowSet oplus(const WindowSet& a, const WindowSet& b);
WindowSet otimes(const WindowSet& a, const WindowSet& b);
WindowSet down_close(const WindowSet& a);

// Project a FinCofSet through the whole-set queries below.
struct SetAnalysis {
    TriBool empty;
    enum class Min { Known, None, Undecided } min_kind;
    Nat min_value = 0;  // meaningful only when min_kind == Known
};

SetAnalysis analyze(const FinCofSet& a);
SetAnalysis analyze(const WindowSet& a);

// Whole-set emptiness knowledge used by the zero bit of the product.
bool known_nonempty(const WindowSet& a);
bool known_empty(const WindowSet& a);

// Number of prime factors of m counted with multiplicity. Rejects m = 0.
unsigned prime_factor_count(Nat m);

bool is_prime(Nat n);

// ---- set literal syntax: {1,2,3}  ~{0}  empty  omega ----

FinCofSet parse_fincof(const std::string& text);
std::string format_fincof(const FinCofSet& a);

std::string format_tail(TailHint t);
std::string format_window(const WindowSet& w);

}  // namespace natalg
