#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "natalg/natset.hpp"

namespace natalg {

// =========================================================================
// Arithmetic circuits: labeled acyclic graphs over sets of naturals.
// Nodes are stored in a flat vector; children refer to earlier validation
// state only through indices, so sharing is preserved as given.
// =========================================================================

enum class NodeOp {
    Const,   // {n}
    Empty,
    Omega,
    Var,
    Comp,    // complement relative to omega
    Down,    // downward closure
    Union,
    Inter,
    Plus,    // sumset
    Times,   // product set
};

unsigned node_arity(NodeOp op);

struct CircuitNode {
    NodeOp op;
    Nat value = 0;          // Const payload
    std::string var;        // Var payload
    std::size_t child0 = 0; // unary and binary
    std::size_t child1 = 0; // binary only
};

struct Circuit {
    std::vector<CircuitNode> nodes;
    std::size_t output = 0;
    std::vector<std::string> names;  // original node ids, parallel to nodes

    const CircuitNode& out_node() const { return nodes[output]; }
};

class CircuitError : public std::runtime_error {
public:
    CircuitError(std::string message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                  : std::move(message)),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Line format:  <id> = const <n> | empty | omega | var <name> | comp <id>
//               | down <id> | union <id> <id> | inter <id> <id>
//               | plus <id> <id> | times <id> <id>
// closed by     output <id>
// '#' starts a comment. Forward references are allowed; cycles are not.
Circuit parse_circuit(const std::string& text);

// Checks arity, child indices and acyclicity. parse_circuit validates on
// the way out; this is for circuits built programmatically.
void validate(const Circuit& c);

// ---- fragment classification -------------------------------------------

struct FragmentInfo {
    bool has_union = false;
    bool has_inter = false;
    bool has_comp = false;
    bool has_plus = false;
    bool has_times = false;
    bool has_down = false;

    bool monotone = false;        // no complement anywhere
    bool additive_exact = false;  // ops within union/inter/comp/plus/down
};

FragmentInfo classify_fragment(const Circuit& c);

// ---- evaluation ----------------------------------------------------------

using FinCofAssignment = std::map<std::string, FinCofSet>;
using WindowAssignment = std::map<std::string, WindowSet>;

// Exact engine; throws NonClosureError when a Times gate leaves the class
// and CircuitError on unbound variables.
std::vector<FinCofSet> evaluate_fincof(const Circuit& c, const FinCofAssignment& asg);

std::vector<WindowSet> evaluate_window(const Circuit& c, const WindowAssignment& asg,
                                       Nat bound);
// Convenience: pushes a FinCof assignment through to_window first.
std::vector<WindowSet> evaluate_window(const Circuit& c, const FinCofAssignment& asg,
                                       Nat bound);

// Membership of n in the circuit value, decided within a window of size
// bound >= n. In/Out answers are exact.
TriBool member(const Circuit& c, Nat n, Nat bound, const FinCofAssignment& asg = {});

// Window defaulting to max(n, largest constant in the circuit).
TriBool member(const Circuit& c, Nat n, const FinCofAssignment& asg = {});

Nat default_member_bound(const Circuit& c, Nat n);

// ---- standard circuits ---------------------------------------------------

// evens            the multiples of two
// primes           the primes (same graph as a1)
// one              {1} from {0} with plus and Boolean ops
// cOf              x (+) omega
// geq              alias for cOf in its role as the >= operator
// discPlusTimes    omega (+) ({0} (x) x); empty to empty, else omega
// discPlusLeq      omega (+) down(x)
// fin              comp(discPlusLeq(comp(down x))); finite to empty, infinite to omega
// gTerm            comp(comp(e) o comp(e)) /\ comp(e) for o in {plus, times}
// a1               the primes as comp((omega \ {1}) (x) (omega \ {1})) \ {1}
// aN               n-fold times power of a1
// poP              the powers of a prime p
Circuit stdlib_circuit(const std::string& name, const std::vector<std::string>& params = {});

std::vector<std::string> stdlib_names();

}  // namespace natalg
