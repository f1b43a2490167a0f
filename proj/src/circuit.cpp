#include "natalg/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace natalg {

unsigned node_arity(NodeOp op) {
    switch (op) {
        case NodeOp::Const:
        case NodeOp::Empty:
        case NodeOp::Omega:
        case NodeOp::Var:
            return 0;
        case NodeOp::Comp:
        case NodeOp::Down:
            return 1;
        default:
            return 2;
    }
}

namespace {

std::optional<NodeOp> op_from_keyword(const std::string& kw) {
    if (kw == "const") return NodeOp::Const;
    if (kw == "empty") return NodeOp::Empty;
    if (kw == "omega") return NodeOp::Omega;
    if (kw == "var") return NodeOp::Var;
    if (kw == "comp") return NodeOp::Comp;
    if (kw == "down") return NodeOp::Down;
    if (kw == "union") return NodeOp::Union;
    if (kw == "inter") return NodeOp::Inter;
    if (kw == "plus") return NodeOp::Plus;
    if (kw == "times") return NodeOp::Times;
    return std::nullopt;
}

std::vector<std::string> tokenize_line(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line.substr(0, line.find('#')));
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
    struct Pending {
        NodeOp op;
        Nat value = 0;
        std::string var;
        std::string ref0, ref1;
        std::size_t line = 0;
    };

    std::vector<Pending> pending;
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;
    std::optional<std::string> output_ref;
    std::size_t output_line = 0;

    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto toks = tokenize_line(line);
        if (toks.empty()) continue;

        if (toks[0] == "output") {
            if (toks.size() != 2) throw CircuitError("output expects one node id", lineno);
            if (output_ref) throw CircuitError("duplicate output statement", lineno);
            output_ref = toks[1];
            output_line = lineno;
            continue;
        }

        if (toks.size() < 3 || toks[1] != "=")
            throw CircuitError("expected '<id> = <op> ...'", lineno);
        const std::string& id = toks[0];
        if (index.count(id)) throw CircuitError("node '" + id + "' defined twice", lineno);

        auto op = op_from_keyword(toks[2]);
        if (!op) throw CircuitError("unknown operation '" + toks[2] + "'", lineno);

        Pending p;
        p.op = *op;
        p.line = lineno;
        const std::size_t args = toks.size() - 3;
        switch (*op) {
            case NodeOp::Const:
                if (args != 1) throw CircuitError("const expects one number", lineno);
                try {
                    p.value = std::stoull(toks[3]);
                } catch (const std::exception&) {
                    throw CircuitError("bad constant '" + toks[3] + "'", lineno);
                }
                break;
            case NodeOp::Empty:
            case NodeOp::Omega:
                if (args != 0) throw CircuitError("arity mismatch", lineno);
                break;
            case NodeOp::Var:
                if (args != 1) throw CircuitError("var expects a name", lineno);
                p.var = toks[3];
                break;
            case NodeOp::Comp:
            case NodeOp::Down:
                if (args != 1) throw CircuitError("arity mismatch", lineno);
                p.ref0 = toks[3];
                break;
            default:
                if (args != 2) throw CircuitError("arity mismatch", lineno);
                p.ref0 = toks[3];
                p.ref1 = toks[4];
        }
        index.emplace(id, pending.size());
        pending.push_back(std::move(p));
        names.push_back(id);
    }

    if (!output_ref) throw CircuitError("no output statement");
    if (pending.empty()) throw CircuitError("no output", output_line);

    auto resolve = [&](const std::string& ref, std::size_t line) {
        auto it = index.find(ref);
        if (it == index.end())
            throw CircuitError("dangling reference to node '" + ref + "'", line);
        return it->second;
    };

    Circuit c;
    c.names = names;
    for (const Pending& p : pending) {
        CircuitNode n;
        n.op = p.op;
        n.value = p.value;
        n.var = p.var;
        if (node_arity(p.op) >= 1) n.child0 = resolve(p.ref0, p.line);
        if (node_arity(p.op) == 2) n.child1 = resolve(p.ref1, p.line);
        c.nodes.push_back(std::move(n));
    }
    c.output = resolve(*output_ref, output_line);

    validate(c);
    return c;
}

void validate(const Circuit& c) {
    if (c.nodes.empty()) throw CircuitError("no output");
    if (c.output >= c.nodes.size()) throw CircuitError("output index out of range");

    for (const CircuitNode& n : c.nodes) {
        unsigned arity = node_arity(n.op);
        if (arity >= 1 && n.child0 >= c.nodes.size())
            throw CircuitError("dangling child index");
        if (arity == 2 && n.child1 >= c.nodes.size())
            throw CircuitError("dangling child index");
    }

    // DFS cycle check over the child relation.
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(c.nodes.size(), Mark::White);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (mark[i] == Mark::Black) return;
        if (mark[i] == Mark::Grey) {
            std::string id = i < c.names.size() ? c.names[i] : std::to_string(i);
            throw CircuitError("cycle through node '" + id + "'");
        }
        mark[i] = Mark::Grey;
        unsigned arity = node_arity(c.nodes[i].op);
        if (arity >= 1) visit(c.nodes[i].child0);
        if (arity == 2) visit(c.nodes[i].child1);
        mark[i] = Mark::Black;
    };
    for (std::size_t i = 0; i < c.nodes.size(); ++i) visit(i);
}

FragmentInfo classify_fragment(const Circuit& c) {
    FragmentInfo f;
    for (const CircuitNode& n : c.nodes) {
        switch (n.op) {
            case NodeOp::Union: f.has_union = true; break;
            case NodeOp::Inter: f.has_inter = true; break;
            case NodeOp::Comp: f.has_comp = true; break;
            case NodeOp::Plus: f.has_plus = true; break;
            case NodeOp::Times: f.has_times = true; break;
            case NodeOp::Down: f.has_down = true; break;
            default: break;
        }
    }
    f.monotone = !f.has_comp;
    f.additive_exact = !f.has_times;
    return f;
}

namespace {

std::vector<std::size_t> topo_order(const Circuit& c) {
    std::vector<std::size_t> order;
    order.reserve(c.nodes.size());
    std::vector<char> done(c.nodes.size(), 0);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (done[i]) return;
        done[i] = 1;
        unsigned arity = node_arity(c.nodes[i].op);
        if (arity >= 1) visit(c.nodes[i].child0);
        if (arity == 2) visit(c.nodes[i].child1);
        order.push_back(i);
    };
    for (std::size_t i = 0; i < c.nodes.size(); ++i) visit(i);
    return order;
}

}  // namespace

std::vector<FinCofSet> evaluate_fincof(const Circuit& c, const FinCofAssignment& asg) {
    std::vector<FinCofSet> value(c.nodes.size());
    for (std::size_t i : topo_order(c)) {
        const CircuitNode& n = c.nodes[i];
        switch (n.op) {
            case NodeOp::Const: value[i] = FinCofSet::singleton(n.value); break;
            case NodeOp::Empty: value[i] = FinCofSet::empty(); break;
            case NodeOp::Omega: value[i] = FinCofSet::omega(); break;
            case NodeOp::Var: {
                auto it = asg.find(n.var);
                if (it == asg.end())
                    throw CircuitError("unbound variable '" + n.var + "'");
                value[i] = it->second;
                break;
            }
            case NodeOp::Comp: value[i] = ~value[n.child0]; break;
            case NodeOp::Down: value[i] = down_close(value[n.child0]); break;
            case NodeOp::Union: value[i] = value[n.child0] | value[n.child1]; break;
            case NodeOp::Inter: value[i] = value[n.child0] & value[n.child1]; break;
            case NodeOp::Plus: value[i] = oplus(value[n.child0], value[n.child1]); break;
            case NodeOp::Times: {
                auto r = try_otimes(value[n.child0], value[n.child1]);
                if (!r) {
                    std::string id = i < c.names.size() ? c.names[i] : std::to_string(i);
                    throw NonClosureError("times gate '" + id +
                                          "' leaves the finite-cofinite class; "
                                          "evaluate with the window engine");
                }
                value[i] = *r;
                break;
            }
        }
    }
    return value;
}

std::vector<WindowSet> evaluate_window(const Circuit& c, const WindowAssignment& asg,
                                       Nat bound) {
    std::vector<WindowSet> value(c.nodes.size());
    for (std::size_t i : topo_order(c)) {
        const CircuitNode& n = c.nodes[i];
        switch (n.op) {
            case NodeOp::Const:
                value[i] = to_window(FinCofSet::singleton(n.value), bound);
                break;
            case NodeOp::Empty: value[i] = to_window(FinCofSet::empty(), bound); break;
            case NodeOp::Omega: value[i] = to_window(FinCofSet::omega(), bound); break;
            case NodeOp::Var: {
                auto it = asg.find(n.var);
                if (it == asg.end())
                    throw CircuitError("unbound variable '" + n.var + "'");
                if (it->second.bound() != bound)
                    throw std::invalid_argument("assignment window bound differs");
                value[i] = it->second;
                break;
            }
            case NodeOp::Comp: value[i] = ~value[n.child0]; break;
            case NodeOp::Down: value[i] = down_close(value[n.child0]); break;
            case NodeOp::Union: value[i] = value[n.child0] | value[n.child1]; break;
            case NodeOp::Inter: value[i] = value[n.child0] & value[n.child1]; break;
            case NodeOp::Plus: value[i] = oplus(value[n.child0], value[n.child1]); break;
            case NodeOp::Times: value[i] = otimes(value[n.child0], value[n.child1]); break;
        }
    }
    return value;
}

std::vector<WindowSet> evaluate_window(const Circuit& c, const FinCofAssignment& asg,
                                       Nat bound) {
    WindowAssignment w;
    for (const auto& [name, set] : asg) w.emplace(name, to_window(set, bound));
    return evaluate_window(c, w, bound);
}

Nat default_member_bound(const Circuit& c, Nat n) {
    Nat bound = n;
    for (const CircuitNode& node : c.nodes)
        if (node.op == NodeOp::Const) bound = std::max(bound, node.value);
    return bound;
}

TriBool member(const Circuit& c, Nat n, Nat bound, const FinCofAssignment& asg) {
    if (bound < n) throw std::invalid_argument("member: bound must be at least n");
    auto values = evaluate_window(c, asg, bound);
    return values[c.output].membership(n);
}

TriBool member(const Circuit& c, Nat n, const FinCofAssignment& asg) {
    return member(c, n, default_member_bound(c, n), asg);
}

// ------------------------------------------------------------- stdlib ----

namespace {

// Small builder for programmatic circuits.
struct Builder {
    Circuit c;

    std::size_t add(CircuitNode n) {
        c.nodes.push_back(std::move(n));
        c.names.push_back(std::to_string(c.nodes.size()));
        return c.nodes.size() - 1;
    }
    std::size_t constant(Nat v) { return add({NodeOp::Const, v, "", 0, 0}); }
    std::size_t omega() { return add({NodeOp::Omega, 0, "", 0, 0}); }
    std::size_t var(const std::string& name) { return add({NodeOp::Var, 0, name, 0, 0}); }
    std::size_t comp(std::size_t x) { return add({NodeOp::Comp, 0, "", x, 0}); }
    std::size_t down(std::size_t x) { return add({NodeOp::Down, 0, "", x, 0}); }
    std::size_t unite(std::size_t x, std::size_t y) { return add({NodeOp::Union, 0, "", x, y}); }
    std::size_t inter(std::size_t x, std::size_t y) { return add({NodeOp::Inter, 0, "", x, y}); }
    std::size_t plus(std::size_t x, std::size_t y) { return add({NodeOp::Plus, 0, "", x, y}); }
    std::size_t times(std::size_t x, std::size_t y) { return add({NodeOp::Times, 0, "", x, y}); }

    Circuit finish(std::size_t out) {
        c.output = out;
        validate(c);
        return std::move(c);
    }
};

Circuit build_evens() {
    Builder b;
    auto one = b.constant(1);
    auto om = b.omega();
    auto two = b.plus(one, one);
    return b.finish(b.times(two, om));
}

// comp(comp e (o) comp e) /\ comp e, with e the unit of the operation.
Circuit build_g_term(NodeOp op) {
    Builder b;
    auto e = b.constant(op == NodeOp::Plus ? 0 : 1);
    auto ce = b.comp(e);
    auto sq = op == NodeOp::Plus ? b.plus(ce, ce) : b.times(ce, ce);
    auto body = b.comp(sq);
    return b.finish(b.inter(body, ce));
}

Circuit build_c_of(const std::string& var) {
    Builder b;
    auto x = b.var(var);
    auto om = b.omega();
    return b.finish(b.plus(x, om));
}

Circuit build_disc_plus_times(const std::string& var) {
    Builder b;
    auto x = b.var(var);
    auto zero = b.constant(0);
    auto zx = b.times(zero, x);
    auto om = b.omega();
    return b.finish(b.plus(om, zx));
}

Circuit build_disc_plus_leq(const std::string& var) {
    Builder b;
    auto x = b.var(var);
    auto dx = b.down(x);
    auto om = b.omega();
    return b.finish(b.plus(om, dx));
}

Circuit build_fin(const std::string& var) {
    Builder b;
    auto x = b.var(var);
    auto dx = b.down(x);
    auto cdx = b.comp(dx);
    auto dcdx = b.down(cdx);
    auto om = b.omega();
    auto d = b.plus(om, dcdx);
    return b.finish(b.comp(d));
}

Circuit build_a_n(Nat n) {
    if (n == 0) {
        Builder b;
        return b.finish(b.constant(1));
    }
    Builder b;
    auto one = b.constant(1);
    auto c1 = b.comp(one);
    auto sq = b.times(c1, c1);
    auto a1 = b.inter(b.comp(sq), c1);
    auto acc = a1;
    for (Nat i = 1; i < n; ++i) acc = b.times(acc, a1);  // shares the a1 subgraph
    return b.finish(acc);
}

Circuit build_po_p(Nat p) {
    if (!is_prime(p)) throw CircuitError("poP expects a prime, got " + std::to_string(p));
    Builder b;
    auto cp = b.constant(p);
    auto om = b.omega();
    auto mult = b.times(om, cp);            // all multiples of p
    auto nondiv = b.comp(mult);             // all n not divisible by p
    auto one = b.constant(1);
    auto coprime = b.inter(nondiv, b.comp(one));  // all n != 1 coprime to p
    auto has_coprime_factor = b.times(om, coprime);
    return b.finish(b.comp(has_coprime_factor));  // the powers of p
}

Nat parse_nat_param(const std::string& name, const std::vector<std::string>& params) {
    if (params.size() != 1)
        throw CircuitError("stdlib '" + name + "' expects one parameter");
    try {
        return std::stoull(params[0]);
    } catch (const std::exception&) {
        throw CircuitError("stdlib '" + name + "': bad parameter '" + params[0] + "'");
    }
}

}  // namespace

std::vector<std::string> stdlib_names() {
    return {"evens", "primes", "one",  "cOf", "geq", "discPlusTimes",
            "discPlusLeq", "fin", "gTerm", "a1",  "aN",  "poP"};
}

Circuit stdlib_circuit(const std::string& name, const std::vector<std::string>& params) {
    auto no_params = [&] {
        if (!params.empty())
            throw CircuitError("stdlib '" + name + "' takes no parameters");
    };
    if (name == "evens") { no_params(); return build_evens(); }
    if (name == "primes" || name == "a1") { no_params(); return build_a_n(1); }
    if (name == "one") { no_params(); return build_g_term(NodeOp::Plus); }
    if (name == "cOf" || name == "geq") {
        return build_c_of(params.empty() ? "x" : params[0]);
    }
    if (name == "discPlusTimes")
        return build_disc_plus_times(params.empty() ? "x" : params[0]);
    if (name == "discPlusLeq")
        return build_disc_plus_leq(params.empty() ? "x" : params[0]);
    if (name == "fin") return build_fin(params.empty() ? "x" : params[0]);
    if (name == "gTerm") {
        if (params.size() != 1 || (params[0] != "plus" && params[0] != "times"))
            throw CircuitError("stdlib 'gTerm' expects parameter plus or times");
        return build_g_term(params[0] == "plus" ? NodeOp::Plus : NodeOp::Times);
    }
    if (name == "aN") return build_a_n(parse_nat_param(name, params));
    if (name == "poP") return build_po_p(parse_nat_param(name, params));
    throw CircuitError("unknown stdlib circuit '" + name + "'");
}

}  // namespace natalg
