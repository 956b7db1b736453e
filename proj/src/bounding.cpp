#include "bcp/bounding.hpp"

#include <string>

namespace bcp {

namespace {

std::uint32_t fresh_state(CounterMachine& m, std::string name) {
    while (m.find_state(name)) name += "'";
    return m.add_state(name);
}

std::uint32_t fresh_counter(CounterMachine& m, std::string name) {
    while (m.find_counter(name)) name += "'";
    return m.add_counter(name);
}

Instruction inc_of(std::uint32_t x) { return {InsKind::Inc, x}; }
Instruction dec_of(std::uint32_t x) { return {InsKind::Dec, x}; }
Instruction zero_of(std::uint32_t x) { return {InsKind::Zero, x}; }
Instruction nonzero_of(std::uint32_t x) { return {InsKind::Nonzero, x}; }

} // namespace

std::vector<std::uint32_t> base_digits(std::uint64_t value, std::uint64_t n, std::uint32_t width) {
    std::vector<std::uint32_t> out(width, 0);
    std::uint64_t base = n + 1;
    if (base <= 1) return out;
    for (std::uint32_t j = 0; j < width && value > 0; ++j) {
        out[j] = static_cast<std::uint32_t>(value % base);
        value /= base;
    }
    return out;
}

CounterMachine weaken(const CounterMachine& m) {
    if (!m.bound || m.bound->cls != BoundClass::Poly) {
        raise(ErrorCode::MissingBoundDeclaration,
              "weaken needs a machine declared 'bound: poly c'");
    }
    std::uint32_t c = m.bound->degree;
    if (c == 0) {
        raise(ErrorCode::MissingBoundDeclaration, "polynomial bound must have degree at least 1");
    }

    CounterMachine w;
    w.name = m.name + "-weak";
    w.input_arity = m.input_arity;
    w.bound = Bound{BoundClass::WeakN, 1};

    // Counter values are held as little-endian base-(n+1) digits. The digit-0
    // counters of the inputs go first so the rewritten machine keeps the same
    // input vectors; z0 and zn are scratch shared by every gadget, with the
    // resting invariant zn = n and z0 = 0 at every original control state.
    std::size_t nx = m.counters.size();
    std::vector<std::vector<std::uint32_t>> digit(nx, std::vector<std::uint32_t>(c, 0));
    for (std::uint32_t i = 0; i < m.input_arity; ++i) {
        digit[i][0] = fresh_counter(w, m.counters[i] + ".0");
    }
    for (std::uint32_t x = 0; x < nx; ++x) {
        for (std::uint32_t j = 0; j < c; ++j) {
            if (x < m.input_arity && j == 0) continue;
            digit[x][j] = fresh_counter(w, m.counters[x] + "." + std::to_string(j));
        }
    }
    std::uint32_t z0 = fresh_counter(w, "z0");
    std::uint32_t zn = fresh_counter(w, "zn");

    for (const auto& s : m.states) w.add_state(s);
    std::uint32_t q0 = m.initial;
    w.initial = m.initial;
    w.accept = m.accept;
    w.reject = m.reject;

    auto plain = [&](std::uint32_t src, Instruction ins, std::uint32_t dst) {
        w.transitions.push_back({src, ins, dst});
    };
    // Self-loop macros always lead with their guarded decrement, so a loop
    // started one time too many blocks before touching any other counter and
    // no transient configuration pushes a counter past n.
    auto loop = [&](std::uint32_t at, const std::vector<Instruction>& body, const std::string& tag) {
        add_macro(w, at, body, at, tag);
    };

    // Entry gadget: drain each input's digit-0 counter while growing z0 and
    // zn together, then pour z0 back. Afterwards zn holds the population
    // total n, z0 is empty, and the inputs are untouched.
    if (m.input_arity > 0) {
        std::string base = m.states[q0] + "#init";
        std::uint32_t at = fresh_state(w, base + "#a0");
        w.initial = at;
        for (std::uint32_t i = 0; i < m.input_arity; ++i) {
            loop(at, {dec_of(digit[i][0]), inc_of(z0), inc_of(zn)}, "measure");
            std::uint32_t back = fresh_state(w, base + "#b" + std::to_string(i));
            plain(at, zero_of(digit[i][0]), back);
            loop(back, {dec_of(z0), inc_of(digit[i][0])}, "return");
            std::uint32_t next =
                (i + 1 == m.input_arity) ? q0 : fresh_state(w, base + "#a" + std::to_string(i + 1));
            plain(back, zero_of(z0), next);
            at = next;
        }
    }

    std::uint32_t overflow = UINT32_MAX;
    auto get_overflow = [&]() {
        if (overflow == UINT32_MAX) overflow = fresh_state(w, "overflow");
        return overflow;
    };

    for (std::uint32_t ti = 0; ti < m.transitions.size(); ++ti) {
        const CmTransition& t = m.transitions[ti];
        std::string pre = m.states[t.src] + "#t" + std::to_string(ti);
        std::uint32_t q = t.src, r = t.dst, x = t.ins.counter;
        switch (t.ins.kind) {
            case InsKind::Nop:
                plain(q, {InsKind::Nop, 0}, r);
                break;
            case InsKind::Zero: {
                // The value is zero iff every digit is; intermediate states
                // can bail out to the source in case another digit is not.
                std::uint32_t cur = q;
                for (std::uint32_t j = 0; j < c; ++j) {
                    std::uint32_t nxt =
                        (j + 1 == c) ? r : fresh_state(w, pre + "#z" + std::to_string(j + 1));
                    plain(cur, zero_of(digit[x][j]), nxt);
                    if (j + 1 < c) plain(nxt, {InsKind::Nop, 0}, q);
                    cur = nxt;
                }
                break;
            }
            case InsKind::Nonzero:
                for (std::uint32_t j = 0; j < c; ++j) plain(q, nonzero_of(digit[x][j]), r);
                break;
            case InsKind::Inc: {
                // Base-(n+1) increment: walk up from digit 0, zeroing full
                // digits, until one has room. Each "is this digit full?" test
                // drains the digit against zn, branches on whether zn ran
                // out, and undoes the drain through z0.
                std::uint32_t e = fresh_state(w, pre + "#e0");
                plain(q, {InsKind::Nop, 0}, e);
                for (std::uint32_t j = 0; j < c; ++j) {
                    loop(e, {dec_of(digit[x][j]), dec_of(zn), inc_of(z0)}, "probe");
                    std::uint32_t br = fresh_state(w, pre + "#q" + std::to_string(j));
                    plain(e, zero_of(digit[x][j]), br);
                    std::uint32_t full = fresh_state(w, pre + "#full" + std::to_string(j));
                    std::uint32_t room = fresh_state(w, pre + "#room" + std::to_string(j));
                    plain(br, zero_of(zn), full);
                    plain(br, nonzero_of(zn), room);
                    loop(full, {dec_of(z0), inc_of(digit[x][j]), inc_of(zn)}, "undo");
                    loop(room, {dec_of(z0), inc_of(digit[x][j]), inc_of(zn)}, "undo");
                    std::uint32_t carry = fresh_state(w, pre + "#carry" + std::to_string(j));
                    std::uint32_t bump = fresh_state(w, pre + "#bump" + std::to_string(j));
                    plain(full, zero_of(z0), carry);
                    plain(room, zero_of(z0), bump);
                    plain(bump, inc_of(digit[x][j]), r);
                    plain(carry, dec_of(digit[x][j]), carry);
                    if (j + 1 < c) {
                        std::uint32_t e2 = fresh_state(w, pre + "#e" + std::to_string(j + 1));
                        plain(carry, zero_of(digit[x][j]), e2);
                        e = e2;
                    } else {
                        plain(carry, zero_of(digit[x][j]), get_overflow());
                    }
                }
                break;
            }
            case InsKind::Dec: {
                // Borrow: find the lowest nonzero digit, decrement it, then
                // refill every digit below to n. An all-zero scan falls back
                // to the source state, like a blocked decrement.
                std::uint32_t cur = q;
                for (std::uint32_t j = 0; j < c; ++j) {
                    std::uint32_t hit = fresh_state(w, pre + "#hit" + std::to_string(j));
                    plain(cur, nonzero_of(digit[x][j]), hit);
                    std::uint32_t nxt =
                        (j + 1 == c) ? q : fresh_state(w, pre + "#s" + std::to_string(j + 1));
                    plain(cur, zero_of(digit[x][j]), nxt);
                    if (j == 0) {
                        plain(hit, dec_of(digit[x][0]), r);
                    } else {
                        std::string js = std::to_string(j);
                        std::uint32_t g = fresh_state(w, pre + "#g" + js + "_" + std::to_string(j - 1));
                        plain(hit, dec_of(digit[x][j]), g);
                        for (std::uint32_t i = j; i-- > 0;) {
                            std::string is = std::to_string(i);
                            std::uint32_t gz = fresh_state(w, pre + "#h" + js + "_" + is);
                            plain(g, dec_of(digit[x][i]), g);
                            plain(g, zero_of(digit[x][i]), gz);
                            loop(gz, {dec_of(zn), inc_of(digit[x][i]), inc_of(z0)}, "fill");
                            std::uint32_t gk = fresh_state(w, pre + "#k" + js + "_" + is);
                            plain(gz, zero_of(zn), gk);
                            loop(gk, {dec_of(z0), inc_of(zn)}, "return");
                            std::uint32_t exit_state =
                                (i == 0) ? r : fresh_state(w, pre + "#g" + js + "_" + std::to_string(i - 1));
                            plain(gk, zero_of(z0), exit_state);
                            g = exit_state;
                        }
                    }
                    cur = nxt;
                }
                break;
            }
        }
    }
    return w;
}

CounterMachine tighten(const CounterMachine& m) {
    if (!m.bound || m.bound->cls != BoundClass::WeakN) {
        raise(ErrorCode::MissingBoundDeclaration,
              "tighten needs a machine declared 'bound: weak-n'");
    }
    std::size_t k = m.counters.size();
    if (k > 8) {
        raise(ErrorCode::CounterCountTooLarge,
              "tighten builds one pool per counter subset; " + std::to_string(k) +
                  " counters is past the limit of 8");
    }

    CounterMachine t;
    t.name = m.name + "-tight";
    t.input_arity = m.input_arity;
    t.bound = Bound{BoundClass::N, 1};

    // One token pool per subset of the original counters. A counter's value
    // is the total of the pools whose subset contains it, and the pools
    // always sum to exactly n, so the machine is n-bounded by construction.
    std::uint32_t nmask = 1u << k;
    std::vector<std::uint32_t> pool(nmask, UINT32_MAX);
    auto pool_name = [&](std::uint32_t mask) {
        std::string s = "y{";
        bool first = true;
        for (std::uint32_t i = 0; i < k; ++i) {
            if (mask >> i & 1) {
                if (!first) s += ",";
                s += m.counters[i];
                first = false;
            }
        }
        return s + "}";
    };
    for (std::uint32_t i = 0; i < m.input_arity; ++i) {
        pool[1u << i] = fresh_counter(t, pool_name(1u << i));
    }
    for (std::uint32_t mask = 0; mask < nmask; ++mask) {
        if (pool[mask] == UINT32_MAX) pool[mask] = fresh_counter(t, pool_name(mask));
    }

    for (const auto& s : m.states) t.add_state(s);
    t.initial = m.initial;
    t.accept = m.accept;
    t.reject = m.reject;

    for (std::uint32_t ti = 0; ti < m.transitions.size(); ++ti) {
        const CmTransition& tr = m.transitions[ti];
        std::string pre = m.states[tr.src] + "#t" + std::to_string(ti);
        std::uint32_t x = tr.ins.counter;
        std::uint32_t bit = tr.ins.kind == InsKind::Nop ? 0 : (1u << x);
        switch (tr.ins.kind) {
            case InsKind::Nop:
                t.transitions.push_back({tr.src, {InsKind::Nop, 0}, tr.dst});
                break;
            case InsKind::Zero: {
                std::vector<std::uint32_t> masks;
                for (std::uint32_t mask = 0; mask < nmask; ++mask) {
                    if (mask & bit) masks.push_back(mask);
                }
                std::uint32_t cur = tr.src;
                for (std::size_t idx = 0; idx < masks.size(); ++idx) {
                    std::uint32_t nxt =
                        (idx + 1 == masks.size())
                            ? tr.dst
                            : fresh_state(t, pre + "#z" + std::to_string(idx + 1));
                    t.transitions.push_back({cur, zero_of(pool[masks[idx]]), nxt});
                    if (idx + 1 < masks.size()) {
                        t.transitions.push_back({nxt, {InsKind::Nop, 0}, tr.src});
                    }
                    cur = nxt;
                }
                break;
            }
            case InsKind::Nonzero:
                for (std::uint32_t mask = 0; mask < nmask; ++mask) {
                    if (mask & bit) {
                        t.transitions.push_back({tr.src, nonzero_of(pool[mask]), tr.dst});
                    }
                }
                break;
            case InsKind::Inc:
                // Move one token into a pool that contains x, from any pool
                // that does not; leading with the decrement keeps the total
                // pinned at n mid-macro.
                for (std::uint32_t mask = 0; mask < nmask; ++mask) {
                    if (mask & bit) continue;
                    add_macro(t, tr.src, {dec_of(pool[mask]), inc_of(pool[mask | bit])}, tr.dst,
                              "t" + std::to_string(ti) + "i" + std::to_string(mask));
                }
                break;
            case InsKind::Dec:
                for (std::uint32_t mask = 0; mask < nmask; ++mask) {
                    if (!(mask & bit)) continue;
                    add_macro(t, tr.src, {dec_of(pool[mask]), inc_of(pool[mask & ~bit])}, tr.dst,
                              "t" + std::to_string(ti) + "d" + std::to_string(mask));
                }
                break;
        }
    }
    return t;
}

CounterMachine lower_to_n_bounded(const CounterMachine& m) {
    if (!m.bound) {
        raise(ErrorCode::MissingBoundDeclaration,
              "lowering to an n-bounded machine needs a declared bound");
    }
    switch (m.bound->cls) {
        case BoundClass::N: return m;
        case BoundClass::WeakN: return tighten(m);
        case BoundClass::Poly: return tighten(weaken(m));
    }
    return m;
}

} // namespace bcp
