#include "bcp/compile.hpp"

#include <numeric>
#include <string>

#include "bcp/bounding.hpp"

namespace bcp {

namespace {

std::string bit_name(std::uint32_t b) { return b ? "1" : "0"; }

} // namespace

Protocol cm_to_protocol(const CounterMachine& m) {
    if (!m.bound || m.bound->cls != BoundClass::N) {
        raise(ErrorCode::NotNBounded,
              "compiling machine '" + m.name + "' needs a declared 'bound: n'");
    }

    std::uint32_t nq = static_cast<std::uint32_t>(m.states.size());
    std::uint32_t nx = static_cast<std::uint32_t>(m.counters.size());
    std::uint32_t arity = m.input_arity;
    std::uint32_t idle_pos = nx, err_pos = nx + 1;

    Protocol p;
    p.name = m.name;
    p.notes.push_back("single-leader simulation of machine '" + m.name + "'");

    // Leader states (control state, opinion) first, then one state per
    // (token position, input symbol of origin, opinion). A token's position
    // names the counter holding it, or idle (counted nowhere) or err.
    auto pos_name = [&](std::uint32_t pos) -> std::string {
        if (pos == idle_pos) return "idle";
        if (pos == err_pos) return "err";
        return m.counters[pos];
    };
    for (std::uint32_t q = 0; q < nq; ++q) {
        for (std::uint32_t b = 0; b < 2; ++b) {
            p.add_state("(" + m.states[q] + "," + bit_name(b) + ")", b == 1);
        }
    }
    for (std::uint32_t pos = 0; pos < nx + 2; ++pos) {
        for (std::uint32_t y = 0; y < arity; ++y) {
            for (std::uint32_t b = 0; b < 2; ++b) {
                p.add_state("(" + pos_name(pos) + "," + m.counters[y] + "," + bit_name(b) + ")",
                            b == 1);
            }
        }
    }
    auto leader = [&](std::uint32_t q, std::uint32_t b) { return q * 2 + b; };
    auto token = [&](std::uint32_t pos, std::uint32_t y, std::uint32_t b) {
        return nq * 2 + (pos * arity + y) * 2 + b;
    };

    p.alphabet.assign(m.counters.begin(), m.counters.begin() + arity);
    for (std::uint32_t y = 0; y < arity; ++y) p.input_map.push_back(token(y, y, 0));
    p.leaders = Config::from_entries({{leader(m.initial, 0), 1}});

    std::uint32_t total = static_cast<std::uint32_t>(p.states.size());
    std::vector<StateId> identity(total);
    std::iota(identity.begin(), identity.end(), 0);
    std::uint32_t f_identity = p.intern_transfer(identity);

    std::vector<StateId> rst = identity;
    for (std::uint32_t q = 0; q < nq; ++q) {
        for (std::uint32_t b = 0; b < 2; ++b) rst[leader(q, b)] = leader(m.initial, 0);
    }
    for (std::uint32_t pos = 0; pos < nx + 2; ++pos) {
        for (std::uint32_t y = 0; y < arity; ++y) {
            for (std::uint32_t b = 0; b < 2; ++b) rst[token(pos, y, b)] = token(y, y, 0);
        }
    }
    std::uint32_t f_reset = p.intern_transfer(rst);

    std::vector<StateId> one = identity;
    for (std::uint32_t q = 0; q < nq; ++q) one[leader(q, 0)] = leader(q, 1);
    for (std::uint32_t pos = 0; pos < nx + 2; ++pos) {
        for (std::uint32_t y = 0; y < arity; ++y) one[token(pos, y, 0)] = token(pos, y, 1);
    }
    std::uint32_t f_one = p.intern_transfer(one);

    std::vector<std::uint32_t> f_err(nx, UINT32_MAX);
    auto err_transfer = [&](std::uint32_t x) {
        if (f_err[x] == UINT32_MAX) {
            std::vector<StateId> images = identity;
            for (std::uint32_t y = 0; y < arity; ++y) {
                for (std::uint32_t b = 0; b < 2; ++b) images[token(x, y, b)] = token(err_pos, y, b);
            }
            f_err[x] = p.intern_transfer(images);
        }
        return f_err[x];
    };

    // Counter moves are rendez-vous between the leader and one token; the
    // leader's opinion and the token's origin and opinion ride along.
    for (const CmTransition& t : m.transitions) {
        if (t.ins.kind == InsKind::Zero || t.ins.kind == InsKind::Nop) continue;
        for (std::uint32_t y = 0; y < arity; ++y) {
            for (std::uint32_t b = 0; b < 2; ++b) {
                for (std::uint32_t bp = 0; bp < 2; ++bp) {
                    switch (t.ins.kind) {
                        case InsKind::Dec:
                            p.rendezvous.push_back({leader(t.src, b), token(t.ins.counter, y, bp),
                                                    leader(t.dst, b), token(idle_pos, y, bp)});
                            break;
                        case InsKind::Inc:
                            p.rendezvous.push_back({leader(t.src, b), token(idle_pos, y, bp),
                                                    leader(t.dst, b), token(t.ins.counter, y, bp)});
                            break;
                        case InsKind::Nonzero:
                            p.rendezvous.push_back({leader(t.src, b), token(t.ins.counter, y, bp),
                                                    leader(t.dst, b), token(t.ins.counter, y, bp)});
                            break;
                        default: break;
                    }
                }
            }
        }
    }

    // Zero tests broadcast: any token still on the tested counter is flagged
    // err, which forces a restart before the run can end. Flagged tokens
    // re-enter as freshly arrived input agents and drag everyone with them.
    for (const CmTransition& t : m.transitions) {
        if (t.ins.kind == InsKind::Zero) {
            for (std::uint32_t b = 0; b < 2; ++b) {
                p.broadcasts.push_back(
                    {leader(t.src, b), leader(t.dst, b), err_transfer(t.ins.counter)});
            }
        } else if (t.ins.kind == InsKind::Nop) {
            for (std::uint32_t b = 0; b < 2; ++b) {
                p.broadcasts.push_back({leader(t.src, b), leader(t.dst, b), f_identity});
            }
        }
    }
    for (std::uint32_t y = 0; y < arity; ++y) {
        for (std::uint32_t b = 0; b < 2; ++b) {
            p.broadcasts.push_back({token(err_pos, y, b), token(y, y, 0), f_reset});
        }
    }
    for (std::uint32_t q = 0; q < nq; ++q) {
        if (q == m.accept) continue;
        for (std::uint32_t b = 0; b < 2; ++b) {
            p.broadcasts.push_back({leader(q, b), leader(m.initial, 0), f_reset});
        }
    }
    // The acceptance flip fires from opinion 0 only. Whenever the leader
    // holds (accept,1), every agent already has opinion 1: opinions drop only
    // through f_reset, which also moves the leader off that state. An
    // opinion-1 variant could therefore only self-loop, and leaving it out
    // lets halted runs go broadcast-quiet, which the freeze rebuild needs.
    p.broadcasts.push_back({leader(m.accept, 0), leader(m.accept, 1), f_one});
    return p;
}

Protocol compose_silent(const Protocol& p_pos, const Protocol& p_neg) {
    if (p_pos.alphabet != p_neg.alphabet) {
        raise(ErrorCode::AlphabetMismatch,
              "composition needs identical alphabets; '" + p_pos.name + "' and '" + p_neg.name +
                  "' differ");
    }
    std::vector<StateId> lead_pos, lead_neg;
    for (const auto& [q, k] : p_pos.leaders.entries()) lead_pos.insert(lead_pos.end(), k, q);
    for (const auto& [q, k] : p_neg.leaders.entries()) lead_neg.insert(lead_neg.end(), k, q);
    if (lead_pos.size() != lead_neg.size()) {
        raise(ErrorCode::LeaderMismatch,
              "composition pairs leaders one to one; got " + std::to_string(lead_pos.size()) +
                  " and " + std::to_string(lead_neg.size()));
    }

    const Protocol* side[2] = {&p_pos, &p_neg};
    const std::vector<StateId>* leads[2] = {&lead_pos, &lead_neg};
    std::uint32_t w_pos = static_cast<std::uint32_t>(p_pos.states.size());
    std::uint32_t w_neg = static_cast<std::uint32_t>(p_neg.states.size());
    std::uint32_t block = w_pos + w_neg + 1;
    std::uint32_t arity = static_cast<std::uint32_t>(p_pos.alphabet.size());
    std::uint32_t norigin = arity + static_cast<std::uint32_t>(lead_pos.size());

    Protocol p;
    p.name = "compose(" + p_pos.name + "," + p_neg.name + ")";
    p.notes.push_back("positive half '" + p_pos.name + "', negative half '" + p_neg.name +
                      "' with flipped outputs");
    p.notes.push_back("an agent's first component is its origin and never changes");

    auto origin_name = [&](std::uint32_t o) {
        return o < arity ? p_pos.alphabet[o] : "~L" + std::to_string(o - arity);
    };
    auto id = [&](std::uint32_t o, int s, StateId q) {
        return o * block + (s == 0 ? q : w_pos + q);
    };
    auto rst = [&](std::uint32_t o) { return o * block + w_pos + w_neg; };

    for (std::uint32_t o = 0; o < norigin; ++o) {
        for (StateId q = 0; q < w_pos; ++q) {
            p.add_state("(" + origin_name(o) + "|p|" + p_pos.states[q] + ")",
                        p_pos.output[q] != 0);
        }
        for (StateId q = 0; q < w_neg; ++q) {
            p.add_state("(" + origin_name(o) + "|n|" + p_neg.states[q] + ")",
                        p_neg.output[q] == 0);
        }
        p.add_state("(" + origin_name(o) + "|rst)", false);
    }

    p.alphabet = p_pos.alphabet;
    for (std::uint32_t a = 0; a < arity; ++a) {
        p.input_map.push_back(id(a, 1, p_neg.input_map[a]));
    }
    {
        std::vector<std::pair<StateId, std::uint32_t>> entries;
        for (std::uint32_t t = 0; t < lead_neg.size(); ++t) {
            entries.push_back({id(arity + t, 1, lead_neg[t]), 1});
        }
        p.leaders = Config::from_entries(entries);
    }

    std::vector<StateId> identity(p.states.size());
    std::iota(identity.begin(), identity.end(), 0);

    // Lift each half's transfers: act on that half's states within every
    // origin, leave the other half and the reset states alone.
    std::vector<std::vector<std::uint32_t>> lifted(2);
    for (int s = 0; s < 2; ++s) {
        for (const auto& f : side[s]->transfers) {
            std::vector<StateId> images = identity;
            for (std::uint32_t o = 0; o < norigin; ++o) {
                for (StateId q = 0; q < side[s]->states.size(); ++q) {
                    images[id(o, s, q)] = id(o, s, f[q]);
                }
            }
            lifted[s].push_back(p.intern_transfer(std::move(images)));
        }
    }

    auto target = [&](int s, std::uint32_t o) {
        return o < arity ? id(o, s, side[s]->input_map[o]) : id(o, s, (*leads[s])[o - arity]);
    };
    std::uint32_t f_reset[2];
    for (int s = 0; s < 2; ++s) {
        std::vector<StateId> images(p.states.size());
        for (std::uint32_t o = 0; o < norigin; ++o) {
            StateId tgt = target(s, o);
            for (std::uint32_t k = 0; k < block; ++k) images[o * block + k] = tgt;
        }
        f_reset[s] = p.intern_transfer(std::move(images));
    }

    // Simulation steps, each shadowed by a defect variant in which the
    // instigator lands on its reset state instead. Steps that would not
    // change the configuration (the pre and post multisets agree) get no
    // defect variant; otherwise no configuration could ever be terminal.
    for (int s = 0; s < 2; ++s) {
        for (const RendezVous& r : side[s]->rendezvous) {
            bool noop = (r.p == r.p2 && r.q == r.q2) || (r.p == r.q2 && r.q == r.p2);
            for (std::uint32_t o1 = 0; o1 < norigin; ++o1) {
                for (std::uint32_t o2 = 0; o2 < norigin; ++o2) {
                    p.rendezvous.push_back(
                        {id(o1, s, r.p), id(o2, s, r.q), id(o1, s, r.p2), id(o2, s, r.q2)});
                    if (!noop) {
                        p.rendezvous.push_back(
                            {id(o1, s, r.p), id(o2, s, r.q), rst(o1), id(o2, s, r.q2)});
                    }
                }
            }
        }
    }
    for (int s = 0; s < 2; ++s) {
        for (const Broadcast& b : side[s]->broadcasts) {
            for (std::uint32_t o = 0; o < norigin; ++o) {
                p.broadcasts.push_back({id(o, s, b.pre), id(o, s, b.post), lifted[s][b.transfer]});
                if (b.pre != b.post) {
                    p.broadcasts.push_back({id(o, s, b.pre), rst(o), lifted[s][b.transfer]});
                }
            }
        }
    }
    // A reset agent restarts everyone into one half or the other; origins
    // pick each agent's fresh initial state.
    for (int s = 0; s < 2; ++s) {
        for (std::uint32_t o = 0; o < norigin; ++o) {
            p.broadcasts.push_back({rst(o), target(s, o), f_reset[s]});
        }
    }
    return p;
}

Protocol pipeline(const CounterMachine& pos, const CounterMachine& neg) {
    Protocol a = cm_to_protocol(lower_to_n_bounded(pos));
    Protocol b = cm_to_protocol(lower_to_n_bounded(neg));
    // Lowering renames the input counters it rewrites; the composed interface
    // keeps the source machines' own input names, which must agree anyway.
    a.alphabet.assign(pos.counters.begin(), pos.counters.begin() + pos.input_arity);
    b.alphabet.assign(neg.counters.begin(), neg.counters.begin() + neg.input_arity);
    return compose_silent(a, b);
}

} // namespace bcp
