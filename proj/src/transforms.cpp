#include "bcp/transforms.hpp"

#include <array>
#include <numeric>
#include <string>

#include "bcp/error.hpp"
#include "bcp/oracle.hpp"

namespace bcp {

namespace {

StateId fresh_state(Protocol& p, std::string name, bool output_bit) {
    while (p.find_state(name)) name += "'";
    return p.add_state(name, output_bit);
}

/// After adding states to a copied protocol, stretch every stored transfer
/// to cover them; the new states map to themselves.
void extend_transfers(Protocol& p) {
    for (auto& images : p.transfers) {
        for (StateId q = static_cast<StateId>(images.size()); q < p.states.size(); ++q) {
            images.push_back(q);
        }
    }
}

std::string input_to_string(const std::vector<std::uint32_t>& in) {
    std::string s = "(";
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(in[i]);
    }
    return s + ")";
}

std::vector<std::string> probe_silence(const Protocol& p) {
    std::vector<std::string> warnings;
    std::uint32_t arity = static_cast<std::uint32_t>(p.alphabet.size());
    for (const auto& in : inputs_with_sum(arity, 0, 4)) {
        Config root;
        try {
            root = initial_configuration(p, in);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::PopulationTooSmall) continue;
            throw;
        }
        if (root.size() > 4) continue;
        try {
            ReachGraph g = build_graph(p, root, VerifyOptions{50'000});
            SccResult scc = bottom_sccs(g);
            std::vector<std::uint64_t> comp_size(scc.component_count, 0);
            for (std::uint32_t c : scc.component) comp_size[c] += 1;
            for (std::uint32_t c = 0; c < scc.component_count; ++c) {
                if (scc.is_bottom[c] && comp_size[c] > 1) {
                    warnings.push_back("source protocol is not silent on input " +
                                       input_to_string(in) +
                                       "; the rebuilt protocol may compute something else");
                    return warnings;
                }
            }
            // A terminal configuration that still enables a broadcast (as a
            // self-loop) would make the rebuilt protocol freeze and reset
            // forever instead of settling, so flag it too.
            for (std::size_t node = 0; node < g.configs.size(); ++node) {
                if (comp_size[scc.component[node]] > 1 ||
                    !scc.is_bottom[scc.component[node]]) {
                    continue;
                }
                for (const Step& st : enabled_steps(p, g.configs[node])) {
                    if (st.trans_id >= p.rendezvous.size()) {
                        warnings.push_back(
                            "source protocol keeps a broadcast enabled at a terminal "
                            "configuration on input " +
                            input_to_string(in) + "; the rebuilt protocol will never settle");
                        return warnings;
                    }
                }
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BudgetExceeded) {
                warnings.push_back("silence probe ran out of budget; silentness unverified");
                return warnings;
            }
            throw;
        }
    }
    return warnings;
}

} // namespace

Protocol to_leaderless(const Protocol& p, const std::string& symbol) {
    Protocol out = p;
    out.name = p.name + "-leaderless";
    if (p.leaders.empty()) {
        out.notes.push_back("no leaders to fold; protocol unchanged");
        return out;
    }
    if (p.alphabet.empty()) {
        raise(ErrorCode::ArityMismatch,
              "cannot fold leaders into a population with no input symbols");
    }
    std::uint32_t star = 0;
    if (!symbol.empty()) {
        bool found = false;
        for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) {
            if (p.alphabet[a] == symbol) {
                star = a;
                found = true;
                break;
            }
        }
        if (!found) raise(ErrorCode::UnknownName, "unknown input symbol '" + symbol + "'");
    }
    std::vector<StateId> lead;
    for (const auto& [q, k] : p.leaders.entries()) lead.insert(lead.end(), k, q);
    std::uint32_t k = static_cast<std::uint32_t>(lead.size());

    // Agents wait in staging states until one symbol-star agent elects
    // itself; its broadcast releases the others into their usual inputs.
    std::vector<StateId> pre(p.alphabet.size());
    for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) {
        pre[a] = fresh_state(out, "(pre," + p.alphabet[a] + ")",
                             p.output[p.input_map[a]] != 0);
    }
    if (k == 1) {
        extend_transfers(out);
        std::vector<StateId> images(out.states.size());
        std::iota(images.begin(), images.end(), 0);
        for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) images[pre[a]] = p.input_map[a];
        out.broadcasts.push_back({pre[star], lead[0], out.intern_transfer(std::move(images))});
    } else {
        // With several leaders the elected agent recruits the rest one by
        // one from gated symbol-star agents, then releases everyone.
        std::vector<StateId> gate(p.alphabet.size());
        for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) {
            gate[a] = fresh_state(out, "(gate," + p.alphabet[a] + ")",
                                  p.output[p.input_map[a]] != 0);
        }
        std::vector<StateId> rec(k + 1), park(k);
        for (std::uint32_t j = 1; j <= k; ++j) {
            rec[j] = fresh_state(out, "(rec," + std::to_string(j) + ")", p.output[lead[0]] != 0);
        }
        for (std::uint32_t j = 1; j < k; ++j) {
            park[j] = fresh_state(out, "(park," + std::to_string(j) + ")", p.output[lead[j]] != 0);
        }
        extend_transfers(out);
        std::vector<StateId> gating(out.states.size());
        std::iota(gating.begin(), gating.end(), 0);
        for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) gating[pre[a]] = gate[a];
        out.broadcasts.push_back({pre[star], rec[1], out.intern_transfer(std::move(gating))});
        for (std::uint32_t j = 1; j < k; ++j) {
            out.rendezvous.push_back({rec[j], gate[star], rec[j + 1], park[j]});
        }
        std::vector<StateId> go(out.states.size());
        std::iota(go.begin(), go.end(), 0);
        for (std::uint32_t j = 1; j < k; ++j) go[park[j]] = lead[j];
        for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) go[gate[a]] = p.input_map[a];
        out.broadcasts.push_back({rec[k], lead[0], out.intern_transfer(std::move(go))});
    }
    for (std::uint32_t a = 0; a < p.alphabet.size(); ++a) out.input_map[a] = pre[a];
    out.leaders = Config{};
    out.notes.push_back("computes the source predicate of the input minus " + std::to_string(k) +
                        " agents of '" + p.alphabet[star] + "'");
    out.notes.push_back("needs at least " + std::to_string(k) + " agents of '" +
                        p.alphabet[star] + "'");
    return out;
}

Protocol to_single_broadcaster(const Protocol& p) {
    Protocol out = p;
    out.name = p.name + "-single-broadcaster";
    std::uint32_t nb = static_cast<std::uint32_t>(p.broadcasts.size());
    std::uint32_t old_count = static_cast<std::uint32_t>(p.states.size());

    // One extra leader mirrors some present agent's opinion and carries out
    // broadcasts on behalf of their senders, one at a time.
    std::array<StateId, 2> bl = {fresh_state(out, "(bl,0)", false),
                                 fresh_state(out, "(bl,1)", true)};
    std::vector<std::array<StateId, 2>> pend(nb);
    std::vector<StateId> aux(nb);
    for (std::uint32_t t = 0; t < nb; ++t) {
        for (std::uint32_t b = 0; b < 2; ++b) {
            pend[t][b] = fresh_state(out, "(bl,t" + std::to_string(t) + "," + std::to_string(b) + ")",
                                     b == 1);
        }
        aux[t] = fresh_state(out, "(baux,t" + std::to_string(t) + ")",
                             p.output[p.broadcasts[t].post] != 0);
    }
    extend_transfers(out);

    for (std::uint32_t t = 0; t < nb; ++t) {
        for (std::uint32_t b = 0; b < 2; ++b) {
            out.rendezvous.push_back({p.broadcasts[t].pre, bl[b], aux[t], pend[t][b]});
        }
    }
    for (StateId q = 0; q < old_count; ++q) {
        for (std::uint32_t b = 0; b < 2; ++b) {
            bool opinion = p.output[q] != 0;
            if (opinion != (b == 1)) {
                out.rendezvous.push_back({q, bl[b], q, bl[opinion ? 1 : 0]});
            }
        }
    }
    out.broadcasts.clear();
    for (std::uint32_t t = 0; t < nb; ++t) {
        std::vector<StateId> images = out.transfers[p.broadcasts[t].transfer];
        images[aux[t]] = p.broadcasts[t].post;
        std::uint32_t f = out.intern_transfer(std::move(images));
        for (std::uint32_t b = 0; b < 2; ++b) {
            out.broadcasts.push_back({pend[t][b], bl[b], f});
        }
    }
    out.leaders = out.leaders.add(bl[0], 1);
    out.notes.push_back("call with the source input vector; one extra leader joins the population");
    return out;
}

Protocol to_single_signal(const Protocol& p, std::vector<std::string>* warnings) {
    std::vector<std::string> warn = probe_silence(p);
    if (warnings) *warnings = warn;

    std::uint32_t nq = static_cast<StateId>(p.states.size());
    std::uint32_t nb = static_cast<std::uint32_t>(p.broadcasts.size());
    std::uint64_t nqq = static_cast<std::uint64_t>(nq) * nq;
    if (nqq * (nb + 4) > 4'000'000) {
        raise(ErrorCode::BudgetExceeded,
              "the rebuilt protocol would have " + std::to_string(nqq * (nb + 4)) + " states");
    }

    Protocol out;
    out.name = p.name + "-single-signal";
    // A state is (position, origin) plus an optional flag: a pending
    // broadcast, frozen, err, or reset. Outputs follow the position.
    auto plain = [&](StateId q, StateId r) { return q * nq + r; };
    auto tstate = [&](std::uint32_t t, StateId q, StateId r) {
        return static_cast<StateId>(nqq * (1 + t)) + q * nq + r;
    };
    auto frozen = [&](StateId q, StateId r) {
        return static_cast<StateId>(nqq * (1 + nb)) + q * nq + r;
    };
    auto errst = [&](StateId q, StateId r) {
        return static_cast<StateId>(nqq * (2 + nb)) + q * nq + r;
    };
    auto reset = [&](StateId q, StateId r) {
        return static_cast<StateId>(nqq * (3 + nb)) + q * nq + r;
    };

    auto add_block = [&](const std::string& suffix) {
        for (StateId q = 0; q < nq; ++q) {
            for (StateId r = 0; r < nq; ++r) {
                out.add_state("(" + p.states[q] + "|" + p.states[r] + suffix + ")",
                              p.output[q] != 0);
            }
        }
    };
    add_block("");
    for (std::uint32_t t = 0; t < nb; ++t) add_block("|t" + std::to_string(t));
    add_block("|frozen");
    add_block("|err");
    add_block("|reset");

    out.alphabet = p.alphabet;
    for (StateId tgt : p.input_map) out.input_map.push_back(plain(tgt, tgt));
    {
        std::vector<std::pair<StateId, std::uint32_t>> entries;
        for (const auto& [q, cnt] : p.leaders.entries()) entries.push_back({plain(q, q), cnt});
        out.leaders = Config::from_entries(entries);
    }

    // The one signal: freeze the unflagged, flag everyone else as err.
    std::vector<StateId> freeze(out.states.size());
    for (StateId q = 0; q < nq; ++q) {
        for (StateId r = 0; r < nq; ++r) {
            freeze[plain(q, r)] = frozen(q, r);
            for (std::uint32_t t = 0; t < nb; ++t) freeze[tstate(t, q, r)] = errst(q, r);
            freeze[frozen(q, r)] = errst(q, r);
            freeze[errst(q, r)] = errst(q, r);
            freeze[reset(q, r)] = errst(q, r);
        }
    }
    std::uint32_t f_freeze = out.intern_transfer(std::move(freeze));

    StateId total = static_cast<StateId>(out.states.size());
    for (const RendezVous& rv : p.rendezvous) {
        for (StateId r1 = 0; r1 < nq; ++r1) {
            for (StateId r2 = 0; r2 < nq; ++r2) {
                out.rendezvous.push_back({plain(rv.p, r1), plain(rv.q, r2), plain(rv.p2, r1),
                                          plain(rv.q2, r2)});
            }
        }
    }
    // The broadcasting agent walks the original transfer over each frozen
    // agent by rendez-vous, then stands down next to any unfrozen one.
    for (std::uint32_t t = 0; t < nb; ++t) {
        const Broadcast& b = p.broadcasts[t];
        const std::vector<StateId>& g = p.transfers[b.transfer];
        for (StateId r1 = 0; r1 < nq; ++r1) {
            for (StateId q2 = 0; q2 < nq; ++q2) {
                for (StateId r2 = 0; r2 < nq; ++r2) {
                    out.rendezvous.push_back({tstate(t, b.post, r1), frozen(q2, r2),
                                              tstate(t, b.post, r1), plain(g[q2], r2)});
                }
            }
        }
    }
    for (std::uint32_t t = 0; t < nb; ++t) {
        const Broadcast& b = p.broadcasts[t];
        for (StateId r1 = 0; r1 < nq; ++r1) {
            for (StateId q2 = 0; q2 < nq; ++q2) {
                for (StateId r2 = 0; r2 < nq; ++r2) {
                    out.rendezvous.push_back({tstate(t, b.post, r1), plain(q2, r2),
                                              plain(b.post, r1), plain(q2, r2)});
                }
            }
        }
    }
    // A reset agent returns every flagged agent to its origin, may unflag
    // itself next to anyone, and frozen agents may give up waiting.
    for (StateId a = 0; a < nq; ++a) {
        for (StateId b = 0; b < nq; ++b) {
            for (StateId s = static_cast<StateId>(nqq); s < total; ++s) {
                StateId r = (s % static_cast<StateId>(nqq)) % nq;
                out.rendezvous.push_back({reset(a, b), s, reset(a, b), plain(r, r)});
            }
        }
    }
    for (StateId a = 0; a < nq; ++a) {
        for (StateId b = 0; b < nq; ++b) {
            for (StateId s = 0; s < total; ++s) {
                out.rendezvous.push_back({reset(a, b), s, plain(a, b), s});
            }
        }
    }
    for (StateId a = 0; a < nq; ++a) {
        for (StateId b = 0; b < nq; ++b) {
            for (StateId s = 0; s < total; ++s) {
                out.rendezvous.push_back({frozen(a, b), s, errst(a, b), s});
            }
        }
    }

    for (std::uint32_t t = 0; t < nb; ++t) {
        const Broadcast& b = p.broadcasts[t];
        for (StateId r = 0; r < nq; ++r) {
            out.broadcasts.push_back({plain(b.pre, r), tstate(t, b.post, r), f_freeze});
        }
    }
    for (StateId q = 0; q < nq; ++q) {
        for (StateId r = 0; r < nq; ++r) {
            out.broadcasts.push_back({errst(q, r), reset(r, r), f_freeze});
        }
    }

    out.notes.push_back("every broadcast sends the one shared freeze signal");
    if (!p.leaders.empty()) {
        out.notes.push_back("leaders start paired with their own origin");
    }
    for (const std::string& w : warn) out.notes.push_back("warning: " + w);
    return out;
}

ResetReport check_reset_protocol(const Protocol& p,
                                 const std::vector<std::vector<std::uint32_t>>& inputs,
                                 const VerifyOptions& options) {
    ResetReport report;
    std::uint32_t nrv = static_cast<std::uint32_t>(p.rendezvous.size());
    for (const auto& input : inputs) {
        Config root = initial_configuration(p, input);
        ReachGraph g = build_graph(p, root, options);
        report.nodes += g.configs.size();
        bool failed = false;
        for (std::uint32_t u = 0; u < g.configs.size() && !failed; ++u) {
            for (const auto& [t, v] : g.edges[u]) {
                if (t >= nrv && v != 0) {
                    report.violations.push_back(
                        {input, g.configs[u], t, g.configs[v], witness_path(g, u)});
                    report.ok = false;
                    failed = true;
                    break;
                }
            }
        }
    }
    return report;
}

} // namespace bcp
