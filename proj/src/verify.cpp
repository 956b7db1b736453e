#include "bcp/verify.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "bcp/error.hpp"

namespace bcp {

ReachGraph build_graph(const Protocol& p, const Config& root, const VerifyOptions& options) {
    ReachGraph g;
    StepIndex index(p);
    std::unordered_map<Config, std::uint32_t, ConfigHash> seen;
    std::deque<std::uint32_t> queue;

    auto intern = [&](Config c) -> std::uint32_t {
        auto it = seen.find(c);
        if (it != seen.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(g.configs.size());
        if (id >= options.node_budget) {
            raise(ErrorCode::BudgetExceeded,
                  "configuration graph exceeded the node budget of " +
                      std::to_string(options.node_budget));
        }
        seen.emplace(c, id);
        g.configs.push_back(std::move(c));
        g.edges.emplace_back();
        queue.push_back(id);
        return id;
    };

    intern(root);
    while (!queue.empty()) {
        std::uint32_t u = queue.front();
        queue.pop_front();
        // The config vector may reallocate while interning successors; copy.
        Config current = g.configs[u];
        for (Step& s : index.enabled(current)) {
            std::uint32_t v = intern(std::move(s.successor));
            g.edges[u].push_back({s.trans_id, v});
        }
    }
    return g;
}

SccResult bottom_sccs(const ReachGraph& g) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.configs.size());
    const std::uint32_t none = 0xffffffffu;

    SccResult result;
    result.component.assign(n, none);

    std::vector<std::uint32_t> index(n, none), lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::uint32_t next_index = 0;

    // Iterative Tarjan: frames of (node, next edge position).
    std::vector<std::pair<std::uint32_t, std::uint32_t>> frames;
    for (std::uint32_t start = 0; start < n; ++start) {
        if (index[start] != none) continue;
        frames.push_back({start, 0});
        while (!frames.empty()) {
            auto& [u, pos] = frames.back();
            if (pos == 0) {
                index[u] = lowlink[u] = next_index++;
                stack.push_back(u);
                on_stack[u] = 1;
            }
            bool descended = false;
            while (pos < g.edges[u].size()) {
                std::uint32_t v = g.edges[u][pos].second;
                ++pos;
                if (index[v] == none) {
                    frames.push_back({v, 0});
                    descended = true;
                    break;
                }
                if (on_stack[v]) lowlink[u] = std::min(lowlink[u], index[v]);
            }
            if (descended) continue;
            if (lowlink[u] == index[u]) {
                std::uint32_t comp = result.component_count++;
                while (true) {
                    std::uint32_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    result.component[w] = comp;
                    if (w == u) break;
                }
            }
            std::uint32_t finished = u;
            frames.pop_back();
            if (!frames.empty()) {
                std::uint32_t parent = frames.back().first;
                lowlink[parent] = std::min(lowlink[parent], lowlink[finished]);
            }
        }
    }

    result.is_bottom.assign(result.component_count, 1);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (const auto& [t, v] : g.edges[u]) {
            if (result.component[u] != result.component[v]) {
                result.is_bottom[result.component[u]] = 0;
            }
        }
    }
    return result;
}

std::vector<TraceStep> witness_path(const ReachGraph& g, std::uint32_t target) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.configs.size());
    const std::uint32_t inf = 0xffffffffu;

    std::vector<std::uint32_t> dist(n, inf);
    dist[0] = 0;
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        std::uint32_t u = queue.front();
        queue.pop_front();
        for (const auto& [t, v] : g.edges[u]) {
            if (dist[v] == inf) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }

    std::vector<std::vector<std::uint32_t>> reverse(n);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (const auto& [t, v] : g.edges[u]) reverse[v].push_back(u);
    }
    std::vector<std::uint32_t> back(n, inf);
    back[target] = 0;
    queue.push_back(target);
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t u : reverse[v]) {
            if (back[u] == inf) {
                back[u] = back[v] + 1;
                queue.push_back(u);
            }
        }
    }

    std::vector<TraceStep> path;
    std::uint32_t total = dist[target];
    std::uint32_t u = 0;
    while (u != target) {
        // Edges are stored in ascending transition order, so the first edge
        // that stays on a shortest path gives the lexicographically least one.
        bool moved = false;
        for (const auto& [t, v] : g.edges[u]) {
            std::uint32_t step = static_cast<std::uint32_t>(path.size());
            if (dist[v] == step + 1 && back[v] != inf && step + 1 + back[v] == total) {
                path.push_back({t, g.configs[v]});
                u = v;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // unreachable target; empty tail
    }
    return path;
}

namespace {

struct Analysis {
    ReachGraph graph;
    SccResult scc;
    std::vector<std::uint32_t> comp_size;
    std::vector<std::optional<int>> node_consensus;
};

Analysis analyze(const Protocol& p, const std::vector<std::uint32_t>& input,
                 const VerifyOptions& options) {
    Analysis a;
    a.graph = build_graph(p, initial_configuration(p, input), options);
    a.scc = bottom_sccs(a.graph);
    a.comp_size.assign(a.scc.component_count, 0);
    for (std::uint32_t u = 0; u < a.graph.configs.size(); ++u) {
        a.comp_size[a.scc.component[u]] += 1;
    }
    a.node_consensus.reserve(a.graph.configs.size());
    for (const Config& c : a.graph.configs) a.node_consensus.push_back(classify_consensus(p, c));
    return a;
}

std::uint64_t count_bottoms(const Analysis& a) {
    std::uint64_t bottoms = 0;
    for (char b : a.scc.is_bottom) bottoms += b ? 1 : 0;
    return bottoms;
}

/// Fills the failure fields of `result` with the earliest-discovered node in
/// `offending` (deterministic) and a replayable shortest path to it.
void attach_witness(CheckResult& result, const Analysis& a,
                    const std::vector<std::uint32_t>& offending, const std::string& reason) {
    result.ok = false;
    result.reason = reason;
    std::uint32_t target = *std::min_element(offending.begin(), offending.end());
    result.witness_target = a.graph.configs[target];
    result.witness = witness_path(a.graph, target);
}

} // namespace

CheckResult check_computes(const Protocol& p, const std::vector<std::uint32_t>& input,
                           int expected, const VerifyOptions& options) {
    Analysis a = analyze(p, input, options);
    CheckResult result;
    result.nodes = a.graph.configs.size();
    result.bottom_count = count_bottoms(a);

    std::vector<std::uint32_t> offending;
    for (std::uint32_t u = 0; u < a.graph.configs.size(); ++u) {
        if (!a.scc.is_bottom[a.scc.component[u]]) continue;
        if (!(a.node_consensus[u].has_value() && *a.node_consensus[u] == expected)) {
            offending.push_back(u);
        }
    }
    if (offending.empty()) {
        result.ok = true;
        return result;
    }
    attach_witness(result, a, offending,
                   "a bottom SCC contains a configuration that is not " +
                       std::to_string(expected) + "-consensus");
    return result;
}

CheckResult check_silently_computes(const Protocol& p, const std::vector<std::uint32_t>& input,
                                    int expected, const VerifyOptions& options) {
    Analysis a = analyze(p, input, options);
    CheckResult result;
    result.nodes = a.graph.configs.size();
    result.bottom_count = count_bottoms(a);

    std::vector<std::uint32_t> offending;
    std::string reason;
    for (std::uint32_t u = 0; u < a.graph.configs.size(); ++u) {
        std::uint32_t comp = a.scc.component[u];
        if (!a.scc.is_bottom[comp]) continue;
        if (a.comp_size[comp] > 1) {
            offending.push_back(u);
            if (reason.empty()) reason = "a bottom SCC has more than one configuration (not silent)";
        } else if (!(a.node_consensus[u].has_value() && *a.node_consensus[u] == expected)) {
            offending.push_back(u);
            if (reason.empty()) {
                reason = "a terminal configuration is not " + std::to_string(expected) +
                         "-consensus";
            }
        }
    }
    if (offending.empty()) {
        result.ok = true;
        return result;
    }
    attach_witness(result, a, offending, reason);
    return result;
}

CheckResult check_semi_computes(const Protocol& p, const std::vector<std::uint32_t>& input,
                                int expected, const VerifyOptions& options) {
    if (expected == 1) {
        CheckResult result = check_silently_computes(p, input, 1, options);
        if (!result.ok) {
            result.reason = "expected every fair run to end in a terminal 1-consensus: " +
                            result.reason;
        }
        return result;
    }
    Analysis a = analyze(p, input, options);
    CheckResult result;
    result.nodes = a.graph.configs.size();
    result.bottom_count = count_bottoms(a);

    // A terminal configuration is exactly a singleton bottom SCC.
    std::vector<std::uint32_t> offending;
    for (std::uint32_t u = 0; u < a.graph.configs.size(); ++u) {
        std::uint32_t comp = a.scc.component[u];
        if (a.scc.is_bottom[comp] && a.comp_size[comp] == 1) offending.push_back(u);
    }
    if (offending.empty()) {
        result.ok = true;
        return result;
    }
    attach_witness(result, a, offending,
                   "a terminal configuration is reachable although the expected value is 0");
    return result;
}

DecideResult decide(const Protocol& p, const std::vector<std::uint32_t>& input,
                    const VerifyOptions& options) {
    Analysis a = analyze(p, input, options);
    DecideResult result;
    result.nodes = a.graph.configs.size();
    result.bottom_count = count_bottoms(a);

    bool all_one = true, all_zero = true;
    for (std::uint32_t u = 0; u < a.graph.configs.size(); ++u) {
        if (!a.scc.is_bottom[a.scc.component[u]]) continue;
        if (!(a.node_consensus[u].has_value() && *a.node_consensus[u] == 1)) all_one = false;
        if (!(a.node_consensus[u].has_value() && *a.node_consensus[u] == 0)) all_zero = false;
    }
    if (all_one && !all_zero) result.value = 1;
    else if (all_zero && !all_one) result.value = 0;
    return result;
}

} // namespace bcp
