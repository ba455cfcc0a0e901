#include "dani/simulate.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace dani {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct Attempt {
    double time;
    NodeId node;
    bool operator>(const Attempt& o) const {
        if (time != o.time) return time > o.time;
        return node > o.node;
    }
};

// One attempt at generating a cascade; returns < 2 entries when the seed
// failed to spread.
Cascade run_once(const Graph& g, const std::vector<std::vector<NodeId>>& adj,
                 const SimConfig& cfg, std::mt19937_64& rng) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.n - 1));
    std::exponential_distribution<double> delay(1.0 / cfg.delay_scale);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    NodeId seed = pick(rng);
    std::priority_queue<Attempt, std::vector<Attempt>, std::greater<>> frontier;
    frontier.push({0.0, seed});
    std::vector<bool> infected(g.n, false);

    Cascade c;
    std::size_t cap = cfg.max_cascade_size ? cfg.max_cascade_size : g.n;
    while (!frontier.empty() && c.entries.size() < cap) {
        auto [t, u] = frontier.top();
        frontier.pop();
        if (infected[u]) continue;  // an earlier attempt won
        infected[u] = true;
        c.entries.push_back({u, t});
        for (NodeId v : adj[u]) {
            if (infected[v]) continue;
            if (coin(rng) < cfg.infection_prob)
                frontier.push({t + delay(rng), v});
        }
    }
    return c;
}

}  // namespace

CascadeSet simulate(const Graph& g, const SimConfig& cfg) {
    if (g.n == 0) throw SimError("graph is empty");
    if (cfg.infection_prob <= 0.0 || cfg.infection_prob > 1.0)
        throw SimError("infection_prob must be in (0,1]");
    if (cfg.delay_scale <= 0.0) throw SimError("delay_scale must be positive");

    auto adj = g.adjacency();
    CascadeSet cs;
    cs.cascades.reserve(cfg.cascade_count);
    for (std::size_t i = 0; i < cfg.cascade_count; ++i) {
        Cascade c;
        bool ok = false;
        for (std::size_t attempt = 0; attempt < cfg.retry_cap; ++attempt) {
            std::mt19937_64 rng(mix(cfg.rng_seed, mix(i, attempt)));
            c = run_once(g, adj, cfg, rng);
            if (c.entries.size() >= 2) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw SimError("retry cap exhausted at cascade " + std::to_string(i) +
                           ": graph too sparse for parameters");
        cs.cascades.push_back(std::move(c));
    }
    rebuild_node_universe(cs);
    return cs;
}

std::vector<CascadeSet> simulate_batch(const Graph& g, const SimConfig& cfg,
                                       const std::vector<std::size_t>& counts) {
    std::vector<CascadeSet> out;
    out.reserve(counts.size());
    for (std::size_t count : counts) {
        SimConfig c = cfg;
        c.cascade_count = count;
        out.push_back(simulate(g, c));  // substreams make prefixes consistent
    }
    return out;
}

}  // namespace dani
