#include "dani/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace dani {

namespace {

std::uint64_t edge_key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

bool Graph::has_edge(NodeId u, NodeId v) const {
    if (!directed && u > v) std::swap(u, v);
    return std::find(edges.begin(), edges.end(), std::make_pair(u, v)) != edges.end();
}

void Graph::add_edge(NodeId u, NodeId v) {
    if (u == v) throw GraphParseError("self-loop on node " + std::to_string(u));
    if (!directed && u > v) std::swap(u, v);
    edges.emplace_back(u, v);
}

std::vector<std::vector<NodeId>> Graph::adjacency() const {
    std::vector<std::vector<NodeId>> adj(n);
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        if (!directed) adj[v].push_back(u);
    }
    return adj;
}

std::vector<std::vector<NodeId>> Graph::undirected_adjacency() const {
    std::vector<std::vector<NodeId>> adj(n);
    std::unordered_set<std::uint64_t> seen;
    for (auto [u, v] : edges) {
        if (u > v) std::swap(u, v);
        if (!seen.insert(edge_key(u, v)).second) continue;
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

std::size_t CommunityPartition::community_count() const {
    std::set<std::uint32_t> ids;
    for (const auto& [node, c] : assignment) ids.insert(c);
    return ids.size();
}

namespace {

// Truncated discrete power law p(x) ~ x^-exponent on [lo, hi].
std::size_t sample_power_law(std::size_t lo, std::size_t hi, double exponent,
                             std::mt19937_64& rng) {
    if (lo >= hi) return lo;
    std::vector<double> weights;
    weights.reserve(hi - lo + 1);
    for (std::size_t x = lo; x <= hi; ++x)
        weights.push_back(std::pow(static_cast<double>(x), -exponent));
    std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
    return lo + dist(rng);
}

std::vector<std::size_t> draw_community_sizes(const GenConfig& cfg,
                                              std::mt19937_64& rng) {
    if (!cfg.community_sizes.empty()) {
        std::size_t total = std::accumulate(cfg.community_sizes.begin(),
                                            cfg.community_sizes.end(), std::size_t{0});
        if (total != cfg.n)
            throw GenError("community sizes sum to " + std::to_string(total) +
                           ", expected n=" + std::to_string(cfg.n));
        return cfg.community_sizes;
    }
    if (cfg.min_community == 0 || cfg.max_community < cfg.min_community)
        throw GenError("need explicit community sizes or valid minC/maxC");
    std::vector<std::size_t> sizes;
    std::size_t assigned = 0;
    while (assigned < cfg.n) {
        std::size_t remaining = cfg.n - assigned;
        if (remaining <= cfg.max_community && remaining >= cfg.min_community) {
            // Close out exactly with probability proportional to fit; always
            // close when nothing larger could follow.
            if (remaining < 2 * cfg.min_community) {
                sizes.push_back(remaining);
                break;
            }
        }
        std::size_t s = sample_power_law(cfg.min_community, cfg.max_community,
                                         cfg.size_exponent, rng);
        if (s > remaining) s = remaining;
        if (remaining - s != 0 && remaining - s < cfg.min_community) {
            // Fold the remainder into this community, capped at maxC.
            s = std::min(remaining, cfg.max_community);
            if (remaining - s != 0 && remaining - s < cfg.min_community)
                s = remaining;  // overshoot maxC rather than strand nodes
        }
        sizes.push_back(s);
        assigned += s;
    }
    return sizes;
}

}  // namespace

std::pair<Graph, CommunityPartition> planted_partition(const GenConfig& cfg) {
    if (cfg.n == 0) throw GenError("n must be positive");
    if (cfg.mu < 0.0 || cfg.mu > 1.0) throw GenError("mu must be in [0,1]");
    if (cfg.avg_degree <= 0.0) throw GenError("avg_degree must be positive");
    std::size_t max_degree = cfg.max_degree ? cfg.max_degree
                                            : static_cast<std::size_t>(2 * cfg.avg_degree);

    std::mt19937_64 rng(cfg.rng_seed);
    auto sizes = draw_community_sizes(cfg, rng);

    CommunityPartition part;
    std::vector<std::uint32_t> community(cfg.n);
    std::vector<std::vector<NodeId>> members(sizes.size());
    {
        NodeId node = 0;
        for (std::uint32_t c = 0; c < sizes.size(); ++c)
            for (std::size_t i = 0; i < sizes[c]; ++i, ++node) {
                community[node] = c;
                members[c].push_back(node);
                part.assignment[node] = c;
            }
    }

    // Degrees from a truncated power law whose lower cutoff is tuned so the
    // mean lands near avg_degree.
    std::size_t deg_hi = max_degree;
    std::size_t deg_lo = 1;
    {
        auto mean_for = [&](std::size_t lo) {
            double wsum = 0.0, xsum = 0.0;
            for (std::size_t x = lo; x <= deg_hi; ++x) {
                double w = std::pow(static_cast<double>(x), -cfg.degree_exponent);
                wsum += w;
                xsum += w * static_cast<double>(x);
            }
            return xsum / wsum;
        };
        while (deg_lo < deg_hi && mean_for(deg_lo) < cfg.avg_degree) ++deg_lo;
        if (deg_lo > 1 && mean_for(deg_lo) > cfg.avg_degree) --deg_lo;
    }

    // Config-level feasibility: the average intra-degree must fit inside the
    // smallest community.
    {
        std::size_t min_size = *std::min_element(sizes.begin(), sizes.end());
        std::size_t avg_intra = static_cast<std::size_t>(
            std::lround((1.0 - cfg.mu) * cfg.avg_degree));
        if (avg_intra >= min_size)
            throw GenError("community of size " + std::to_string(min_size) +
                           " too small for intra-degree " +
                           std::to_string(avg_intra));
    }

    std::vector<std::size_t> degree(cfg.n);
    for (NodeId u = 0; u < cfg.n; ++u) {
        degree[u] = sample_power_law(deg_lo, deg_hi, cfg.degree_exponent, rng);
        // Clamp so the node's intra stubs fit inside its community.
        std::size_t size = sizes[community[u]];
        double limit = cfg.mu < 1.0
                           ? static_cast<double>(size - 1) / (1.0 - cfg.mu)
                           : static_cast<double>(deg_hi);
        degree[u] = std::min(degree[u], static_cast<std::size_t>(limit));
    }

    Graph g;
    g.n = cfg.n;
    g.directed = false;
    std::unordered_set<std::uint64_t> edge_set;
    std::vector<std::size_t> realized(cfg.n, 0);

    auto try_add = [&](NodeId a, NodeId b) {
        if (a == b) return false;
        NodeId lo = std::min(a, b), hi = std::max(a, b);
        if (realized[a] >= max_degree || realized[b] >= max_degree) return false;
        if (!edge_set.insert(edge_key(lo, hi)).second) return false;
        g.edges.emplace_back(lo, hi);
        ++realized[a];
        ++realized[b];
        return true;
    };

    // Intra-community stubs matched within each community.
    for (std::uint32_t c = 0; c < sizes.size(); ++c) {
        std::vector<NodeId> stubs;
        for (NodeId u : members[c]) {
            std::size_t intra = static_cast<std::size_t>(
                std::lround((1.0 - cfg.mu) * static_cast<double>(degree[u])));
            stubs.insert(stubs.end(), intra, u);
        }
        std::shuffle(stubs.begin(), stubs.end(), rng);
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
            try_add(stubs[i], stubs[i + 1]);  // failed pairs dropped
    }

    // Inter-community stubs matched globally; pairs inside one community
    // are rejected and retried a bounded number of times.
    {
        std::vector<NodeId> stubs;
        for (NodeId u = 0; u < cfg.n; ++u) {
            std::size_t intra = static_cast<std::size_t>(
                std::lround((1.0 - cfg.mu) * static_cast<double>(degree[u])));
            std::size_t inter = degree[u] - std::min(degree[u], intra);
            stubs.insert(stubs.end(), inter, u);
        }
        std::shuffle(stubs.begin(), stubs.end(), rng);
        for (int pass = 0; pass < 20 && stubs.size() >= 2; ++pass) {
            std::vector<NodeId> leftover;
            for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
                NodeId a = stubs[i], b = stubs[i + 1];
                if (community[a] == community[b] || !try_add(a, b)) {
                    leftover.push_back(a);
                    leftover.push_back(b);
                }
            }
            if (stubs.size() % 2) leftover.push_back(stubs.back());
            stubs = std::move(leftover);
            std::shuffle(stubs.begin(), stubs.end(), rng);
        }
    }

    std::sort(g.edges.begin(), g.edges.end());
    return {std::move(g), std::move(part)};
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphParseError("cannot open " + path);
    Graph g;
    g.directed = false;
    std::set<std::pair<NodeId, NodeId>> seen;
    NodeId max_node = 0;
    bool any = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            if (line.find("directed") != std::string::npos) g.directed = true;
            continue;
        }
        std::stringstream ss(line);
        NodeId u, v;
        if (!(ss >> u >> v))
            throw GraphParseError("line " + std::to_string(line_no) +
                                  ": expected 'u<TAB>v'");
        if (u == v)
            throw GraphParseError("line " + std::to_string(line_no) +
                                  ": self-loop on node " + std::to_string(u));
        if (!g.directed && u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second) continue;
        g.edges.emplace_back(u, v);
        max_node = std::max({max_node, u, v});
        any = true;
    }
    g.n = any ? max_node + 1 : 0;
    return g;
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw GraphParseError("cannot open " + path + " for writing");
    if (g.directed) out << "# directed\n";
    for (const auto& [u, v] : g.edges) out << u << "\t" << v << "\n";
}

CommunityPartition load_partition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphParseError("cannot open " + path);
    CommunityPartition p;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        NodeId node;
        std::uint32_t comm;
        if (!(ss >> node >> comm))
            throw GraphParseError("line " + std::to_string(line_no) +
                                  ": expected 'node<TAB>community'");
        if (!p.assignment.emplace(node, comm).second)
            throw GraphParseError("line " + std::to_string(line_no) + ": node " +
                                  std::to_string(node) + " assigned twice");
    }
    return p;
}

void save_partition(const CommunityPartition& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw GraphParseError("cannot open " + path + " for writing");
    for (const auto& [node, comm] : p.assignment) out << node << "\t" << comm << "\n";
}

bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    auto adj = g.undirected_adjacency();
    std::vector<bool> seen(g.n, false);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = true;
    std::size_t visited = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                ++visited;
                q.push(v);
            }
    }
    return visited == g.n;
}

double realized_mixing(const Graph& g, const CommunityPartition& p) {
    std::vector<double> inter(g.n, 0.0), total(g.n, 0.0);
    for (auto [u, v] : g.edges) {
        bool cross = p.assignment.at(u) != p.assignment.at(v);
        total[u] += 1;
        total[v] += 1;
        if (cross) {
            inter[u] += 1;
            inter[v] += 1;
        }
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t u = 0; u < g.n; ++u)
        if (total[u] > 0) {
            sum += inter[u] / total[u];
            ++count;
        }
    return count ? sum / count : 0.0;
}

}  // namespace dani
