#include "dani/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace dani {

namespace {

std::set<std::pair<NodeId, NodeId>> edge_set(const Graph& g) {
    std::set<std::pair<NodeId, NodeId>> s;
    for (auto [u, v] : g.edges) {
        if (!g.directed && u > v) std::swap(u, v);
        s.insert({u, v});
    }
    return s;
}

std::set<std::pair<NodeId, NodeId>> inferred_edge_set(const InferredGraph& ig,
                                                      bool canonical) {
    std::set<std::pair<NodeId, NodeId>> s;
    for (const auto& e : ig.edges) {
        NodeId u = e.u, v = e.v;
        if (canonical && u > v) std::swap(u, v);
        s.insert({u, v});
    }
    return s;
}

// community id -> sorted member list
std::map<std::uint32_t, std::vector<NodeId>> groups_of(const CommunityPartition& p) {
    std::map<std::uint32_t, std::vector<NodeId>> groups;
    for (const auto& [node, c] : p.assignment) groups[c].push_back(node);
    return groups;
}

std::size_t pair_count(const std::map<std::uint32_t, std::vector<NodeId>>& groups) {
    std::size_t total = 0;
    for (const auto& [c, members] : groups)
        total += members.size() * (members.size() - 1) / 2;
    return total;
}

}  // namespace

EdgeReport edge_metrics(const Graph& truth, const InferredGraph& inferred) {
    EdgeReport r;
    auto te = edge_set(truth);
    auto ie = inferred_edge_set(inferred, !truth.directed);
    r.true_edge_count = te.size();
    r.inferred_edge_count = ie.size();
    for (const auto& e : ie)
        if (te.count(e)) ++r.hit_count;
    r.precision = ie.empty() ? 0.0 : static_cast<double>(r.hit_count) / ie.size();
    r.recall = te.empty() ? 0.0 : static_cast<double>(r.hit_count) / te.size();
    r.f_measure = (r.precision + r.recall) > 0.0
                      ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                      : 0.0;
    return r;
}

namespace {

std::vector<double> local_clustering(const Graph& g) {
    auto adj = g.undirected_adjacency();
    std::vector<std::unordered_set<NodeId>> nbr(g.n);
    for (NodeId u = 0; u < g.n; ++u) nbr[u] = {adj[u].begin(), adj[u].end()};
    std::vector<double> cc(g.n, 0.0);
    for (NodeId u = 0; u < g.n; ++u) {
        std::size_t d = adj[u].size();
        if (d < 2) continue;
        std::size_t links = 0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (nbr[adj[u][i]].count(adj[u][j])) ++links;
        cc[u] = 2.0 * static_cast<double>(links) / (static_cast<double>(d) * (d - 1));
    }
    return cc;
}

}  // namespace

StructureReport structure_metrics(const Graph& truth, const InferredGraph& inferred) {
    StructureReport r;
    Graph ig = to_graph(inferred, truth.n);

    std::vector<std::size_t> deg_t(truth.n, 0), deg_i(truth.n, 0);
    for (auto [u, v] : truth.edges) {
        ++deg_t[u];
        ++deg_t[v];
    }
    for (auto [u, v] : ig.edges) {
        ++deg_i[u];
        ++deg_i[v];
    }

    std::size_t active = 0, recovered = 0;
    for (NodeId u = 0; u < truth.n; ++u)
        if (deg_t[u] > 0) {
            ++active;
            if (deg_i[u] > 0) ++recovered;
        }
    r.node_recovery = active ? static_cast<double>(recovered) / active : 0.0;

    auto cc_t = local_clustering(truth);
    auto cc_i = local_clustering(ig);
    double deg_err = 0.0, cc_err = 0.0;
    std::size_t n_active = 0;
    for (NodeId u = 0; u < truth.n; ++u) {
        if (deg_t[u] == 0) continue;
        ++n_active;
        // denominator guarded with max(x_true, 1)
        deg_err += std::abs(static_cast<double>(deg_t[u]) - static_cast<double>(deg_i[u])) /
                   std::max<double>(static_cast<double>(deg_t[u]), 1.0);
        cc_err += std::abs(cc_t[u] - cc_i[u]) / std::max(cc_t[u], 1.0);
    }
    r.degree_rel_err = n_active ? deg_err / n_active : 0.0;
    r.clustering_rel_err = n_active ? cc_err / n_active : 0.0;
    return r;
}

double nmi(const CommunityPartition& a, const CommunityPartition& b) {
    // Confusion matrix over shared nodes.
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> n_ij;
    std::map<std::uint32_t, double> n_i, n_j;
    double total = 0.0;
    for (const auto& [node, ca] : a.assignment) {
        auto it = b.assignment.find(node);
        if (it == b.assignment.end()) continue;
        n_ij[{ca, it->second}] += 1.0;
        n_i[ca] += 1.0;
        n_j[it->second] += 1.0;
        total += 1.0;
    }
    if (total == 0.0) return 0.0;

    if (n_i.size() == 1 && n_j.size() == 1) {
        // Degenerate case: both denominators vanish. Identical partitions
        // score 1 by the limit, anything else 0.
        return 1.0;
    }

    double num = 0.0;
    for (const auto& [ij, nij] : n_ij) {
        double expected = n_i[ij.first] * n_j[ij.second] / total;
        if (nij > 0.0 && expected > 0.0) num += nij * std::log(nij * total /
                                                              (n_i[ij.first] * n_j[ij.second]));
    }
    num *= -2.0;
    double den = 0.0;
    for (const auto& [i, ni] : n_i) den += ni * std::log(ni / total);
    for (const auto& [j, nj] : n_j) den += nj * std::log(nj / total);
    if (den == 0.0) return 1.0;
    return num / den;
}

double pwf(const CommunityPartition& a, const CommunityPartition& b) {
    auto ga = groups_of(a);
    auto gb = groups_of(b);
    std::size_t ha = pair_count(ga);
    std::size_t hb = pair_count(gb);
    if (ha == 0 || hb == 0) return 0.0;

    // Common pairs: iterate the smaller side's groups, count pairs whose
    // endpoints share a community on the other side.
    std::unordered_map<NodeId, std::uint32_t> bmap(b.assignment.begin(),
                                                   b.assignment.end());
    std::size_t common = 0;
    for (const auto& [c, members] : ga)
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                auto bi = bmap.find(members[i]);
                auto bj = bmap.find(members[j]);
                if (bi != bmap.end() && bj != bmap.end() && bi->second == bj->second)
                    ++common;
            }

    double precision = static_cast<double>(common) / static_cast<double>(hb);
    double recall = static_cast<double>(common) / static_cast<double>(ha);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double density(const std::vector<NodeId>& members, const Graph& g) {
    if (members.size() < 2) return 0.0;
    std::unordered_set<NodeId> in_s(members.begin(), members.end());
    std::size_t internal = 0;
    std::unordered_set<std::uint64_t> seen;
    for (auto [u, v] : g.edges) {
        NodeId lo = std::min(u, v), hi = std::max(u, v);
        if (!seen.insert((static_cast<std::uint64_t>(lo) << 32) | hi).second) continue;
        if (in_s.count(u) && in_s.count(v)) ++internal;
    }
    double possible = static_cast<double>(members.size()) * (members.size() - 1) / 2.0;
    return static_cast<double>(internal) / possible;
}

double conductance(const std::vector<NodeId>& members, const Graph& g) {
    std::unordered_set<NodeId> in_s(members.begin(), members.end());
    std::size_t internal = 0, boundary = 0;
    std::unordered_set<std::uint64_t> seen;
    for (auto [u, v] : g.edges) {
        NodeId lo = std::min(u, v), hi = std::max(u, v);
        if (!seen.insert((static_cast<std::uint64_t>(lo) << 32) | hi).second) continue;
        bool su = in_s.count(u) > 0, sv = in_s.count(v) > 0;
        if (su && sv)
            ++internal;
        else if (su || sv)
            ++boundary;
    }
    double den = 2.0 * static_cast<double>(internal) + static_cast<double>(boundary);
    if (den == 0.0) return 0.0;
    return static_cast<double>(boundary) / den;
}

double nc(const CommunityPartition& truth, const CommunityPartition& inferred) {
    double ct = static_cast<double>(truth.community_count());
    if (ct == 0.0) throw std::invalid_argument("truth partition has no communities");
    double ci = static_cast<double>(inferred.community_count());
    return std::abs(ct - ci) / ct;
}

CommunityPartition label_propagation(const Graph& g, std::uint64_t rng_seed) {
    std::vector<std::uint32_t> label(g.n);
    for (NodeId u = 0; u < g.n; ++u) label[u] = u;
    auto adj = g.undirected_adjacency();

    std::mt19937_64 rng(rng_seed);
    std::vector<NodeId> order(g.n);
    for (NodeId u = 0; u < g.n; ++u) order[u] = u;

    for (int round = 0; round < 100; ++round) {
        std::shuffle(order.begin(), order.end(), rng);
        bool changed = false;
        for (NodeId u : order) {
            if (adj[u].empty()) continue;
            std::map<std::uint32_t, std::size_t> votes;
            for (NodeId v : adj[u]) ++votes[label[v]];
            // most frequent neighbor label, smallest label on ties
            std::uint32_t best = label[u];
            std::size_t best_count = 0;
            for (const auto& [l, count] : votes)
                if (count > best_count) {
                    best = l;
                    best_count = count;
                }
            if (best != label[u]) {
                label[u] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }

    CommunityPartition p;
    for (NodeId u = 0; u < g.n; ++u) p.assignment[u] = label[u];
    return p;
}

double mean_density(const Graph& g, const CommunityPartition& p) {
    auto groups = groups_of(p);
    if (groups.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [c, members] : groups) sum += density(members, g);
    return sum / static_cast<double>(groups.size());
}

double mean_conductance(const Graph& g, const CommunityPartition& p) {
    auto groups = groups_of(p);
    if (groups.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [c, members] : groups) sum += conductance(members, g);
    return sum / static_cast<double>(groups.size());
}

Graph to_graph(const InferredGraph& ig, std::size_t n) {
    Graph g;
    g.directed = ig.directed;
    NodeId max_node = 0;
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const auto& e : ig.edges) {
        NodeId u = e.u, v = e.v;
        if (!g.directed && u > v) std::swap(u, v);
        if (u == v || !seen.insert({u, v}).second) continue;
        g.edges.emplace_back(u, v);
        max_node = std::max({max_node, u, v});
    }
    g.n = std::max(n, ig.edges.empty() ? std::size_t{0} : max_node + std::size_t{1});
    return g;
}

CommunityReport community_report(const Graph& truth_graph,
                                 const CommunityPartition& truth_part,
                                 const Graph& inferred_graph,
                                 std::uint64_t detector_seed,
                                 const CommunityPartition* external) {
    CommunityReport r;
    r.detector_seed = detector_seed;
    CommunityPartition detected =
        external ? *external : label_propagation(inferred_graph, detector_seed);

    // Nodes absent from the inferred graph become singletons so both
    // partitions cover the truth node set.
    std::uint32_t next = 0;
    for (const auto& [node, c] : detected.assignment) next = std::max(next, c + 1);
    for (const auto& [node, c] : truth_part.assignment)
        if (!detected.assignment.count(node)) detected.assignment[node] = next++;

    r.nmi = nmi(truth_part, detected);
    r.degenerate_nmi = truth_part.community_count() == 1 &&
                       detected.community_count() == 1;
    r.pwf = pwf(truth_part, detected);
    r.density_gap = std::abs(mean_density(truth_graph, truth_part) -
                             mean_density(inferred_graph, detected));
    r.conductance_gap = std::abs(mean_conductance(truth_graph, truth_part) -
                                 mean_conductance(inferred_graph, detected));
    r.nc = nc(truth_part, detected);
    return r;
}

}  // namespace dani
