#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dani/cascade.hpp"

namespace dani {

// Edge list plus adjacency. Undirected edges are stored canonically (u < v).
struct Graph {
    std::size_t n = 0;
    bool directed = false;
    std::vector<std::pair<NodeId, NodeId>> edges;

    bool has_edge(NodeId u, NodeId v) const;
    void add_edge(NodeId u, NodeId v);

    // Out-neighbors for directed graphs, all neighbors otherwise.
    std::vector<std::vector<NodeId>> adjacency() const;
    std::vector<std::vector<NodeId>> undirected_adjacency() const;
};

struct CommunityPartition {
    std::map<NodeId, std::uint32_t> assignment;
    bool overlapping = false;

    std::size_t community_count() const;
};

struct GenConfig {
    std::size_t n = 0;
    std::vector<std::size_t> community_sizes;  // explicit sizes; wins over minC/maxC
    std::size_t min_community = 0;
    std::size_t max_community = 0;
    double size_exponent = 1.0;    // community-size power-law exponent
    double degree_exponent = 2.0;  // degree power-law exponent
    double mu = 0.1;
    double avg_degree = 0.0;
    std::size_t max_degree = 0;
    std::uint64_t rng_seed = 0;
};

struct GenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GraphParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Community-structured random graph: each node gets ~avg_degree edges of which
// fraction mu land outside its community, wired by stub matching.
std::pair<Graph, CommunityPartition> planted_partition(const GenConfig& cfg);

Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

CommunityPartition load_partition(const std::string& path);
void save_partition(const CommunityPartition& p, const std::string& path);

bool is_connected(const Graph& g);

// Realized per-node mean fraction of inter-community edges.
double realized_mixing(const Graph& g, const CommunityPartition& p);

}  // namespace dani
