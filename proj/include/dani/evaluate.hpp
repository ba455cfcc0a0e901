#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dani/graph.hpp"
#include "dani/inference.hpp"

namespace dani {

struct EdgeReport {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    std::size_t true_edge_count = 0;
    std::size_t inferred_edge_count = 0;
    std::size_t hit_count = 0;
};

struct StructureReport {
    double node_recovery = 0.0;
    double degree_rel_err = 0.0;
    double clustering_rel_err = 0.0;
};

struct CommunityReport {
    double nmi = 0.0;
    double pwf = 0.0;
    double density_gap = 0.0;
    double conductance_gap = 0.0;
    double nc = 0.0;
    bool degenerate_nmi = false;  // single-community-vs-single-community case
    std::uint64_t detector_seed = 0;
};

EdgeReport edge_metrics(const Graph& truth, const InferredGraph& inferred);

StructureReport structure_metrics(const Graph& truth, const InferredGraph& inferred);

double nmi(const CommunityPartition& a, const CommunityPartition& b);
double pwf(const CommunityPartition& a, const CommunityPartition& b);

double density(const std::vector<NodeId>& members, const Graph& g);
double conductance(const std::vector<NodeId>& members, const Graph& g);

// ||C_truth| - |C_inferred|| / |C_truth|; truth must have >= 1 community.
double nc(const CommunityPartition& truth, const CommunityPartition& inferred);

// Asynchronous label propagation, random node order per round, ties broken
// by smallest label; stops when stable or after 100 rounds.
CommunityPartition label_propagation(const Graph& g, std::uint64_t rng_seed);

// Mean density / conductance over the communities of one partition.
double mean_density(const Graph& g, const CommunityPartition& p);
double mean_conductance(const Graph& g, const CommunityPartition& p);

Graph to_graph(const InferredGraph& ig, std::size_t n);

CommunityReport community_report(const Graph& truth_graph,
                                 const CommunityPartition& truth_part,
                                 const Graph& inferred_graph,
                                 std::uint64_t detector_seed,
                                 const CommunityPartition* external = nullptr);

}  // namespace dani
