#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "dani/cascade.hpp"

namespace dani {

// Sparse nonnegative matrix over node pairs. Every nonempty row sums to 1
// after normalize_rows(); rows with no observed successors stay empty.
struct TransitionMatrix {
    std::size_t dim = 0;
    std::unordered_map<NodeId, std::unordered_map<NodeId, double>> rows;

    double at(NodeId u, NodeId v) const;
    void add(NodeId u, NodeId v, double w);
    void normalize_rows();
    std::size_t entry_count() const;
};

// Which cascades each node participates in (sorted indices), plus each
// node's infection label per cascade.
struct ParticipationIndex {
    std::unordered_map<NodeId, std::vector<std::uint32_t>> index;
    std::vector<std::unordered_map<NodeId, std::uint32_t>> labels;  // per cascade

    const std::vector<std::uint32_t>& cascades_of(NodeId u) const;
};

struct ScoreMatrix {
    std::size_t dim = 0;
    std::unordered_map<NodeId, std::unordered_map<NodeId, double>> rows;

    double at(NodeId u, NodeId v) const;
};

struct ScoredEdge {
    NodeId u;
    NodeId v;
    double score;
};

struct InferredGraph {
    std::vector<ScoredEdge> edges;  // scores non-increasing
    bool directed = true;
    std::size_t requested_k = 0;
    bool saturated = false;  // fewer positive-score pairs than K
};

enum class InferMode { directed, undirected };
enum class InferAlgo { dani, baseline };

// d(u,v) = 1 / (L(v) * (L(v) - L(u))), requires 1 <= lu < lv.
double diffusion_weight(std::uint32_t lu, std::uint32_t lv);

TransitionMatrix cascade_transition_matrix(const CascadeVector& cv, std::size_t dim);

// Row-normalized entrywise sum of per-cascade transition matrices.
// Deterministic regardless of thread count (per-cascade matrices are merged
// in cascade order).
TransitionMatrix aggregate_transitions(const std::vector<CascadeVector>& cvs,
                                       std::size_t dim, unsigned threads = 1);

ParticipationIndex build_participation_index(const std::vector<CascadeVector>& cvs);

// Jaccard-style co-participation similarity: cascades where u precedes v
// over cascades containing either. In [0,1].
double similarity(NodeId u, NodeId v, const ParticipationIndex& idx);

ScoreMatrix score_edges(const TransitionMatrix& pc, const ParticipationIndex& idx);

// K highest-score pairs, ties broken by (u,v) ascending. Undirected mode
// max-merges the two directions onto canonical (u < v) pairs first.
InferredGraph top_k(const ScoreMatrix& a, std::size_t k, InferMode mode);

InferredGraph infer(const CascadeSet& cs, std::size_t k, InferMode mode,
                    unsigned threads = 1);

// Comparison baseline: score(u,v) = sum over cascades of 1/(L(v)-L(u)).
InferredGraph baseline_time_adjacency(const CascadeSet& cs, std::size_t k,
                                      InferMode mode);

void write_inferred(const InferredGraph& g, const std::string& path,
                    bool header = true);
void write_inferred_stream(const InferredGraph& g, std::ostream& out,
                           bool header = true);
InferredGraph load_inferred(const std::string& path);

}  // namespace dani
