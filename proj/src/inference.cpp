#include "dani/inference.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <atomic>
#include <thread>

namespace dani {

double TransitionMatrix::at(NodeId u, NodeId v) const {
    auto r = rows.find(u);
    if (r == rows.end()) return 0.0;
    auto e = r->second.find(v);
    return e == r->second.end() ? 0.0 : e->second;
}

void TransitionMatrix::add(NodeId u, NodeId v, double w) {
    rows[u][v] += w;
}

void TransitionMatrix::normalize_rows() {
    for (auto& [u, row] : rows) {
        double sum = 0.0;
        for (const auto& [v, w] : row) sum += w;
        if (sum <= 0.0) continue;
        for (auto& [v, w] : row) w /= sum;
    }
}

std::size_t TransitionMatrix::entry_count() const {
    std::size_t n = 0;
    for (const auto& [u, row] : rows) n += row.size();
    return n;
}

double ScoreMatrix::at(NodeId u, NodeId v) const {
    auto r = rows.find(u);
    if (r == rows.end()) return 0.0;
    auto e = r->second.find(v);
    return e == r->second.end() ? 0.0 : e->second;
}

const std::vector<std::uint32_t>& ParticipationIndex::cascades_of(NodeId u) const {
    static const std::vector<std::uint32_t> empty;
    auto it = index.find(u);
    return it == index.end() ? empty : it->second;
}

double diffusion_weight(std::uint32_t lu, std::uint32_t lv) {
    if (lu < 1 || lu >= lv)
        throw std::invalid_argument("diffusion_weight requires 1 <= lu < lv");
    return 1.0 / (static_cast<double>(lv) * static_cast<double>(lv - lu));
}

namespace {

// Adds one cascade's row-normalized transition matrix into acc.
void accumulate_cascade(const CascadeVector& cv, TransitionMatrix& acc) {
    const auto& es = cv.entries;
    for (std::size_t i = 0; i < es.size(); ++i) {
        double row_sum = 0.0;
        for (std::size_t j = i + 1; j < es.size(); ++j)
            row_sum += diffusion_weight(es[i].label, es[j].label);
        if (row_sum <= 0.0) continue;
        auto& row = acc.rows[es[i].node];
        for (std::size_t j = i + 1; j < es.size(); ++j)
            row[es[j].node] += diffusion_weight(es[i].label, es[j].label) / row_sum;
    }
}

}  // namespace

TransitionMatrix cascade_transition_matrix(const CascadeVector& cv, std::size_t dim) {
    TransitionMatrix p;
    p.dim = dim;
    accumulate_cascade(cv, p);
    return p;
}

TransitionMatrix aggregate_transitions(const std::vector<CascadeVector>& cvs,
                                       std::size_t dim, unsigned threads) {
    if (cvs.empty())
        throw std::invalid_argument("aggregate_transitions needs >= 1 cascade");
    TransitionMatrix acc;
    acc.dim = dim;

    // Fixed chunk size, independent of the worker count: partials are built
    // per chunk and merged in chunk order, so the float accumulation order
    // (and thus the result, bit for bit) never depends on `threads`.
    constexpr std::size_t kChunk = 64;
    std::size_t n_chunks = (cvs.size() + kChunk - 1) / kChunk;
    std::vector<TransitionMatrix> partial(n_chunks);

    auto fill_chunk = [&](std::size_t c) {
        std::size_t lo = c * kChunk;
        std::size_t hi = std::min(cvs.size(), lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i)
            accumulate_cascade(cvs[i], partial[c]);
    };

    if (threads <= 1 || n_chunks < 2) {
        for (std::size_t c = 0; c < n_chunks; ++c) fill_chunk(c);
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        unsigned workers_n = std::min<std::size_t>(threads, n_chunks);
        for (unsigned t = 0; t < workers_n; ++t)
            workers.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < n_chunks;
                     c = next.fetch_add(1))
                    fill_chunk(c);
            });
        for (auto& w : workers) w.join();
    }

    for (auto& p : partial)
        for (auto& [u, row] : p.rows) {
            auto& dst = acc.rows[u];
            for (auto& [v, w] : row) dst[v] += w;
        }

    acc.normalize_rows();
    return acc;
}

ParticipationIndex build_participation_index(const std::vector<CascadeVector>& cvs) {
    ParticipationIndex idx;
    idx.labels.resize(cvs.size());
    for (std::uint32_t i = 0; i < cvs.size(); ++i) {
        auto& lab = idx.labels[i];
        lab.reserve(cvs[i].entries.size());
        for (const auto& e : cvs[i].entries) {
            lab.emplace(e.node, e.label);
            idx.index[e.node].push_back(i);
        }
    }
    // Cascade indices are appended in ascending order already.
    return idx;
}

double similarity(NodeId u, NodeId v, const ParticipationIndex& idx) {
    const auto& in_u = idx.cascades_of(u);
    const auto& in_v = idx.cascades_of(v);
    std::size_t union_size = 0, ordered_common = 0;
    std::size_t i = 0, j = 0;
    while (i < in_u.size() && j < in_v.size()) {
        if (in_u[i] < in_v[j]) {
            ++union_size, ++i;
        } else if (in_u[i] > in_v[j]) {
            ++union_size, ++j;
        } else {
            ++union_size;
            const auto& lab = idx.labels[in_u[i]];
            if (lab.at(u) < lab.at(v)) ++ordered_common;
            ++i, ++j;
        }
    }
    union_size += (in_u.size() - i) + (in_v.size() - j);
    if (union_size == 0) return 0.0;
    return static_cast<double>(ordered_common) / static_cast<double>(union_size);
}

ScoreMatrix score_edges(const TransitionMatrix& pc, const ParticipationIndex& idx) {
    ScoreMatrix a;
    a.dim = pc.dim;
    for (const auto& [u, row] : pc.rows) {
        auto& dst = a.rows[u];
        for (const auto& [v, p] : row) {
            double s = p * similarity(u, v, idx);
            if (s > 0.0) dst.emplace(v, s);
        }
        if (dst.empty()) a.rows.erase(u);
    }
    return a;
}

InferredGraph top_k(const ScoreMatrix& a, std::size_t k, InferMode mode) {
    std::vector<ScoredEdge> all;
    if (mode == InferMode::directed) {
        for (const auto& [u, row] : a.rows)
            for (const auto& [v, s] : row)
                if (s > 0.0) all.push_back({u, v, s});
    } else {
        // Max-merge the two directions onto canonical u < v pairs.
        std::unordered_map<std::uint64_t, double> merged;
        for (const auto& [u, row] : a.rows)
            for (const auto& [v, s] : row) {
                if (s <= 0.0) continue;
                NodeId lo = std::min(u, v), hi = std::max(u, v);
                std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
                auto [it, inserted] = merged.emplace(key, s);
                if (!inserted && s > it->second) it->second = s;
            }
        for (const auto& [key, s] : merged)
            all.push_back({static_cast<NodeId>(key >> 32),
                           static_cast<NodeId>(key & 0xffffffffu), s});
    }
    std::sort(all.begin(), all.end(), [](const ScoredEdge& x, const ScoredEdge& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.u != y.u) return x.u < y.u;
        return x.v < y.v;
    });

    InferredGraph g;
    g.directed = (mode == InferMode::directed);
    g.requested_k = k;
    g.saturated = all.size() < k;
    if (all.size() > k) all.resize(k);
    g.edges = std::move(all);
    return g;
}

InferredGraph infer(const CascadeSet& cs, std::size_t k, InferMode mode,
                    unsigned threads) {
    auto cvs = to_cascade_vectors(cs);
    std::size_t dim = cs.node_universe.empty() ? 0 : cs.node_universe.back() + 1;
    auto pc = aggregate_transitions(cvs, dim, threads);
    auto idx = build_participation_index(cvs);
    auto scores = score_edges(pc, idx);
    return top_k(scores, k, mode);
}

InferredGraph baseline_time_adjacency(const CascadeSet& cs, std::size_t k,
                                      InferMode mode) {
    auto cvs = to_cascade_vectors(cs);
    ScoreMatrix a;
    a.dim = cs.node_universe.empty() ? 0 : cs.node_universe.back() + 1;
    for (const auto& cv : cvs) {
        const auto& es = cv.entries;
        for (std::size_t i = 0; i < es.size(); ++i)
            for (std::size_t j = i + 1; j < es.size(); ++j)
                a.rows[es[i].node][es[j].node] +=
                    1.0 / static_cast<double>(es[j].label - es[i].label);
    }
    return top_k(a, k, mode);
}

void write_inferred_stream(const InferredGraph& g, std::ostream& out, bool header) {
    if (header)
        out << "# K=" << g.requested_k << " mode="
            << (g.directed ? "directed" : "undirected") << "\n";
    out.precision(17);
    for (const auto& e : g.edges)
        out << e.u << "\t" << e.v << "\t" << e.score << "\n";
}

void write_inferred(const InferredGraph& g, const std::string& path, bool header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_inferred_stream(g, out, header);
}

InferredGraph load_inferred(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    InferredGraph g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto kpos = line.find("K=");
            if (kpos != std::string::npos)
                g.requested_k = std::stoull(line.substr(kpos + 2));
            g.directed = line.find("mode=undirected") == std::string::npos;
            continue;
        }
        std::stringstream ss(line);
        ScoredEdge e{};
        if (!(ss >> e.u >> e.v >> e.score))
            throw std::runtime_error("bad inferred edge at line " +
                                     std::to_string(line_no));
        g.edges.push_back(e);
    }
    return g;
}

}  // namespace dani
