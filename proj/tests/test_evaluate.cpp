#include <doctest.h>

#include <cmath>
#include <random>

#include "dani/evaluate.hpp"

using namespace dani;

namespace {

CommunityPartition make_partition(const std::vector<std::uint32_t>& labels) {
    CommunityPartition p;
    for (NodeId u = 0; u < labels.size(); ++u) p.assignment[u] = labels[u];
    return p;
}

InferredGraph from_edges(const std::vector<std::pair<NodeId, NodeId>>& edges,
                         bool directed = false) {
    InferredGraph g;
    g.directed = directed;
    for (auto [u, v] : edges) g.edges.push_back({u, v, 1.0});
    g.requested_k = edges.size();
    return g;
}

Graph clique(std::size_t n) {
    Graph g;
    g.n = n;
    g.directed = false;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

}  // namespace

TEST_CASE("edge metrics") {
    Graph truth;
    truth.n = 5;
    truth.directed = false;
    truth.add_edge(0, 1);
    truth.add_edge(1, 2);
    truth.add_edge(2, 3);
    truth.add_edge(3, 4);
    SUBCASE("perfect inference") {
        auto r = edge_metrics(truth, from_edges({{0, 1}, {1, 2}, {2, 3}, {3, 4}}));
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.f_measure == 1.0);
    }
    SUBCASE("disjoint edge sets") {
        auto r = edge_metrics(truth, from_edges({{0, 2}, {1, 3}}));
        CHECK(r.f_measure == 0.0);
    }
    SUBCASE("three of four") {
        auto r = edge_metrics(truth, from_edges({{0, 1}, {1, 2}, {2, 3}, {0, 4}}));
        CHECK(r.precision == doctest::Approx(0.75));
        CHECK(r.recall == doctest::Approx(0.75));
        CHECK(r.f_measure == doctest::Approx(0.75));
        CHECK(r.hit_count == 3);
    }
    SUBCASE("undirected truth ignores inferred direction") {
        auto r = edge_metrics(truth, from_edges({{1, 0}}, true));
        CHECK(r.hit_count == 1);
    }
}

TEST_CASE("structure metrics") {
    Graph triangle = clique(3);
    SUBCASE("identical graphs") {
        auto r = structure_metrics(triangle, from_edges({{0, 1}, {0, 2}, {1, 2}}));
        CHECK(r.node_recovery == 1.0);
        CHECK(r.degree_rel_err == doctest::Approx(0.0));
        CHECK(r.clustering_rel_err == doctest::Approx(0.0));
    }
    SUBCASE("empty inference") {
        auto r = structure_metrics(triangle, from_edges({}));
        CHECK(r.node_recovery == 0.0);
    }
    SUBCASE("triangle truth vs path inferred") {
        auto r = structure_metrics(triangle, from_edges({{0, 1}, {1, 2}}));
        // every node's clustering drops from 1 to 0
        CHECK(r.clustering_rel_err == doctest::Approx(1.0));
    }
}

TEST_CASE("nmi") {
    SUBCASE("identical partitions give 1") {
        auto p = make_partition({0, 0, 1, 1, 2});
        CHECK(nmi(p, p) == doctest::Approx(1.0));
    }
    SUBCASE("one-vs-singletons matches direct formula evaluation") {
        auto a = make_partition({0, 0, 0, 0});
        auto b = make_partition({0, 1, 2, 3});
        // numerator is 0 (N_ij = N_.j for all j), denominator negative
        CHECK(nmi(a, b) == doctest::Approx(0.0));
    }
    SUBCASE("label permutation invariance") {
        auto a = make_partition({0, 0, 1, 1, 2, 2});
        auto b = make_partition({5, 5, 9, 9, 1, 1});
        CHECK(nmi(a, b) == doctest::Approx(1.0));
        auto c = make_partition({0, 0, 0, 1, 1, 1});
        CHECK(nmi(a, c) == doctest::Approx(nmi(c, a)));
    }
    SUBCASE("degenerate single-vs-single") {
        auto a = make_partition({0, 0, 0});
        auto b = make_partition({4, 4, 4});
        CHECK(nmi(a, b) == 1.0);
    }
    SUBCASE("random partitions stay in [0,1] and symmetric") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::uint32_t> la(20), lb(20);
            for (auto& l : la) l = rng() % 4;
            for (auto& l : lb) l = rng() % 4;
            auto a = make_partition(la);
            auto b = make_partition(lb);
            double v = nmi(a, b);
            CHECK(v >= -1e-12);
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v == doctest::Approx(nmi(b, a)));
        }
    }
}

TEST_CASE("pwf") {
    SUBCASE("identical partitions give 1") {
        auto p = make_partition({0, 0, 1, 1});
        CHECK(pwf(p, p) == doctest::Approx(1.0));
    }
    SUBCASE("singleton partition gives 0") {
        auto a = make_partition({0, 0, 1, 1});
        auto b = make_partition({0, 1, 2, 3});
        CHECK(pwf(a, b) == 0.0);
    }
    SUBCASE("worked example ab|cd vs abc|d") {
        auto a = make_partition({0, 0, 1, 1});
        auto b = make_partition({0, 0, 0, 1});
        CHECK(pwf(a, b) == doctest::Approx(0.4));
    }
    SUBCASE("swapping roles flips precision and recall only") {
        auto a = make_partition({0, 0, 1, 1, 2});
        auto b = make_partition({0, 0, 0, 1, 1});
        CHECK(pwf(a, b) == doctest::Approx(pwf(b, a)));
    }
}

TEST_CASE("density") {
    Graph g = clique(4);
    CHECK(density({0, 1, 2, 3}, g) == doctest::Approx(1.0));
    Graph empty;
    empty.n = 4;
    CHECK(density({0, 1, 2, 3}, empty) == 0.0);
    Graph half;
    half.n = 4;
    half.add_edge(0, 1);
    half.add_edge(1, 2);
    half.add_edge(2, 3);
    CHECK(density({0, 1, 2, 3}, half) == doctest::Approx(0.5));
    CHECK(density({0}, g) == 0.0);
}

TEST_CASE("conductance") {
    SUBCASE("isolated community") {
        Graph g = clique(4);
        CHECK(conductance({0, 1, 2, 3}, g) == 0.0);
    }
    SUBCASE("single node of positive degree") {
        Graph g;
        g.n = 4;
        g.add_edge(0, 1);
        g.add_edge(0, 2);
        CHECK(conductance({0}, g) == doctest::Approx(1.0));
    }
    SUBCASE("mixed") {
        // community {0,1,2,3}: 4 internal, 2 boundary -> 2/(8+2)
        Graph g;
        g.n = 6;
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        g.add_edge(0, 3);
        g.add_edge(3, 4);
        g.add_edge(2, 5);
        CHECK(conductance({0, 1, 2, 3}, g) == doctest::Approx(0.2));
    }
}

TEST_CASE("nc") {
    auto p28 = make_partition(std::vector<std::uint32_t>(28, 0));
    CommunityPartition truth, inferred;
    for (NodeId u = 0; u < 28; ++u) truth.assignment[u] = u;  // 28 communities
    for (NodeId u = 0; u < 28; ++u) inferred.assignment[u] = u % 14;
    CHECK(nc(truth, inferred) == doctest::Approx(0.5));
    CHECK(nc(truth, truth) == 0.0);
    CommunityPartition ten, twentyfive;
    for (NodeId u = 0; u < 50; ++u) ten.assignment[u] = u % 10;
    for (NodeId u = 0; u < 50; ++u) twentyfive.assignment[u] = u % 25;
    CHECK(nc(ten, twentyfive) == doctest::Approx(1.5));
    CommunityPartition empty;
    CHECK_THROWS_AS(nc(empty, truth), std::invalid_argument);
}

TEST_CASE("label propagation") {
    SUBCASE("two disjoint cliques become two communities") {
        Graph g;
        g.n = 8;
        for (NodeId u = 0; u < 4; ++u)
            for (NodeId v = u + 1; v < 4; ++v) g.add_edge(u, v);
        for (NodeId u = 4; u < 8; ++u)
            for (NodeId v = u + 1; v < 8; ++v) g.add_edge(u, v);
        auto p = label_propagation(g, 1);
        CHECK(p.community_count() == 2);
        CHECK(p.assignment.at(0) == p.assignment.at(3));
        CHECK(p.assignment.at(4) == p.assignment.at(7));
        CHECK(p.assignment.at(0) != p.assignment.at(4));
    }
    SUBCASE("edgeless graph keeps singletons") {
        Graph g;
        g.n = 5;
        auto p = label_propagation(g, 1);
        CHECK(p.community_count() == 5);
    }
    SUBCASE("never merges disconnected components") {
        Graph g;
        g.n = 6;
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(3, 4);
        g.add_edge(4, 5);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto p = label_propagation(g, seed);
            CHECK(p.assignment.at(0) != p.assignment.at(3));
        }
    }
}

TEST_CASE("community report") {
    Graph g;
    g.n = 8;
    for (NodeId u = 0; u < 4; ++u)
        for (NodeId v = u + 1; v < 4; ++v) g.add_edge(u, v);
    for (NodeId u = 4; u < 8; ++u)
        for (NodeId v = u + 1; v < 8; ++v) g.add_edge(u, v);
    g.add_edge(3, 4);
    auto truth_part = make_partition({0, 0, 0, 0, 1, 1, 1, 1});
    SUBCASE("self comparison") {
        auto r = community_report(g, truth_part, g, 1);
        CHECK(r.nmi == doctest::Approx(1.0));
        CHECK(r.pwf == doctest::Approx(1.0));
        CHECK(r.density_gap == doctest::Approx(0.0));
        CHECK(r.conductance_gap == doctest::Approx(0.0));
        CHECK(r.nc == 0.0);
    }
    SUBCASE("empty inferred graph compares against singletons") {
        Graph empty;
        empty.n = 8;
        auto r = community_report(g, truth_part, empty, 1);
        // 2 equal communities vs 8 singletons: 2*H(a)/(H(a)+H(b)) = 0.5
        CHECK(r.nmi == doctest::Approx(0.5));
        CHECK(r.nc == doctest::Approx((8.0 - 2.0) / 2.0));
    }
    SUBCASE("external partition bypasses the detector") {
        auto r = community_report(g, truth_part, g, 1, &truth_part);
        CHECK(r.nmi == doctest::Approx(1.0));
    }
}
