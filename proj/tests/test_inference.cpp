#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dani/inference.hpp"
#include "oracle.hpp"

using namespace dani;

namespace {

CascadeSet make_set(const std::vector<oracle::CascadeEvents>& cascades) {
    CascadeSet cs;
    for (const auto& c : cascades) {
        Cascade cc;
        for (const auto& [node, time] : c) cc.entries.push_back({node, time});
        cs.cascades.push_back(std::move(cc));
    }
    rebuild_node_universe(cs);
    return cs;
}

ScoreMatrix score_of(const CascadeSet& cs, unsigned threads = 1) {
    auto cvs = to_cascade_vectors(cs);
    std::size_t dim = cs.node_universe.empty() ? 0 : cs.node_universe.back() + 1;
    auto pc = aggregate_transitions(cvs, dim, threads);
    auto idx = build_participation_index(cvs);
    return score_edges(pc, idx);
}

}  // namespace

TEST_CASE("diffusion weight direct values") {
    CHECK(diffusion_weight(1, 2) == doctest::Approx(0.5));
    CHECK(diffusion_weight(1, 4) == doctest::Approx(1.0 / 12.0));
    CHECK(diffusion_weight(3, 4) == doctest::Approx(0.25));
    CHECK_THROWS_AS(diffusion_weight(2, 2), std::invalid_argument);
    CHECK_THROWS_AS(diffusion_weight(0, 1), std::invalid_argument);
}

TEST_CASE("per-cascade transition matrix") {
    SUBCASE("single successor row normalizes to 1") {
        CascadeVector cv{{{0, 1}, {1, 2}}};
        auto p = cascade_transition_matrix(cv, 2);
        CHECK(p.at(0, 1) == doctest::Approx(1.0));
        CHECK(p.entry_count() == 1);
    }
    SUBCASE("three-node chain") {
        CascadeVector cv{{{0, 1}, {1, 2}, {2, 3}}};
        auto p = cascade_transition_matrix(cv, 3);
        CHECK(p.at(0, 1) == doctest::Approx(0.75));
        CHECK(p.at(0, 2) == doctest::Approx(0.25));
        CHECK(p.at(1, 2) == doctest::Approx(1.0));
    }
    SUBCASE("singleton cascade yields empty matrix") {
        CascadeVector cv{{{5, 1}}};
        auto p = cascade_transition_matrix(cv, 6);
        CHECK(p.entry_count() == 0);
    }
}

TEST_CASE("aggregate transitions") {
    SUBCASE("single cascade equals per-cascade matrix") {
        CascadeVector cv{{{0, 1}, {1, 2}, {2, 3}}};
        auto one = cascade_transition_matrix(cv, 3);
        auto agg = aggregate_transitions({cv}, 3);
        for (const auto& [u, row] : one.rows)
            for (const auto& [v, w] : row)
                CHECK(agg.at(u, v) == doctest::Approx(w));
    }
    SUBCASE("duplicate cascades cancel in normalization") {
        CascadeVector cv{{{0, 1}, {1, 2}, {2, 3}}};
        auto once = aggregate_transitions({cv}, 3);
        auto twice = aggregate_transitions({cv, cv}, 3);
        for (const auto& [u, row] : once.rows)
            for (const auto& [v, w] : row)
                CHECK(twice.at(u, v) == doctest::Approx(w).epsilon(1e-12));
    }
    SUBCASE("branching rows merge") {
        CascadeVector c1{{{0, 1}, {1, 2}}};
        CascadeVector c2{{{0, 1}, {2, 2}}};
        auto agg = aggregate_transitions({c1, c2}, 3);
        CHECK(agg.at(0, 1) == doctest::Approx(0.5));
        CHECK(agg.at(0, 2) == doctest::Approx(0.5));
    }
    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(aggregate_transitions({}, 0), std::invalid_argument);
    }
}

TEST_CASE("participation index and similarity") {
    // u=0 in cascades {0,1,2}, v=1 in {1,2,3}; u precedes v in both shared
    CascadeVector c0{{{0, 1}, {9, 2}}};
    CascadeVector c1{{{0, 1}, {1, 2}}};
    CascadeVector c2{{{0, 1}, {1, 2}, {9, 3}}};
    CascadeVector c3{{{1, 1}, {9, 2}}};
    auto idx = build_participation_index({c0, c1, c2, c3});
    CHECK(idx.cascades_of(0) == std::vector<std::uint32_t>{0, 1, 2});
    CHECK(idx.cascades_of(1) == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(idx.cascades_of(42).empty());
    CHECK(similarity(0, 1, idx) == doctest::Approx(0.5));
    SUBCASE("disjoint participation gives 0") {
        CascadeVector a{{{0, 1}, {1, 2}}};
        CascadeVector b{{{2, 1}, {3, 2}}};
        auto i2 = build_participation_index({a, b});
        CHECK(similarity(0, 2, i2) == 0.0);
    }
    SUBCASE("order matters in the numerator") {
        // shared cascades: 2; u before v in one of them; union = 3
        CascadeVector a{{{0, 1}, {1, 2}}};
        CascadeVector b{{{1, 1}, {0, 2}}};
        CascadeVector c{{{0, 1}, {9, 2}}};
        auto i2 = build_participation_index({a, b, c});
        CHECK(similarity(0, 1, i2) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("psi(u,v) + psi(v,u) equals |intersection|/|union|") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<CascadeVector> cvs;
            int m = 1 + static_cast<int>(rng() % 5);
            for (int i = 0; i < m; ++i) {
                std::vector<NodeId> nodes{0, 1, 2, 3};
                std::shuffle(nodes.begin(), nodes.end(), rng);
                nodes.resize(2 + rng() % 3);
                CascadeVector cv;
                for (std::size_t j = 0; j < nodes.size(); ++j)
                    cv.entries.push_back({nodes[j], static_cast<std::uint32_t>(j + 1)});
                cvs.push_back(cv);
            }
            auto i2 = build_participation_index(cvs);
            double fwd = similarity(0, 1, i2);
            double bwd = similarity(1, 0, i2);
            std::size_t inter = 0, uni = 0;
            for (std::uint32_t ci = 0; ci < cvs.size(); ++ci) {
                bool hu = false, hv = false;
                for (const auto& e : cvs[ci].entries) {
                    hu |= e.node == 0;
                    hv |= e.node == 1;
                }
                if (hu && hv) ++inter;
                if (hu || hv) ++uni;
            }
            double bound = uni ? static_cast<double>(inter) / uni : 0.0;
            CHECK(fwd + bwd == doctest::Approx(bound).epsilon(1e-12));
            CHECK(fwd >= 0.0);
            CHECK(fwd <= 1.0);
        }
    }
}

TEST_CASE("score matrix matches brute-force oracle on the 3-node chain") {
    std::vector<oracle::CascadeEvents> cascades = {
        {{0, 0.0}, {1, 1.0}, {2, 2.0}},
        {{0, 0.0}, {1, 1.5}, {2, 1.8}},
    };
    auto cs = make_set(cascades);
    auto scores = score_of(cs);
    auto ref = oracle::dense_scores(cascades, 3);
    for (NodeId u = 0; u < 3; ++u)
        for (NodeId v = 0; v < 3; ++v)
            CHECK(scores.at(u, v) == doctest::Approx(ref[u][v]).epsilon(1e-12));
    // adjacent pairs outrank the skip pair
    CHECK(scores.at(0, 1) > scores.at(0, 2));
    CHECK(scores.at(1, 2) > scores.at(0, 2));
}

TEST_CASE("randomized oracle equivalence") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + rng() % 5;  // up to 6 nodes
        std::size_t m = 1 + rng() % 4;
        std::vector<oracle::CascadeEvents> cascades;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<NodeId> nodes(n);
            for (NodeId u = 0; u < n; ++u) nodes[u] = u;
            std::shuffle(nodes.begin(), nodes.end(), rng);
            std::size_t len = 2 + rng() % (n - 1);
            oracle::CascadeEvents c;
            for (std::size_t j = 0; j < len; ++j)
                c.push_back({nodes[j], static_cast<double>(j)});
            cascades.push_back(std::move(c));
        }
        auto cs = make_set(cascades);
        auto scores = score_of(cs);
        auto ref = oracle::dense_scores(cascades, n);
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = 0; v < n; ++v) {
                double got = scores.at(u, v);
                REQUIRE(std::abs(got - ref[u][v]) < 1e-12);
            }
    }
}

TEST_CASE("top-k selection") {
    ScoreMatrix a;
    a.dim = 4;
    a.rows[0][1] = 0.5;
    a.rows[0][2] = 0.5;
    a.rows[1][2] = 0.9;
    a.rows[2][1] = 0.3;
    SUBCASE("K=0 yields empty graph") {
        auto g = top_k(a, 0, InferMode::directed);
        CHECK(g.edges.empty());
        CHECK_FALSE(g.saturated);
    }
    SUBCASE("ranking and tie order") {
        auto g = top_k(a, 3, InferMode::directed);
        REQUIRE(g.edges.size() == 3);
        CHECK(g.edges[0].u == 1);
        CHECK(g.edges[0].v == 2);
        // equal 0.5 scores: (0,1) before (0,2)
        CHECK(g.edges[1].u == 0);
        CHECK(g.edges[1].v == 1);
        CHECK(g.edges[2].v == 2);
    }
    SUBCASE("saturation flag when K exceeds candidates") {
        auto g = top_k(a, 10, InferMode::directed);
        CHECK(g.edges.size() == 4);
        CHECK(g.saturated);
    }
    SUBCASE("undirected mode max-merges directions") {
        auto g = top_k(a, 10, InferMode::undirected);
        REQUIRE(g.edges.size() == 3);
        bool found = false;
        for (const auto& e : g.edges)
            if (e.u == 1 && e.v == 2) {
                CHECK(e.score == doctest::Approx(0.9));  // max(0.9, 0.3)
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("infer end to end") {
    SUBCASE("single cascade, K=1") {
        auto cs = make_set({{{0, 0.0}, {1, 1.0}}});
        auto g = infer(cs, 1, InferMode::directed);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0].u == 0);
        CHECK(g.edges[0].v == 1);
    }
    SUBCASE("two cascades over 4 nodes give one combined ranking") {
        auto cs = make_set({{{0, 0.0}, {1, 1.0}, {2, 2.0}},
                            {{0, 0.0}, {3, 1.0}, {2, 2.0}}});
        auto g = infer(cs, 4, InferMode::directed);
        CHECK(g.edges.size() == 4);
        for (std::size_t i = 0; i + 1 < g.edges.size(); ++i)
            CHECK(g.edges[i].score >= g.edges[i + 1].score);
    }
    SUBCASE("thread count does not change results") {
        std::mt19937_64 rng(5);
        std::vector<oracle::CascadeEvents> cascades;
        for (int i = 0; i < 40; ++i) {
            std::vector<NodeId> nodes(20);
            for (NodeId u = 0; u < 20; ++u) nodes[u] = u;
            std::shuffle(nodes.begin(), nodes.end(), rng);
            oracle::CascadeEvents c;
            for (int j = 0; j < 6; ++j) c.push_back({nodes[j], static_cast<double>(j)});
            cascades.push_back(std::move(c));
        }
        auto cs = make_set(cascades);
        auto g1 = infer(cs, 30, InferMode::directed, 1);
        auto g4 = infer(cs, 30, InferMode::directed, 4);
        REQUIRE(g1.edges.size() == g4.edges.size());
        for (std::size_t i = 0; i < g1.edges.size(); ++i) {
            CHECK(g1.edges[i].u == g4.edges[i].u);
            CHECK(g1.edges[i].v == g4.edges[i].v);
            CHECK(g1.edges[i].score == g4.edges[i].score);
        }
    }
}

TEST_CASE("stochastic invariants on random cascade vectors") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng() % 49;
        std::size_t m = 1 + rng() % 6;
        std::vector<CascadeVector> cvs;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<NodeId> nodes(n);
            for (NodeId u = 0; u < n; ++u) nodes[u] = u;
            std::shuffle(nodes.begin(), nodes.end(), rng);
            std::size_t len = 2 + rng() % (n - 1);
            CascadeVector cv;
            for (std::size_t j = 0; j < len; ++j)
                cv.entries.push_back({nodes[j], static_cast<std::uint32_t>(j + 1)});
            cvs.push_back(std::move(cv));
        }
        auto agg = aggregate_transitions(cvs, n);
        for (const auto& [u, row] : agg.rows) {
            double sum = 0.0;
            for (const auto& [v, w] : row) {
                CHECK(w >= 0.0);
                sum += w;
            }
            if (!row.empty()) CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("duplication leaves ranking identical") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 4 + rng() % 8;
        std::size_t m = 2 + rng() % 4;
        std::vector<oracle::CascadeEvents> cascades;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<NodeId> nodes(n);
            for (NodeId u = 0; u < n; ++u) nodes[u] = u;
            std::shuffle(nodes.begin(), nodes.end(), rng);
            oracle::CascadeEvents c;
            std::size_t len = 2 + rng() % (n - 1);
            for (std::size_t j = 0; j < len; ++j)
                c.push_back({nodes[j], static_cast<double>(j)});
            cascades.push_back(std::move(c));
        }
        auto cs = make_set(cascades);
        auto doubled_events = cascades;
        doubled_events.insert(doubled_events.end(), cascades.begin(), cascades.end());
        auto cs2 = make_set(doubled_events);
        auto g1 = infer(cs, 20, InferMode::directed);
        auto g2 = infer(cs2, 20, InferMode::directed);
        REQUIRE(g1.edges.size() == g2.edges.size());
        for (std::size_t i = 0; i < g1.edges.size(); ++i) {
            CHECK(g1.edges[i].u == g2.edges[i].u);
            CHECK(g1.edges[i].v == g2.edges[i].v);
        }
    }
}

TEST_CASE("baseline time adjacency") {
    SUBCASE("single cascade matches the forced edge") {
        auto cs = make_set({{{0, 0.0}, {1, 1.0}}});
        auto g = baseline_time_adjacency(cs, 1, InferMode::directed);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0].u == 0);
        CHECK(g.edges[0].v == 1);
    }
    SUBCASE("adjacent pairs outrank distant pairs on chains") {
        auto cs = make_set({{{0, 0.0}, {1, 1.0}, {2, 2.0}, {3, 3.0}}});
        auto g = baseline_time_adjacency(cs, 6, InferMode::directed);
        REQUIRE(g.edges.size() == 6);
        CHECK(g.edges[0].score == doctest::Approx(1.0));   // adjacent
        CHECK(g.edges.back().score == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("inferred graph serialization round-trip") {
    InferredGraph g;
    g.directed = false;
    g.requested_k = 2;
    g.edges = {{0, 1, 0.75}, {1, 2, 0.25}};
    std::ostringstream out;
    write_inferred_stream(g, out);
    CHECK(out.str().find("# K=2 mode=undirected") == 0);
}
