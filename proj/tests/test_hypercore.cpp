#include <doctest.h>

#include <set>
#include <sstream>

#include "perturb/cycles.hpp"
#include "perturb/solvers.hpp"
#include "perturb/generators.hpp"
#include "perturb/hypergraph.hpp"

using namespace perturb;

TEST_CASE("hypergraph canonicalization and validation") {
    Hypergraph g(2, 4, {{1, 0}, {3, 2}, {0, 1}});
    CHECK(g.edge_count() == 2);
    CHECK(g.edges()[0] == Hypergraph::Edge{0, 1});
    CHECK(g.edges()[1] == Hypergraph::Edge{2, 3});
    CHECK_THROWS_AS(Hypergraph(2, 3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(Hypergraph(3, 5, {{0, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Hypergraph(1, 3, {}), std::invalid_argument);
}

TEST_CASE("induced subgraphs") {
    CHECK(induced(Hypergraph::complete(2, 4), VertexSet::of(4, {0, 1, 2})).graph ==
          Hypergraph::complete(2, 3));

    Hypergraph two_triangles(2, 6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
    auto first = induced(two_triangles, VertexSet::of(6, {0, 1, 2}));
    CHECK(first.graph == Hypergraph::complete(2, 3));
    CHECK(first.vertex_map == std::vector<int>{0, 1, 2});

    // Empty selection yields the empty hypergraph.
    CHECK(induced(two_triangles, VertexSet(6)).graph.n() == 0);
}

TEST_CASE("induced edge count equals the naive filter on random hosts") {
    for (int trial = 0; trial < 30; ++trial) {
        int k = 2 + trial % 2;
        Hypergraph h = gen_random(10, k, 0.4, derive_seed(7, trial));
        Rng rng(derive_seed(8, trial));
        VertexSet s(10);
        for (int v = 0; v < 10; ++v)
            if (rng.coin(0.6)) s.set(v);
        int naive = 0;
        for (const auto& e : h.edges()) {
            bool in = true;
            for (int v : e)
                if (!s.test(v)) in = false;
            if (in) ++naive;
        }
        CHECK(induced(h, s).graph.edge_count() == naive);
    }
}

TEST_CASE("induced component of a reduced cycle is an ell-path") {
    auto rc = build_reduced_hc_ell(24, 3, 2, 6);
    for (const auto& comp : components(rc.residual)) {
        auto sub = induced(rc.residual, comp);
        if (sub.graph.edge_count() == 0) continue;
        CHECK(comp.count() <= 2 * 6);
        Hypergraph path = build_ell_path(3, 2, sub.graph.edge_count());
        CHECK(sub.graph.n() == path.n());
        CHECK(isomorphic(sub.graph, path));
    }
}

TEST_CASE("degrees") {
    Hypergraph k6_3 = Hypergraph::complete(3, 6);
    CHECK(degree(k6_3, VertexSet::of(6, {0, 1})) == 4);
    CHECK(min_degree(k6_3, 1) == 10);
    CHECK(degree(Hypergraph::empty(3, 6), VertexSet::of(6, {0})) == 0);
    CHECK_THROWS_AS(degree(k6_3, VertexSet::of(6, {0, 1, 2})), std::invalid_argument);
    CHECK_THROWS_AS(degree(k6_3, VertexSet(6)), std::invalid_argument);
}

TEST_CASE("components") {
    Hypergraph two_triangles(2, 6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
    auto comps = components(two_triangles);
    CHECK(comps.size() == 2);
    CHECK(comps[0].count() == 3);
    CHECK(comps[1].count() == 3);

    CHECK(components(Hypergraph::complete(3, 5)).size() == 1);

    // Isolated vertices are singleton components.
    Hypergraph lonely(2, 4, {{0, 1}});
    CHECK(components(lonely).size() == 3);
}

TEST_CASE("components partition, walks connect, no edge crosses") {
    for (int trial = 0; trial < 20; ++trial) {
        int k = 2 + trial % 2;
        Hypergraph h = gen_random(12, k, 0.12, derive_seed(11, trial));
        auto comps = components(h);
        int total = 0;
        for (const auto& c : comps) total += c.count();
        CHECK(total == h.n());
        for (const auto& e : h.edges()) {
            int owner = -1;
            for (size_t ci = 0; ci < comps.size(); ++ci)
                if (comps[ci].test(e[0])) owner = int(ci);
            for (int v : e) CHECK(comps[owner].test(v));
        }
        // Breadth-first walk search inside each component.
        for (const auto& c : comps) {
            auto verts = c.vertices();
            std::set<int> reached{verts[0]};
            std::vector<int> frontier{verts[0]};
            while (!frontier.empty()) {
                int v = frontier.back();
                frontier.pop_back();
                for (int ei : h.incident_edges(v))
                    for (int w : h.edge(ei))
                        if (!reached.count(w)) {
                            reached.insert(w);
                            frontier.push_back(w);
                        }
            }
            for (int v : verts) CHECK(reached.count(v) == 1);
        }
    }
}

TEST_CASE("union properties") {
    Hypergraph g = gen_random(10, 2, 0.3, 5);
    Hypergraph h = gen_random(10, 2, 0.3, 6);
    Hypergraph f = gen_random(10, 2, 0.3, 7);
    CHECK(union_of(g, Hypergraph::empty(2, 10)) == g);
    CHECK(union_of(g, g) == g);
    CHECK(union_of(g, h) == union_of(h, g));
    CHECK(union_of(union_of(g, h), f) == union_of(g, union_of(h, f)));
    CHECK_THROWS_AS(union_of(g, Hypergraph::empty(2, 11)), std::invalid_argument);
    CHECK_THROWS_AS(union_of(g, Hypergraph::empty(3, 10)), std::invalid_argument);

    // K_{3,3} plus the complementary edges is K_6.
    FamilyParams params;
    Hypergraph k33 = gen_family("complete-bipartite", 6, 2, params);
    Hypergraph k6 = Hypergraph::complete(2, 6);
    std::vector<Hypergraph::Edge> rest;
    for (const auto& e : k6.edges())
        if (!k33.has_edge(e)) rest.push_back(e);
    CHECK(union_of(k33, Hypergraph(2, 6, rest)) == k6);
}

TEST_CASE("gen_random endpoints and determinism") {
    CHECK(gen_random(10, 3, 0.0, 42) == Hypergraph::empty(3, 10));
    CHECK(gen_random(7, 2, 1.0, 42) == Hypergraph::complete(2, 7));
    CHECK(to_edge_list_string(gen_random(20, 3, 0.1, 99)) ==
          to_edge_list_string(gen_random(20, 3, 0.1, 99)));
    CHECK(to_edge_list_string(gen_random(20, 3, 0.1, 99)) !=
          to_edge_list_string(gen_random(20, 3, 0.1, 100)));
    CHECK(gen_random_skip(20, 3, 0.1, 99) == gen_random_skip(20, 3, 0.1, 99));
}

TEST_CASE("gen_random mean edge count matches the binomial") {
    const int trials = 10000;
    const double p = 0.1;
    const double total = 1140;  // C(20,3)
    double sum = 0;
    for (int t = 0; t < trials; ++t)
        sum += gen_random(20, 3, p, derive_seed(123, t)).edge_count();
    double mean = sum / trials;
    double sigma = std::sqrt(total * p * (1 - p));
    CHECK(std::abs(mean - total * p) <= 3 * sigma / std::sqrt(double(trials)));
}

TEST_CASE("sampling regimes agree in distribution") {
    const int trials = 3000;
    const double p = 0.02, total = 435;  // C(30,2)
    double mean_enum = 0, mean_skip = 0;
    for (int t = 0; t < trials; ++t) {
        mean_enum += gen_random_enumerate(30, 2, p, derive_seed(5, t)).edge_count();
        mean_skip += gen_random_skip(30, 2, p, derive_seed(6, t)).edge_count();
    }
    mean_enum /= trials;
    mean_skip /= trials;
    double sigma = std::sqrt(total * p * (1 - p) / trials);
    CHECK(std::abs(mean_enum - total * p) <= 4 * sigma);
    CHECK(std::abs(mean_skip - total * p) <= 4 * sigma);
}

TEST_CASE("dense families") {
    FamilyParams params;
    params.alpha = 0.5;
    Hypergraph k66 = gen_family("complete-bipartite", 12, 2, params);
    CHECK(k66.edge_count() == 36);

    params.clique = 14;
    Hypergraph cpi = gen_family("clique-plus-isolated", 20, 2, params);
    CHECK(cpi.edge_count() == 91);
    CHECK(components(cpi).size() == 7);  // the clique plus 6 singletons

    CHECK_THROWS_AS(gen_family("no-such-family", 10, 2, {}), std::invalid_argument);

    // density promise enforced
    FamilyParams tight;
    tight.clique = 4;
    tight.eps = 0.2;
    CHECK_THROWS_AS(gen_family("clique-plus-isolated", 20, 2, tight), std::invalid_argument);

    FamilyParams kp;
    kp.eps = 0.03;
    Hypergraph tripartite = gen_family("dense-k-partite", 12, 3, kp);
    CHECK(tripartite.edge_count() == 64);

    params.eps = 0.2;
    params.seed = 9;
    Hypergraph dr = gen_family("dense-random", 15, 2, params);
    CHECK(dr.edge_count() >= 0.2 * 225);
}

TEST_CASE("edge list round trip") {
    Hypergraph g = gen_random(9, 3, 0.3, 4242);
    std::string text = to_edge_list_string(g);
    std::istringstream in(text);
    Hypergraph back = read_edge_list(in);
    CHECK(back == g);
    CHECK(to_edge_list_string(back) == text);

    std::istringstream with_comments("# comment\n2 4\n# another\n1 0\n\n2 3\n");
    Hypergraph parsed = read_edge_list(with_comments);
    CHECK(parsed == Hypergraph(2, 4, {{0, 1}, {2, 3}}));
}

TEST_CASE("named patterns") {
    CHECK(named_pattern("triangle") == Hypergraph::complete(2, 3));
    CHECK(named_pattern("k4me").edge_count() == 5);
    CHECK(named_pattern("c5").edge_count() == 5);
    CHECK(named_pattern("path4").edge_count() == 3);
    CHECK(parse_pattern_sum("3*k3+path9").n() == 18);
    CHECK(parse_pattern_sum("3*k3+path9").edge_count() == 9 + 8);
}
