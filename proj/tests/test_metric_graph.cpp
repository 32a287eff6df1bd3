#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bbmnet/metric_graph.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

using namespace bbmnet;
using namespace bbmnet::testing;

namespace {

EdgeSpec finite_edge(VertexId tail, VertexId head, double length = 1.0,
                     double a = 1.0, double b = 1.0, double d = 0.0) {
    return EdgeSpec{tail, head, length, a, b, d, InfiniteEnd::none};
}

// Random connected graph: a spanning tree plus extra edges, random
// orientations, generic lengths and coefficients.
MetricGraph random_connected(std::mt19937_64& rng, int max_vertices, int max_edges) {
    std::uniform_int_distribution<int> vcount(2, max_vertices);
    std::uniform_real_distribution<double> len(0.5, 3.0);
    std::uniform_real_distribution<double> adist(0.5, 4.0);
    const int v = vcount(rng);

    std::set<std::pair<VertexId, VertexId>> used;
    std::vector<EdgeSpec> edges;
    auto add = [&](VertexId x, VertexId y) {
        auto key = std::minmax(x, y);
        if (x == y || used.count(key)) return false;
        used.insert(key);
        const bool flip = std::uniform_int_distribution<int>(0, 1)(rng) != 0;
        edges.push_back(finite_edge(flip ? y : x, flip ? x : y, len(rng), adist(rng)));
        return true;
    };
    for (VertexId w = 1; w < v; ++w) {
        add(std::uniform_int_distribution<VertexId>(0, w - 1)(rng), w);
    }
    std::uniform_int_distribution<int> extra_count(0, max_edges - v + 1);
    int extra = extra_count(rng);
    std::uniform_int_distribution<VertexId> pick(0, v - 1);
    for (int attempt = 0; attempt < 40 && extra > 0; ++attempt) {
        if (add(pick(rng), pick(rng))) --extra;
    }
    return MetricGraph(std::move(edges), v);
}

} // namespace

TEST_CASE("minimal graph builds") {
    MetricGraph g({finite_edge(0, 1)}, 2);
    CHECK(g.vertex_count() == 2);
    CHECK(g.edge_count() == 1);
}

TEST_CASE("validation rejects bad input") {
    CHECK_THROWS_WITH_AS(MetricGraph({finite_edge(0, 0)}, 1), doctest::Contains("tail"),
                         Error);
    try {
        MetricGraph({finite_edge(0, 0)}, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LoopEdge);
    }

    // two components {0-1}, {2-3}
    try {
        MetricGraph({finite_edge(0, 1), finite_edge(2, 3)}, 4);
        FAIL("expected NotConnected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotConnected);
    }

    // double edge between the same pair
    try {
        MetricGraph({finite_edge(0, 1), finite_edge(1, 0)}, 2);
        FAIL("expected NotSimple");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSimple);
    }

    try {
        MetricGraph({finite_edge(0, 1, 1.0, -2.0)}, 2);
        FAIL("expected BadCoefficient");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadCoefficient);
    }
    try {
        MetricGraph({finite_edge(0, 1, 1.0, 1.0, 0.0)}, 2);
        FAIL("expected BadCoefficient (b = 0)");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadCoefficient);
    }
    try {
        MetricGraph({finite_edge(0, 1, -1.0)}, 2);
        FAIL("expected BadLength");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadLength);
    }
}

TEST_CASE("incidence signs") {
    // an isolated vertex is unreachable and must be rejected
    CHECK_THROWS_AS(MetricGraph({finite_edge(0, 1)}, 3), Error);

    MetricGraph path({finite_edge(0, 1), finite_edge(1, 2)}, 3);
    CHECK(path.incidence(1, 0) == +1);
    CHECK(path.incidence(0, 0) == -1);
    CHECK(path.incidence(2, 0) == 0);
}

TEST_CASE("endpoint offsets") {
    MetricGraph g({finite_edge(0, 1, 3.0), finite_edge(1, 2, 1.0)}, 3);
    CHECK(g.endpoint_offset(1, 0) == doctest::Approx(3.0));
    CHECK(g.endpoint_offset(0, 0) == doctest::Approx(0.0));
    try {
        g.endpoint_offset(2, 0);
        FAIL("expected NotIncident");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotIncident);
    }

    // the finite end of a half-infinite edge sits at coordinate 0
    MetricGraph star = make_star(1, 1);
    CHECK(star.endpoint_offset(0, 0) == doctest::Approx(0.0)); // head of (-inf, 0]
    CHECK(star.endpoint_offset(0, 1) == doctest::Approx(0.0)); // tail of [0, inf)
}

TEST_CASE("vertex classification") {
    MetricGraph star = make_star(3, 0); // 3 rays into the centre
    auto table = star.classify_vertices();
    REQUIRE(table.size() == 1);
    CHECK(table[0].degree == 3);
    CHECK(table[0].kind == VertexKind::ramification);

    MetricGraph single({finite_edge(0, 1)}, 2);
    for (const VertexClass& c : single.classify_vertices()) {
        CHECK(c.kind == VertexKind::boundary);
        CHECK(c.degree == 1);
    }

    MetricGraph path({finite_edge(0, 1), finite_edge(1, 2)}, 3);
    auto classes = path.classify_vertices();
    CHECK(classes[0].kind == VertexKind::boundary);
    CHECK(classes[1].kind == VertexKind::ramification);
    CHECK(classes[2].kind == VertexKind::boundary);

    // classification partitions V
    int boundary = 0, ramification = 0;
    for (const VertexClass& c : classes) {
        (c.kind == VertexKind::boundary ? boundary : ramification) += 1;
    }
    CHECK(boundary + ramification == path.vertex_count());
}

TEST_CASE("sink and source detection") {
    CHECK(make_star(3, 0).sink_or_source() == VertexId{0}); // all incoming: sink
    CHECK(make_star(0, 3).sink_or_source() == VertexId{0}); // all outgoing: source
    CHECK(make_star(1, 2).sink_or_source() == std::nullopt);
    MetricGraph path({finite_edge(0, 1), finite_edge(1, 2)}, 3);
    CHECK(path.sink_or_source() == std::nullopt);
}

TEST_CASE("directed circuit detection") {
    auto cycle = make_directed_triangle().directed_circuit();
    REQUIRE(cycle.has_value());
    CHECK(cycle->size() == 3);
    std::vector<EdgeId> sorted = *cycle;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<EdgeId>{0, 1, 2});

    CHECK(make_bare_diamond(1, 2, 1.5, 1.5).directed_circuit() == std::nullopt);

    MetricGraph tree({finite_edge(0, 1), finite_edge(0, 2), finite_edge(2, 3)}, 4);
    CHECK(tree.directed_circuit() == std::nullopt);
}

TEST_CASE("directed circuit agrees with Kahn's algorithm") {
    std::mt19937_64 rng(20260809);
    for (int trial = 0; trial < 200; ++trial) {
        MetricGraph g = random_connected(rng, 6, 10);
        CHECK(g.directed_circuit().has_value() == !kahn_is_acyclic(g));
    }
}

TEST_CASE("fundamental cycles") {
    MetricGraph diamond = make_bare_diamond(1, 2, 1.5, 1.5);
    auto cycles = diamond.fundamental_cycles();
    REQUIRE(cycles.size() == 1); // |E| - |V| + 1 = 4 - 4 + 1
    CHECK(cycles[0].size() == 4);

    MetricGraph tree({finite_edge(0, 1), finite_edge(0, 2), finite_edge(2, 3)}, 4);
    CHECK(tree.fundamental_cycles().empty());

    // two diamonds sharing vertex 2: 8 edges, 7 vertices -> 2 cycles
    std::vector<EdgeSpec> edges;
    edges.push_back(finite_edge(0, 1));
    edges.push_back(finite_edge(1, 2));
    edges.push_back(finite_edge(0, 3));
    edges.push_back(finite_edge(3, 2));
    edges.push_back(finite_edge(2, 4));
    edges.push_back(finite_edge(4, 5));
    edges.push_back(finite_edge(2, 6));
    edges.push_back(finite_edge(6, 5));
    MetricGraph doubled(std::move(edges), 7);
    CHECK(doubled.fundamental_cycles().size() == 2);
}

TEST_CASE("fundamental cycle count and kernel property on random graphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        MetricGraph g = random_connected(rng, 6, 9);
        const auto cycles = g.fundamental_cycles();
        CHECK(static_cast<int>(cycles.size()) ==
              g.edge_count() - g.vertex_count() + 1);

        for (const auto& cycle : cycles) {
            // signed edge-traversal counts, as a vector over edges
            std::vector<double> z(g.edge_count(), 0.0);
            for (const CycleStep& st : cycle) z[st.edge] += st.sign;
            // boundary-free: the incidence matrix annihilates the cycle
            for (VertexId v = 0; v < g.vertex_count(); ++v) {
                double boundary = 0.0;
                for (EdgeId e = 0; e < g.edge_count(); ++e) {
                    boundary += g.incidence(v, e) * z[e];
                }
                CHECK(boundary == doctest::Approx(0.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("every edge has exactly one tail and one head") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        MetricGraph g = random_connected(rng, 6, 9);
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            int sum = 0, nonzero = 0;
            for (VertexId v = 0; v < g.vertex_count(); ++v) {
                const int sign = g.incidence(v, e);
                sum += sign;
                nonzero += sign != 0;
            }
            CHECK(sum == 0);
            CHECK(nonzero == 2);
        }
    }
}

TEST_CASE("half-infinite edge validation") {
    const double inf = std::numeric_limits<double>::infinity();
    // infinite end must carry kNoVertex
    try {
        MetricGraph({{0, 1, inf, 1.0, 1.0, 0.0, InfiniteEnd::head}}, 2);
        FAIL("expected BadVertexIndex");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadVertexIndex);
    }
    // finite length with an infinite end marker
    try {
        MetricGraph({{0, kNoVertex, 2.0, 1.0, 1.0, 0.0, InfiniteEnd::head}}, 1);
        FAIL("expected BadLength");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadLength);
    }
    // no finite end at all
    try {
        MetricGraph({{kNoVertex, kNoVertex, inf, 1.0, 1.0, 0.0, InfiniteEnd::head}}, 1);
        FAIL("expected error");
    } catch (const Error&) {
        CHECK(true);
    }
    MetricGraph ok({{0, kNoVertex, inf, 1.0, 1.0, 0.0, InfiniteEnd::head},
                    {kNoVertex, 0, inf, 1.0, 1.0, 0.0, InfiniteEnd::tail}},
                   1);
    CHECK(ok.degree(0) == 2);
}
