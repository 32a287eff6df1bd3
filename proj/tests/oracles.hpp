// Test-only oracles: independent routes to the answers the library
// computes, used to cross-check it. Nothing here calls the code paths
// under test (cycle checks enumerate simple cycles directly, acyclicity
// uses Kahn's algorithm, derivatives use central differences).
#pragma once

#include "bbmnet/metric_graph.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bbmnet::testing {

// Central finite differences of a scalar function, order 1..3.
double fd_derivative(const std::function<double(double)>& f, double x, int order,
                     double h);

// Kahn's algorithm: true iff the directed graph has a topological order.
bool kahn_is_acyclic(const MetricGraph& g);

// Every simple undirected cycle (each listed once), as signed traversals.
std::vector<std::vector<CycleStep>> enumerate_simple_cycles(const MetricGraph& g);

// Exhaustive check of the wave compatibility conditions: coefficient
// ratios and drift offsets over all incident pairs, signed b sums,
// sink/source detection, Kahn acyclicity of the orientation, and the
// length condition over every simple cycle (not just a basis).
struct BruteForceVerdict {
    bool accept = true;
    std::vector<std::string> violated; // condition names, e.g. "ccc", "circuit"
};
BruteForceVerdict brute_force_conditions(const MetricGraph& g);

// Shared fixtures ----------------------------------------------------------

// Star with half-infinite rays at a single centre vertex: n_in incoming
// then n_out outgoing edges, all carrying the same coefficients.
MetricGraph make_star(int n_in, int n_out, double a = 1.0, double b = 1.0,
                      double d = 0.0);

// Directed path 0 -> 1 -> ... with the given per-edge (length, a, b, d).
struct PathEdge {
    double length = 1.0, a = 1.0, b = 1.0, d = 0.0;
};
MetricGraph make_path(const std::vector<PathEdge>& edges);

// Bare 4-cycle of the two-directed-paths kind: 0->1->2 and 0->3->2.
MetricGraph make_bare_diamond(double l1, double l2, double l3, double l4,
                              double a = 1.0);

// The same circuit with an incoming leg at vertex 0 and an outgoing leg
// at vertex 2 (half-infinite, a = 4 a_circuit and b = 2 b_circuit so the
// vertex conditions hold). Accepts iff l1 + l2 == l3 + l4.
MetricGraph make_legged_diamond(double l1, double l2, double l3, double l4,
                                double a_circuit = 1.0);

// Directed triangle 0 -> 1 -> 2 -> 0 with unit coefficients.
MetricGraph make_directed_triangle();

// The standard decision corpus: named graphs covering stars of degree
// 3..6 with different in/out splits, compliant and broken coefficient
// families, two admissible trees plus a broken one, both diamonds and
// the directed triangle, with and without drift.
struct CorpusEntry {
    std::string name;
    MetricGraph graph;
    bool expected_accept;
};
std::vector<CorpusEntry> standard_corpus();

} // namespace bbmnet::testing
