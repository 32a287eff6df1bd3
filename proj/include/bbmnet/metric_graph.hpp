#pragma once

#include "bbmnet/errors.hpp"

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace bbmnet {

using VertexId = int;
using EdgeId = int;

// Marks the missing vertex at the free end of a half-infinite edge.
inline constexpr VertexId kNoVertex = -1;

enum class InfiniteEnd { none, tail, head };

// One oriented edge of the network, carrying the coefficients of the
// BBM equation u_t - a u_xxt + b u u_x + d u_x = 0 that lives on it.
//
// Parametrisation by arc length:
//   finite edge          [0, length]   tail at 0, head at length
//   infinite_end == head [0, +inf)     tail at 0
//   infinite_end == tail (-inf, 0]     head at 0
//
// The free end of a half-infinite edge belongs to no vertex; its id slot
// must hold kNoVertex.
struct EdgeSpec {
    VertexId tail = kNoVertex;
    VertexId head = kNoVertex;
    double length = 0.0; // +infinity iff infinite_end != none
    double coeff_a = 1.0; // dispersion, > 0
    double coeff_b = 1.0; // nonlinearity, != 0
    double coeff_d = 0.0; // drift
    InfiniteEnd infinite_end = InfiniteEnd::none;

    bool is_finite() const { return infinite_end == InfiniteEnd::none; }
};

enum class VertexKind { boundary, ramification };

struct VertexClass {
    VertexId vertex = kNoVertex;
    int degree = 0;
    std::vector<EdgeId> incident; // ascending edge ids
    VertexKind kind = VertexKind::boundary;
};

// A step of a cycle walk: the edge and +1 when it is traversed tail->head,
// -1 when traversed against its orientation.
struct CycleStep {
    EdgeId edge;
    int sign;
};

/// Oriented metric graph with per-edge BBM coefficients.
///
/// Immutable after construction; all invariants (simple, connected, no
/// loops, positive lengths, admissible coefficients) are checked eagerly
/// by the constructor, which throws bbmnet::Error on violation. Safe to
/// query from several threads concurrently.
class MetricGraph {
public:
    MetricGraph(std::vector<EdgeSpec> edges, int vertex_count);

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const EdgeSpec& edge(EdgeId e) const;
    const std::vector<EdgeSpec>& edges() const { return edges_; }

    /// Incidence sign: +1 if v is the head of e, -1 if v is the tail,
    /// 0 otherwise (including the free end of a half-infinite edge).
    int incidence(VertexId v, EdgeId e) const;

    /// Arc-length coordinate of vertex v on edge e: length at the head of
    /// a finite edge, 0 at a tail, 0 at the finite end of a half-infinite
    /// edge. Throws NotIncident if v does not lie on e.
    double endpoint_offset(VertexId v, EdgeId e) const;

    int degree(VertexId v) const;

    /// Edges meeting v, as (edge id, incidence sign), ascending by edge id.
    const std::vector<std::pair<EdgeId, int>>& incident_edges(VertexId v) const;

    std::vector<VertexClass> classify_vertices() const;

    /// First ramification vertex whose incident edges all point in (sink)
    /// or all point out (source), if any. Such a vertex rules out
    /// non-constant travelling waves.
    std::optional<VertexId> sink_or_source() const;

    /// A cycle traversable entirely along edge orientations, as the edge
    /// sequence (each step tail->head), or nullopt when the digraph is
    /// acyclic. Depth-first search, vertices and edges visited in
    /// ascending order, so the result is deterministic.
    std::optional<std::vector<EdgeId>> directed_circuit() const;

    /// One fundamental cycle per non-tree edge of the breadth-first
    /// spanning tree rooted at vertex 0 (lowest-index tie-breaking).
    /// Each cycle starts with its non-tree edge (sign +1) followed by the
    /// tree path from that edge's head back to its tail. Half-infinite
    /// edges never participate. Cycles are ordered by non-tree edge id.
    std::vector<std::vector<CycleStep>> fundamental_cycles() const;

private:
    void validate() const;

    std::vector<EdgeSpec> edges_;
    int vertex_count_ = 0;
    // incident_[v] = (edge, sign) pairs, ascending by edge id
    std::vector<std::vector<std::pair<EdgeId, int>>> incident_;
};

/// Convenience factory matching the shape of the text format: validates
/// and builds in one call.
MetricGraph build_graph(std::vector<EdgeSpec> edges, int vertex_count);

} // namespace bbmnet
