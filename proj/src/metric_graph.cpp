#include "bbmnet/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace bbmnet {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadVertexIndex: return "BadVertexIndex";
        case ErrorCode::LoopEdge: return "LoopEdge";
        case ErrorCode::BadLength: return "BadLength";
        case ErrorCode::BadCoefficient: return "BadCoefficient";
        case ErrorCode::NotSimple: return "NotSimple";
        case ErrorCode::NotConnected: return "NotConnected";
        case ErrorCode::NotIncident: return "NotIncident";
        case ErrorCode::SingularAtZero: return "SingularAtZero";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::InconsistentSpeeds: return "InconsistentSpeeds";
        case ErrorCode::GluingMismatch: return "GluingMismatch";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::SolverSingular: return "SolverSingular";
        case ErrorCode::Unstable: return "Unstable";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

std::string edge_tag(EdgeId e) {
    return "edge " + std::to_string(e);
}

} // namespace

MetricGraph::MetricGraph(std::vector<EdgeSpec> edges, int vertex_count)
    : edges_(std::move(edges)), vertex_count_(vertex_count) {
    validate();
    incident_.assign(vertex_count_, {});
    for (EdgeId e = 0; e < edge_count(); ++e) {
        const EdgeSpec& s = edges_[e];
        if (s.tail != kNoVertex) incident_[s.tail].emplace_back(e, -1);
        if (s.head != kNoVertex) incident_[s.head].emplace_back(e, +1);
    }
    // edge ids were pushed in ascending order already; keep it explicit
    for (auto& list : incident_) {
        std::sort(list.begin(), list.end());
    }
}

void MetricGraph::validate() const {
    if (vertex_count_ < 1) {
        fail(ErrorCode::BadVertexIndex, "vertex_count must be at least 1");
    }
    if (edges_.empty()) {
        fail(ErrorCode::NotConnected, "graph has no edges");
    }
    for (EdgeId e = 0; e < edge_count(); ++e) {
        const EdgeSpec& s = edges_[e];
        const bool inf_tail = s.infinite_end == InfiniteEnd::tail;
        const bool inf_head = s.infinite_end == InfiniteEnd::head;

        if ((s.tail == kNoVertex) != inf_tail || (s.head == kNoVertex) != inf_head) {
            fail(ErrorCode::BadVertexIndex,
                 edge_tag(e) + ": exactly the infinite end must have no vertex");
        }
        auto check_id = [&](VertexId v) {
            if (v != kNoVertex && (v < 0 || v >= vertex_count_)) {
                fail(ErrorCode::BadVertexIndex,
                     edge_tag(e) + ": vertex id " + std::to_string(v) + " out of range");
            }
        };
        check_id(s.tail);
        check_id(s.head);

        if (s.is_finite()) {
            if (!(s.length > 0.0) || !std::isfinite(s.length)) {
                fail(ErrorCode::BadLength,
                     edge_tag(e) + ": finite edge needs a positive finite length");
            }
            if (s.tail == s.head) {
                fail(ErrorCode::LoopEdge, edge_tag(e) + ": tail equals head");
            }
        } else {
            if (!std::isinf(s.length)) {
                fail(ErrorCode::BadLength,
                     edge_tag(e) + ": half-infinite edge must have length=inf");
            }
            // a doubly infinite edge would have no vertex at all
            if (s.tail == kNoVertex && s.head == kNoVertex) {
                fail(ErrorCode::BadLength, edge_tag(e) + ": edge has no finite end");
            }
        }

        if (!(s.coeff_a > 0.0) || !std::isfinite(s.coeff_a)) {
            fail(ErrorCode::BadCoefficient, edge_tag(e) + ": coefficient a must be positive");
        }
        if (s.coeff_b == 0.0 || !std::isfinite(s.coeff_b)) {
            fail(ErrorCode::BadCoefficient, edge_tag(e) + ": coefficient b must be nonzero");
        }
        if (!std::isfinite(s.coeff_d)) {
            fail(ErrorCode::BadCoefficient, edge_tag(e) + ": coefficient d must be finite");
        }
    }

    // simplicity: at most one edge per unordered vertex pair
    std::map<std::pair<VertexId, VertexId>, EdgeId> seen;
    for (EdgeId e = 0; e < edge_count(); ++e) {
        const EdgeSpec& s = edges_[e];
        if (s.tail == kNoVertex || s.head == kNoVertex) continue;
        auto key = std::minmax(s.tail, s.head);
        auto [it, inserted] = seen.emplace(key, e);
        if (!inserted) {
            std::ostringstream os;
            os << "edges " << it->second << " and " << e << " join the same vertex pair";
            fail(ErrorCode::NotSimple, os.str());
        }
    }

    // connectivity over finite ends (a free infinite end joins nothing)
    std::vector<char> reached(vertex_count_, 0);
    std::vector<VertexId> stack;
    VertexId start = edges_[0].tail != kNoVertex ? edges_[0].tail : edges_[0].head;
    reached[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (const EdgeSpec& s : edges_) {
            if (s.tail == v && s.head != kNoVertex && !reached[s.head]) {
                reached[s.head] = 1;
                stack.push_back(s.head);
            }
            if (s.head == v && s.tail != kNoVertex && !reached[s.tail]) {
                reached[s.tail] = 1;
                stack.push_back(s.tail);
            }
        }
    }
    for (VertexId v = 0; v < vertex_count_; ++v) {
        if (!reached[v]) {
            fail(ErrorCode::NotConnected,
                 "vertex " + std::to_string(v) + " is not reachable from vertex " +
                     std::to_string(start));
        }
    }
}

const EdgeSpec& MetricGraph::edge(EdgeId e) const {
    if (e < 0 || e >= edge_count()) {
        fail(ErrorCode::BadVertexIndex, "edge id " + std::to_string(e) + " out of range");
    }
    return edges_[e];
}

int MetricGraph::incidence(VertexId v, EdgeId e) const {
    const EdgeSpec& s = edge(e);
    if (v < 0 || v >= vertex_count_) {
        fail(ErrorCode::BadVertexIndex, "vertex id " + std::to_string(v) + " out of range");
    }
    if (s.head == v) return +1;
    if (s.tail == v) return -1;
    return 0;
}

double MetricGraph::endpoint_offset(VertexId v, EdgeId e) const {
    const int sign = incidence(v, e);
    if (sign == 0) {
        fail(ErrorCode::NotIncident,
             "vertex " + std::to_string(v) + " does not lie on " + edge_tag(e));
    }
    const EdgeSpec& s = edges_[e];
    if (sign < 0) return 0.0;                                  // tail of [0, l] or [0, inf)
    return s.infinite_end == InfiniteEnd::tail ? 0.0 : s.length; // head
}

int MetricGraph::degree(VertexId v) const {
    return static_cast<int>(incident_edges(v).size());
}

const std::vector<std::pair<EdgeId, int>>& MetricGraph::incident_edges(VertexId v) const {
    if (v < 0 || v >= vertex_count_) {
        fail(ErrorCode::BadVertexIndex, "vertex id " + std::to_string(v) + " out of range");
    }
    return incident_[v];
}

std::vector<VertexClass> MetricGraph::classify_vertices() const {
    std::vector<VertexClass> table(vertex_count_);
    for (VertexId v = 0; v < vertex_count_; ++v) {
        VertexClass& c = table[v];
        c.vertex = v;
        for (auto [e, sign] : incident_[v]) {
            (void)sign;
            c.incident.push_back(e);
        }
        c.degree = static_cast<int>(c.incident.size());
        c.kind = c.degree >= 2 ? VertexKind::ramification : VertexKind::boundary;
    }
    return table;
}

std::optional<VertexId> MetricGraph::sink_or_source() const {
    for (VertexId v = 0; v < vertex_count_; ++v) {
        const auto& inc = incident_[v];
        if (inc.size() < 2) continue;
        bool all_in = true, all_out = true;
        for (auto [e, sign] : inc) {
            (void)e;
            all_in = all_in && sign > 0;
            all_out = all_out && sign < 0;
        }
        if (all_in || all_out) return v;
    }
    return std::nullopt;
}

std::optional<std::vector<EdgeId>> MetricGraph::directed_circuit() const {
    enum { White, Grey, Black };
    std::vector<int> color(vertex_count_, White);
    // path_edge[v] = edge used to enter v on the current DFS path
    std::vector<EdgeId> path_edge(vertex_count_, -1);

    // out_edges sorted by edge id through incident_ being sorted
    struct Frame {
        VertexId v;
        size_t next = 0;
    };

    for (VertexId root = 0; root < vertex_count_; ++root) {
        if (color[root] != White) continue;
        std::vector<Frame> stack{{root}};
        color[root] = Grey;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& inc = incident_[f.v];
            bool descended = false;
            while (f.next < inc.size()) {
                auto [e, sign] = inc[f.next++];
                if (sign != -1) continue; // follow orientation, tail -> head
                VertexId w = edges_[e].head;
                if (w == kNoVertex) continue;
                if (color[w] == Grey) {
                    // back edge: the DFS path w -> ... -> f.v plus e closes a circuit
                    size_t wi = stack.size() - 1;
                    while (stack[wi].v != w) --wi;
                    std::vector<EdgeId> cycle;
                    for (size_t j = wi + 1; j < stack.size(); ++j) {
                        cycle.push_back(path_edge[stack[j].v]);
                    }
                    cycle.push_back(e);
                    return cycle;
                }
                if (color[w] == White) {
                    color[w] = Grey;
                    path_edge[w] = e;
                    stack.push_back({w});
                    descended = true;
                    break;
                }
            }
            if (!descended && f.next >= inc.size()) {
                color[f.v] = Black;
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

std::vector<std::vector<CycleStep>> MetricGraph::fundamental_cycles() const {
    // breadth-first spanning tree from vertex 0, ties by lowest edge id
    std::vector<EdgeId> parent_edge(vertex_count_, -1);
    std::vector<char> visited(vertex_count_, 0);
    std::vector<char> is_tree_edge(edge_count(), 0);
    std::vector<VertexId> queue{0};
    visited[0] = 1;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        VertexId v = queue[qi];
        for (auto [e, sign] : incident_[v]) {
            const EdgeSpec& s = edges_[e];
            if (!s.is_finite()) continue;
            VertexId w = sign > 0 ? s.tail : s.head;
            if (w == kNoVertex || visited[w]) continue;
            visited[w] = 1;
            parent_edge[w] = e;
            is_tree_edge[e] = 1;
            queue.push_back(w);
        }
    }

    // signed tree path from v back to the root as vertex -> (edge, sign) chain
    auto path_to_root = [&](VertexId v) {
        std::vector<CycleStep> steps;
        while (parent_edge[v] != -1) {
            EdgeId e = parent_edge[v];
            const EdgeSpec& s = edges_[e];
            if (s.head == v) {
                steps.push_back({e, -1}); // walk head -> tail, against orientation
                v = s.tail;
            } else {
                steps.push_back({e, +1});
                v = s.head;
            }
        }
        return steps;
    };

    std::vector<std::vector<CycleStep>> cycles;
    for (EdgeId e = 0; e < edge_count(); ++e) {
        const EdgeSpec& s = edges_[e];
        if (!s.is_finite() || is_tree_edge[e]) continue;
        // cycle: e (tail->head), then tree path head -> tail
        std::vector<CycleStep> down = path_to_root(s.head);
        std::vector<CycleStep> up = path_to_root(s.tail);
        // strip the common suffix (shared path near the root)
        while (!down.empty() && !up.empty() && down.back().edge == up.back().edge) {
            down.pop_back();
            up.pop_back();
        }
        std::vector<CycleStep> cycle;
        cycle.push_back({e, +1});
        for (const CycleStep& st : down) cycle.push_back(st);
        for (auto it = up.rbegin(); it != up.rend(); ++it) {
            cycle.push_back({it->edge, -it->sign});
        }
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

MetricGraph build_graph(std::vector<EdgeSpec> edges, int vertex_count) {
    return MetricGraph(std::move(edges), vertex_count);
}

} // namespace bbmnet
