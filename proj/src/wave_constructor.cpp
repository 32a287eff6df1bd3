#include "bbmnet/wave_constructor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bbmnet {

namespace {

bool within_tol(double residual, double scale) {
    return std::abs(residual) <= std::max(kAbsTol, kRelTol * std::abs(scale));
}

std::string vertex_tag(VertexId v) { return "v" + std::to_string(v); }
std::string edge_tag(EdgeId e) { return "e" + std::to_string(e); }

std::string cycle_tag(const std::vector<CycleStep>& cycle) {
    std::ostringstream os;
    os << "cycle(";
    for (size_t i = 0; i < cycle.size(); ++i) {
        if (i) os << ",";
        os << (cycle[i].sign > 0 ? '+' : '-') << cycle[i].edge;
    }
    os << ")";
    return os.str();
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::sort(diags.begin(), diags.end(), [](const Diagnostic& x, const Diagnostic& y) {
        if (x.condition != y.condition) return x.condition < y.condition;
        return x.location < y.location;
    });
}

} // namespace

const char* to_string(ConditionId id) {
    switch (id) {
        case ConditionId::SinkOrSource: return "SinkOrSource";
        case ConditionId::KirchhoffSum: return "KirchhoffSum";
        case ConditionId::CoefficientRatio: return "CoefficientRatio";
        case ConditionId::KirchhoffCoefficientSum: return "KirchhoffCoefficientSum";
        case ConditionId::DirectedCircuit: return "DirectedCircuit";
        case ConditionId::CircuitLengthMismatch: return "CircuitLengthMismatch";
        case ConditionId::StationaryOnly: return "StationaryOnly";
        case ConditionId::DiscriminantNonpositive: return "DiscriminantNonpositive";
    }
    return "Unknown";
}

DriftReduction reduce_d(const MetricGraph& g) {
    std::vector<EdgeSpec> edges = g.edges();
    std::vector<double> offsets(edges.size(), 0.0);
    for (size_t i = 0; i < edges.size(); ++i) {
        offsets[i] = edges[i].coeff_d / edges[i].coeff_b;
        edges[i].coeff_d = 0.0;
    }
    return DriftReduction{MetricGraph(std::move(edges), g.vertex_count()),
                          std::move(offsets)};
}

std::vector<Diagnostic> check_coefficient_conditions(const MetricGraph& g) {
    std::vector<Diagnostic> diags;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto& inc = g.incident_edges(v);
        if (inc.size() < 2) continue;

        for (size_t i = 0; i < inc.size(); ++i) {
            for (size_t j = i + 1; j < inc.size(); ++j) {
                const EdgeSpec& ei = g.edge(inc[i].first);
                const EdgeSpec& ej = g.edge(inc[j].first);
                const double ratio_a = std::sqrt(ei.coeff_a / ej.coeff_a);
                const double ratio_b = ei.coeff_b / ej.coeff_b;
                const double res = ratio_a - ratio_b;
                if (!within_tol(res, std::max(ratio_a, std::abs(ratio_b)))) {
                    std::ostringstream os;
                    os << "sqrt(a" << inc[i].first << "/a" << inc[j].first << ") = "
                       << ratio_a << " but b" << inc[i].first << "/b" << inc[j].first
                       << " = " << ratio_b;
                    diags.push_back({ConditionId::CoefficientRatio, vertex_tag(v),
                                     std::abs(res), os.str()});
                }
                const double off_i = ei.coeff_d / ei.coeff_b;
                const double off_j = ej.coeff_d / ej.coeff_b;
                const double off_res = off_i - off_j;
                const double off_scale = std::max(std::abs(off_i), std::abs(off_j));
                if (!within_tol(off_res, off_scale)) {
                    std::ostringstream os;
                    os << "drift offsets d/b differ: " << off_i << " vs " << off_j
                       << " (edges " << inc[i].first << ", " << inc[j].first << ")";
                    diags.push_back({ConditionId::CoefficientRatio, vertex_tag(v),
                                     std::abs(off_res), os.str()});
                }
            }
        }

        double signed_sum = 0.0;
        double scale = 0.0;
        for (auto [e, sign] : inc) {
            signed_sum += sign * g.edge(e).coeff_b;
            scale += std::abs(g.edge(e).coeff_b);
        }
        if (!within_tol(signed_sum, scale)) {
            std::ostringstream os;
            os << "signed sum of b over incident edges is " << signed_sum;
            diags.push_back({ConditionId::KirchhoffCoefficientSum, vertex_tag(v),
                             std::abs(signed_sum), os.str()});
        }
    }
    sort_diagnostics(diags);
    return diags;
}

std::vector<Diagnostic> check_circuits(const MetricGraph& g) {
    std::vector<Diagnostic> diags;
    if (auto circuit = g.directed_circuit()) {
        std::vector<CycleStep> steps;
        for (EdgeId e : *circuit) steps.push_back({e, +1});
        diags.push_back({ConditionId::DirectedCircuit, cycle_tag(steps), 1.0,
                         "directed circuit forces periodic waves only"});
    }
    for (const auto& cycle : g.fundamental_cycles()) {
        double signed_sum = 0.0;
        double scale = 0.0;
        for (const CycleStep& st : cycle) {
            const EdgeSpec& s = g.edge(st.edge);
            const double term = s.length / std::sqrt(s.coeff_a);
            signed_sum += st.sign * term;
            scale += term;
        }
        if (!within_tol(signed_sum, scale)) {
            std::ostringstream os;
            os << "signed sum of l/sqrt(a) around the cycle is " << signed_sum;
            diags.push_back({ConditionId::CircuitLengthMismatch, cycle_tag(cycle),
                             std::abs(signed_sum), os.str()});
        }
    }
    sort_diagnostics(diags);
    return diags;
}

std::vector<double> compute_speeds(const MetricGraph& g, double c0) {
    std::vector<double> speeds(g.edge_count(), 0.0);
    std::vector<char> done(g.edge_count(), 0);
    speeds[0] = c0;
    done[0] = 1;
    std::vector<EdgeId> queue{0};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        const EdgeId e = queue[qi];
        const EdgeSpec& se = g.edge(e);
        for (VertexId v : {se.tail, se.head}) {
            if (v == kNoVertex) continue;
            for (auto [f, sign] : g.incident_edges(v)) {
                (void)sign;
                if (f == e) continue;
                const double cf =
                    std::sqrt(g.edge(f).coeff_a / se.coeff_a) * speeds[e];
                if (!done[f]) {
                    speeds[f] = cf;
                    done[f] = 1;
                    queue.push_back(f);
                } else if (!within_tol(speeds[f] - cf, speeds[f])) {
                    std::ostringstream os;
                    os << "speed of edge " << f << " disagrees between paths: "
                       << speeds[f] << " vs " << cf;
                    throw Error(ErrorCode::InconsistentSpeeds, os.str());
                }
            }
        }
    }
    return speeds;
}

std::vector<Diagnostic> check_kirchhoff_sums(const MetricGraph& g,
                                             const std::vector<double>& speeds) {
    std::vector<Diagnostic> diags;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        const auto& inc = g.incident_edges(v);
        if (inc.size() < 2) continue;

        bool all_in = true, all_out = true;
        double signed_sum = 0.0;
        double scale = 0.0;
        for (auto [e, sign] : inc) {
            all_in = all_in && sign > 0;
            all_out = all_out && sign < 0;
            const double term = g.edge(e).coeff_a / speeds[e];
            signed_sum += sign * term;
            scale += std::abs(term);
        }
        if (all_in || all_out) {
            diags.push_back({ConditionId::SinkOrSource, vertex_tag(v), 1.0,
                             all_in ? "vertex is a sink (all edges incoming)"
                                    : "vertex is a source (all edges outgoing)"});
            continue;
        }
        if (!within_tol(signed_sum, scale)) {
            std::ostringstream os;
            os << "signed sum of a/c over incident edges is " << signed_sum;
            diags.push_back({ConditionId::KirchhoffSum, vertex_tag(v),
                             std::abs(signed_sum), os.str()});
        }
    }
    sort_diagnostics(diags);
    return diags;
}

std::vector<double> compute_shifts(const MetricGraph& g) {
    // theta(v): common value of k_e * (offset of v on e + tau_e) over the
    // edges at v, with k_e = 1/sqrt(a_e). Crossing edge e adds
    // l_e / sqrt(a_e) from tail to head. Anchored by tau = 0 on edge 0.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> theta(g.vertex_count(), nan);

    const EdgeSpec& base = g.edge(0);
    const VertexId anchor = base.tail != kNoVertex ? base.tail : base.head;
    // tau_0 = 0: theta at the anchor equals k_0 * offset(anchor on edge 0)
    theta[anchor] = g.endpoint_offset(anchor, 0) / std::sqrt(base.coeff_a);

    std::vector<VertexId> queue{anchor};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        const VertexId v = queue[qi];
        for (auto [e, sign] : g.incident_edges(v)) {
            const EdgeSpec& s = g.edge(e);
            if (!s.is_finite()) continue;
            const VertexId w = sign > 0 ? s.tail : s.head;
            const double increment = s.length / std::sqrt(s.coeff_a);
            const double theta_w = theta[v] - sign * increment;
            if (std::isnan(theta[w])) {
                theta[w] = theta_w;
                queue.push_back(w);
            } else if (!within_tol(theta[w] - theta_w,
                                   std::max(1.0, std::abs(theta[w])))) {
                std::ostringstream os;
                os << "shift of vertex " << w << " disagrees between paths: "
                   << theta[w] << " vs " << theta_w
                   << " (circuit length condition violated)";
                throw Error(ErrorCode::GluingMismatch, os.str());
            }
        }
    }

    std::vector<double> shifts(g.edge_count(), 0.0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec& s = g.edge(e);
        const VertexId v = s.tail != kNoVertex ? s.tail : s.head;
        // tau_e = sqrt(a_e) * theta(v) - offset(v on e)
        shifts[e] = std::sqrt(s.coeff_a) * theta[v] - g.endpoint_offset(v, e);
    }
    return shifts;
}

ConstructionResult construct_wave(const MetricGraph& g, double c0) {
    ConstructionResult result;

    if (!(c0 > 0.0) || !std::isfinite(c0)) {
        result.diagnostics.push_back(
            {ConditionId::StationaryOnly, edge_tag(0), 1.0,
             "base speed must be positive; a zero-speed wave is constant"});
        return result;
    }

    const DriftReduction reduced = reduce_d(g);

    auto coeff = check_coefficient_conditions(g);
    result.diagnostics.insert(result.diagnostics.end(), coeff.begin(), coeff.end());

    auto circ = check_circuits(reduced.graph);
    result.diagnostics.insert(result.diagnostics.end(), circ.begin(), circ.end());

    const std::vector<double> speeds = compute_speeds(reduced.graph, c0);

    auto kirchhoff = check_kirchhoff_sums(reduced.graph, speeds);
    result.diagnostics.insert(result.diagnostics.end(), kirchhoff.begin(),
                              kirchhoff.end());

    if (!result.diagnostics.empty()) {
        sort_diagnostics(result.diagnostics);
        return result;
    }

    TravellingWave wave;
    wave.base_speed = c0;
    wave.base_edge = 0;
    const EdgeSpec& base = g.edge(0);
    wave.root_vertex = base.tail != kNoVertex ? base.tail : base.head;
    wave.speeds = speeds;
    wave.shifts = compute_shifts(reduced.graph);
    wave.profiles.reserve(g.edge_count());
    wave.level_offsets.reserve(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        ProfileParams p;
        p.a = g.edge(e).coeff_a;
        p.b = g.edge(e).coeff_b;
        p.d = 0.0;
        p.c = speeds[e];
        p.A = 0.0;
        p.kind = ProfileKind::smooth;
        p.validate();
        wave.profiles.push_back(p);
        wave.level_offsets.push_back(-reduced.removed_offset[e]);
    }
    result.wave = std::move(wave);
    return result;
}

double evaluate_wave(const TravellingWave& w, EdgeId e, double x, double t) {
    const double y = x - w.speeds[e] * t + w.shifts[e];
    return profile_value(w.profiles[e], y) + w.level_offsets[e];
}

double evaluate_wave_dx(const TravellingWave& w, EdgeId e, double x, double t) {
    const double y = x - w.speeds[e] * t + w.shifts[e];
    return profile_derivative(w.profiles[e], y, 1);
}

WaveVerification verify_wave(const MetricGraph& g, const TravellingWave& w,
                             int sample_count, std::uint64_t seed) {
    WaveVerification report;
    std::mt19937_64 rng(seed);

    // sample times covering the passage of the peak through the network
    double min_kc = std::numeric_limits<double>::infinity();
    double max_span = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        min_kc = std::min(min_kc, w.wavenumber(e) * w.speeds[e]);
        if (g.edge(e).is_finite()) max_span = std::max(max_span, g.edge(e).length);
    }
    const double t_range = 10.0 / min_kc + max_span;
    std::uniform_real_distribution<double> time_dist(-t_range, t_range);

    for (int sample = 0; sample < sample_count; ++sample) {
        const double t = time_dist(rng);

        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            const auto& inc = g.incident_edges(v);
            if (inc.size() < 2) continue;
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            double flux = 0.0;
            for (auto [e, sign] : inc) {
                const double x = g.endpoint_offset(v, e);
                const double value = evaluate_wave(w, e, x, t);
                lo = std::min(lo, value);
                hi = std::max(hi, value);
                flux += sign * g.edge(e).coeff_a * evaluate_wave_dx(w, e, x, t);
            }
            report.max_continuity_gap = std::max(report.max_continuity_gap, hi - lo);
            report.max_kirchhoff_residual =
                std::max(report.max_kirchhoff_residual, std::abs(flux));
        }

        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            const EdgeSpec& s = g.edge(e);
            double x_lo = 0.0, x_hi = 0.0;
            if (s.is_finite()) {
                x_hi = s.length;
            } else if (s.infinite_end == InfiniteEnd::head) {
                x_hi = 40.0 / w.wavenumber(e);
            } else {
                x_lo = -40.0 / w.wavenumber(e);
            }
            std::uniform_real_distribution<double> x_dist(x_lo, x_hi);
            const double x = x_dist(rng);
            const double y = x - w.speeds[e] * t + w.shifts[e];
            const ProfileParams& p = w.profiles[e];
            const double phi = profile_value(p, y);
            const double d1 = profile_derivative(p, y, 1);
            const double d3 = profile_derivative(p, y, 3);
            const double u = phi + w.level_offsets[e];
            // u_t - a u_xxt + b u u_x + d u_x for u = phi(y) + offset
            const double residual = -w.speeds[e] * d1 + s.coeff_a * w.speeds[e] * d3 +
                                    s.coeff_b * u * d1 + s.coeff_d * d1;
            report.max_pde_residual = std::max(report.max_pde_residual,
                                               std::abs(residual));
        }
    }
    return report;
}

} // namespace bbmnet
