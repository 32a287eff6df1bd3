#pragma once

#include "bbmnet/metric_graph.hpp"
#include "bbmnet/wave_profile.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bbmnet {

// Checks use relative tolerance 1e-9 with an absolute floor of 1e-12:
// a residual passes when |r| <= max(kAbsTol, kRelTol * scale).
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

enum class ConditionId {
    SinkOrSource,
    KirchhoffSum,
    CoefficientRatio,
    KirchhoffCoefficientSum,
    DirectedCircuit,
    CircuitLengthMismatch,
    StationaryOnly,
    DiscriminantNonpositive,
};

const char* to_string(ConditionId id);

// One violated compatibility condition. Violations are data, not errors:
// a graph that admits no travelling wave is a legitimate answer.
struct Diagnostic {
    ConditionId condition;
    std::string location; // "v3", "e1", "cycle(+0,+1,-2,-3)"
    double residual = 0.0;
    std::string message;
};

// Result of zeroing the drift coefficients: u solves the original system
// iff u + d_i/b_i solves the reduced one, so the wave of the original
// system is the reduced wave minus d_i/b_i on each edge.
struct DriftReduction {
    MetricGraph graph;                  // same edges with d_i = 0
    std::vector<double> removed_offset; // d_i / b_i per edge
};

// Travelling solitary wave on the whole network: a per-edge shifted copy
// of one profile family. On edge i the solution is
//   u_i(x, t) = phi_i(x - c_i t + tau_i) + level_offset_i
// with phi_i the smooth profile of ProfileParams profiles[i].
struct TravellingWave {
    double base_speed = 1.0;  // c_0, carried by the lowest-index edge
    EdgeId base_edge = 0;
    VertexId root_vertex = 0; // anchor of the shift recursion
    std::vector<double> speeds;
    std::vector<double> shifts;
    std::vector<ProfileParams> profiles;    // d = 0, A = 0, smooth
    std::vector<double> level_offsets;      // -d_i / b_i from the reduction

    double amplitude(EdgeId e) const { return profiles[e].amplitude(); }
    double wavenumber(EdgeId e) const { return profiles[e].wavenumber(); }
};

struct ConstructionResult {
    std::optional<TravellingWave> wave;   // set iff diagnostics is empty
    std::vector<Diagnostic> diagnostics;  // sorted by (condition, location)

    bool ok() const { return wave.has_value(); }
};

struct WaveVerification {
    double max_continuity_gap = 0.0;   // value mismatch at ramification vertices
    double max_kirchhoff_residual = 0.0; // flux sum of a_j * du/dx at vertices
    double max_pde_residual = 0.0;     // per-edge equation residual
};

/// Zero the drift coefficients and record the removed offsets d_i/b_i.
DriftReduction reduce_d(const MetricGraph& g);

/// Vertex-local coefficient conditions: at every ramification vertex and
/// every pair of incident edges, sqrt(a_i/a_j) must equal b_i/b_j (> 0)
/// and d_i/b_i must agree (so the drift reduction respects continuity);
/// at every ramification vertex the signed sum of the b_i must vanish.
std::vector<Diagnostic> check_coefficient_conditions(const MetricGraph& g);

/// Circuit conditions: no directed circuit may exist, and around every
/// cycle of a fundamental basis the signed sum of l_i / sqrt(a_i) must
/// vanish. Linearity over the cycle space extends the basis check to
/// every circuit.
std::vector<Diagnostic> check_circuits(const MetricGraph& g);

/// Propagation speeds c_i = sqrt(a_i / a_j) c_j spread breadth-first from
/// edge 0 with speed c0. Path products telescope, so revisits can only
/// disagree by roundoff; beyond tolerance they raise InconsistentSpeeds.
std::vector<double> compute_speeds(const MetricGraph& g, double c0);

/// Kirchhoff flux compatibility: at every ramification vertex the signed
/// sum of a_j / c_j must vanish. A vertex whose incident signs all agree
/// is reported as SinkOrSource instead.
std::vector<Diagnostic> check_kirchhoff_sums(const MetricGraph& g,
                                             const std::vector<double>& speeds);

/// Shifts tau_i with tau = 0 on edge 0, determined by requiring the
/// profile arguments to match at every vertex: with k_i = 1/sqrt(a_i),
/// the vertex value theta(v) = k_i (offset_of_v_on_i + tau_i) is shared
/// by all incident edges, which gives tau_i = sqrt(a_i/a_j)(tau_j + l_j)
/// across a vertex fed by edge j. Computed on the spanning tree and
/// re-derived across every non-tree edge; disagreement beyond tolerance
/// raises GluingMismatch.
std::vector<double> compute_shifts(const MetricGraph& g);

/// Full decision procedure: drift reduction, coefficient checks, circuit
/// checks, speeds, Kirchhoff sums, shifts. Returns either the wave or
/// every violated condition, never a partial wave.
ConstructionResult construct_wave(const MetricGraph& g, double c0 = 1.0);

/// Value of the wave on edge e at coordinate x and time t.
double evaluate_wave(const TravellingWave& w, EdgeId e, double x, double t);

/// Spatial derivative of the wave on edge e at (x, t).
double evaluate_wave_dx(const TravellingWave& w, EdgeId e, double x, double t);

/// Numerical spot-check of a constructed wave: samples random times and
/// positions (seeded, reproducible) and reports the worst continuity gap,
/// Kirchhoff flux residual and pointwise PDE residual of the original
/// system, drift terms included.
WaveVerification verify_wave(const MetricGraph& g, const TravellingWave& w,
                             int sample_count, std::uint64_t seed = 0x5eed5eedULL);

} // namespace bbmnet
