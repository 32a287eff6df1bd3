#include "bbmnet/bbm_simulator.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace bbmnet {

namespace {

struct EdgeGrid {
    double x0 = 0.0; // coordinate of node 0
    double h = 0.0;
    int nodes = 0;
    std::vector<int> global; // unknown index per node
    bool tail_is_vertex = true;
    bool head_is_vertex = true;
};

} // namespace

struct NetworkSimulation::Impl {
    MetricGraph graph;
    SimConfig cfg;
    double t = 0.0;
    double dt = 0.0;
    std::vector<EdgeGrid> grids;
    int n_unknowns = 0;
    Eigen::VectorXd u;
    Eigen::SparseMatrix<double> matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    double last_flux_residual = 0.0;

    explicit Impl(MetricGraph g) : graph(std::move(g)) {}

    void build_grids(const TravellingWave* wave);
    void assemble();
    Eigen::VectorXd stage_rate(const Eigen::VectorXd& state);
    double flux_residual(const Eigen::VectorXd& rate) const;
};

void NetworkSimulation::Impl::build_grids(const TravellingWave* wave) {
    const int edge_count = graph.edge_count();
    grids.assign(edge_count, {});
    n_unknowns = graph.vertex_count(); // vertices take the first unknowns

    for (EdgeId e = 0; e < edge_count; ++e) {
        const EdgeSpec& spec = graph.edge(e);
        EdgeGrid& grid = grids[e];

        double length = spec.length;
        grid.x0 = 0.0;
        grid.tail_is_vertex = spec.tail != kNoVertex;
        grid.head_is_vertex = spec.head != kNoVertex;
        if (!spec.is_finite()) {
            if (wave == nullptr) {
                throw Error(ErrorCode::BadLength,
                            "cannot truncate a half-infinite edge without a wave");
            }
            length = cfg.truncation_halfwidths / wave->wavenumber(e);
            if (spec.infinite_end == InfiniteEnd::tail) grid.x0 = -length;
        }

        const int intervals =
            std::max<long>(4, std::lround(length / cfg.grid_spacing));
        grid.h = length / intervals;
        grid.nodes = intervals + 1;

        if (wave != nullptr) {
            const double nodes_per_halfwidth = 1.0 / (wave->wavenumber(e) * grid.h);
            if (nodes_per_halfwidth < cfg.min_nodes_per_halfwidth) {
                throw Error(ErrorCode::GridTooCoarse,
                            "edge " + std::to_string(e) + " resolves a half-width with " +
                                std::to_string(nodes_per_halfwidth) + " nodes, need " +
                                std::to_string(cfg.min_nodes_per_halfwidth));
            }
        }

        grid.global.assign(grid.nodes, -1);
        grid.global.front() =
            grid.tail_is_vertex ? spec.tail : n_unknowns++;
        grid.global.back() =
            grid.head_is_vertex ? spec.head : n_unknowns++;
        for (int i = 1; i + 1 < grid.nodes; ++i) grid.global[i] = n_unknowns++;
    }
}

void NetworkSimulation::Impl::assemble() {
    std::vector<Eigen::Triplet<double>> triplets;

    // vertex rows
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        const auto& inc = graph.incident_edges(v);
        if (inc.size() < 2) {
            triplets.emplace_back(v, v, 1.0); // Dirichlet on du/dt
            continue;
        }
        for (auto [e, sign] : inc) {
            const EdgeGrid& grid = grids[e];
            const double a = graph.edge(e).coeff_a;
            const double w = sign * a / (2.0 * grid.h);
            if (sign > 0) { // head end: backward one-sided derivative
                const int n = grid.nodes - 1;
                triplets.emplace_back(v, grid.global[n], 3.0 * w);
                triplets.emplace_back(v, grid.global[n - 1], -4.0 * w);
                triplets.emplace_back(v, grid.global[n - 2], 1.0 * w);
            } else { // tail end: forward one-sided derivative
                triplets.emplace_back(v, grid.global[0], -3.0 * w);
                triplets.emplace_back(v, grid.global[1], 4.0 * w);
                triplets.emplace_back(v, grid.global[2], -1.0 * w);
            }
        }
    }

    // truncated ends and interiors
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const EdgeGrid& grid = grids[e];
        const double a = graph.edge(e).coeff_a;
        const double ah2 = a / (grid.h * grid.h);
        if (!grid.tail_is_vertex) {
            triplets.emplace_back(grid.global.front(), grid.global.front(), 1.0);
        }
        if (!grid.head_is_vertex) {
            triplets.emplace_back(grid.global.back(), grid.global.back(), 1.0);
        }
        for (int i = 1; i + 1 < grid.nodes; ++i) {
            const int row = grid.global[i];
            triplets.emplace_back(row, grid.global[i - 1], -ah2);
            triplets.emplace_back(row, row, 1.0 + 2.0 * ah2);
            triplets.emplace_back(row, grid.global[i + 1], -ah2);
        }
    }

    matrix.resize(n_unknowns, n_unknowns);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    matrix.makeCompressed();
    solver.compute(matrix);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverSingular, "stage matrix factorisation failed");
    }
}

Eigen::VectorXd NetworkSimulation::Impl::stage_rate(const Eigen::VectorXd& state) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknowns);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const EdgeGrid& grid = grids[e];
        const EdgeSpec& spec = graph.edge(e);
        const double inv2h = 1.0 / (2.0 * grid.h);
        for (int i = 1; i + 1 < grid.nodes; ++i) {
            const double ui = state[grid.global[i]];
            const double slope =
                (state[grid.global[i + 1]] - state[grid.global[i - 1]]) * inv2h;
            rhs[grid.global[i]] = -(spec.coeff_b * ui + spec.coeff_d) * slope;
        }
    }
    Eigen::VectorXd rate = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverSingular, "stage solve failed");
    }
    last_flux_residual = std::max(last_flux_residual, flux_residual(rate));
    return rate;
}

double NetworkSimulation::Impl::flux_residual(const Eigen::VectorXd& rate) const {
    double worst = 0.0;
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        const auto& inc = graph.incident_edges(v);
        if (inc.size() < 2) continue;
        double flux = 0.0;
        for (auto [e, sign] : inc) {
            const EdgeGrid& grid = grids[e];
            const double a = graph.edge(e).coeff_a;
            double deriv;
            if (sign > 0) {
                const int n = grid.nodes - 1;
                deriv = (3.0 * rate[grid.global[n]] - 4.0 * rate[grid.global[n - 1]] +
                         rate[grid.global[n - 2]]) /
                        (2.0 * grid.h);
            } else {
                deriv = (-3.0 * rate[grid.global[0]] + 4.0 * rate[grid.global[1]] -
                         rate[grid.global[2]]) /
                        (2.0 * grid.h);
            }
            flux += sign * a * deriv;
        }
        worst = std::max(worst, std::abs(flux));
    }
    return worst;
}

NetworkSimulation::NetworkSimulation() = default;
NetworkSimulation::NetworkSimulation(NetworkSimulation&&) noexcept = default;
NetworkSimulation& NetworkSimulation::operator=(NetworkSimulation&&) noexcept = default;
NetworkSimulation::~NetworkSimulation() = default;

NetworkSimulation NetworkSimulation::from_wave(const MetricGraph& g,
                                               const TravellingWave& w,
                                               const SimConfig& cfg, double t0) {
    NetworkSimulation sim;
    sim.impl_ = std::make_unique<Impl>(g);
    Impl& impl = *sim.impl_;
    impl.cfg = cfg;
    impl.t = t0;
    impl.build_grids(&w);
    impl.assemble();

    if (cfg.time_step > 0.0) {
        impl.dt = cfg.time_step;
    } else {
        double max_speed = 0.0;
        for (double c : w.speeds) max_speed = std::max(max_speed, c);
        impl.dt = cfg.grid_spacing / (2.0 * max_speed);
    }

    impl.u.resize(impl.n_unknowns);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeGrid& grid = impl.grids[e];
        for (int i = 0; i < grid.nodes; ++i) {
            impl.u[grid.global[i]] = evaluate_wave(w, e, grid.x0 + i * grid.h, t0);
        }
    }
    return sim;
}

NetworkSimulation NetworkSimulation::from_initial(
    const MetricGraph& g, const SimConfig& cfg,
    const std::function<double(EdgeId, double)>& u0, double t0) {
    NetworkSimulation sim;
    sim.impl_ = std::make_unique<Impl>(g);
    Impl& impl = *sim.impl_;
    impl.cfg = cfg;
    impl.t = t0;
    impl.build_grids(nullptr);
    impl.assemble();
    if (!(cfg.time_step > 0.0)) {
        throw Error(ErrorCode::InvalidParams,
                    "an explicit time_step is required without a wave");
    }
    impl.dt = cfg.time_step;
    impl.u.resize(impl.n_unknowns);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeGrid& grid = impl.grids[e];
        for (int i = 0; i < grid.nodes; ++i) {
            impl.u[grid.global[i]] = u0(e, grid.x0 + i * grid.h);
        }
    }
    return sim;
}

double NetworkSimulation::time() const { return impl_->t; }
double NetworkSimulation::dt() const { return impl_->dt; }
int NetworkSimulation::total_nodes() const {
    int count = 0;
    for (const EdgeGrid& grid : impl_->grids) count += grid.nodes;
    return count;
}

int NetworkSimulation::node_count(EdgeId e) const { return impl_->grids[e].nodes; }

double NetworkSimulation::node_coordinate(EdgeId e, int i) const {
    const EdgeGrid& grid = impl_->grids[e];
    return grid.x0 + i * grid.h;
}

double NetworkSimulation::value(EdgeId e, int i) const {
    return impl_->u[impl_->grids[e].global[i]];
}

void NetworkSimulation::step() {
    Impl& impl = *impl_;
    impl.last_flux_residual = 0.0;
    const double h = impl.dt;
    const Eigen::VectorXd& u = impl.u;

    const Eigen::VectorXd k1 = impl.stage_rate(u);
    const Eigen::VectorXd k2 = impl.stage_rate(u + 0.5 * h * k1);
    const Eigen::VectorXd k3 = impl.stage_rate(u + 0.5 * h * k2);
    const Eigen::VectorXd k4 = impl.stage_rate(u + h * k3);

    const double before = impl.u.lpNorm<Eigen::Infinity>();
    impl.u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    impl.t += h;

    const double after = impl.u.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(after) || after > std::max(1.0, before) * 1e6) {
        throw Error(ErrorCode::Unstable,
                    "solution norm grew from " + std::to_string(before) + " to " +
                        std::to_string(after) + " in one step");
    }
}

double NetworkSimulation::last_stage_flux_residual() const {
    return impl_->last_flux_residual;
}

double NetworkSimulation::total_integral() const {
    const Impl& impl = *impl_;
    double total = 0.0;
    for (const EdgeGrid& grid : impl.grids) {
        double acc = 0.5 * (impl.u[grid.global.front()] + impl.u[grid.global.back()]);
        for (int i = 1; i + 1 < grid.nodes; ++i) acc += impl.u[grid.global[i]];
        total += acc * grid.h;
    }
    return total;
}

DeviationSample NetworkSimulation::deviation_from(const TravellingWave& w) const {
    const Impl& impl = *impl_;
    DeviationSample out;
    out.t = impl.t;
    double l2sq = 0.0;
    for (EdgeId e = 0; e < impl.graph.edge_count(); ++e) {
        const EdgeGrid& grid = impl.grids[e];
        for (int i = 0; i < grid.nodes; ++i) {
            const double x = grid.x0 + i * grid.h;
            const double gap = impl.u[grid.global[i]] - evaluate_wave(w, e, x, impl.t);
            out.linf = std::max(out.linf, std::abs(gap));
            const double weight = (i == 0 || i + 1 == grid.nodes) ? 0.5 : 1.0;
            l2sq += weight * gap * gap * grid.h;
        }
    }
    out.l2 = std::sqrt(l2sq);
    return out;
}

DeviationReport run_and_compare(const MetricGraph& g, const TravellingWave& w,
                                const SimConfig& cfg, double t0, double duration) {
    NetworkSimulation sim = NetworkSimulation::from_wave(g, w, cfg, t0);
    const long steps = std::max<long>(1, std::lround(duration / sim.dt()));

    DeviationReport report;
    report.history.push_back(sim.deviation_from(w));
    for (long i = 0; i < steps; ++i) {
        sim.step();
        report.history.push_back(sim.deviation_from(w));
    }
    for (const DeviationSample& sample : report.history) {
        report.max_linf = std::max(report.max_linf, sample.linf);
        report.max_l2 = std::max(report.max_l2, sample.l2);
    }
    report.final_linf = report.history.back().linf;
    report.final_l2 = report.history.back().l2;
    return report;
}

} // namespace bbmnet
