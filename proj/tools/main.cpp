// bbmnet: decide, construct, sample and simulate travelling solitary waves
// of the BBM system on an oriented metric network.

#include "bbmnet/bbm_simulator.hpp"
#include "bbmnet/csv.hpp"
#include "bbmnet/metric_graph.hpp"
#include "bbmnet/network_file.hpp"
#include "bbmnet/wave_constructor.hpp"
#include "bbmnet/wave_profile.hpp"

#include <CLI11.hpp>

#include <clocale>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace bbmnet;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitParseError = 2;
constexpr int kExitIoError = 3;

// Writes to --out when given, otherwise to stdout.
void deliver(const std::optional<std::string>& out_path, const std::string& payload) {
    if (!out_path) {
        std::cout << payload;
        return;
    }
    std::ofstream out(*out_path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + *out_path + "' for writing");
    }
    out << payload;
}

std::string diagnostics_csv(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    os << "condition,location,residual\n";
    for (const Diagnostic& d : diags) {
        os << to_string(d.condition) << "," << d.location << ","
           << format_double(d.residual) << "\n";
    }
    return os.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
    std::cout << "fail: " << diags.size() << " diagnostic"
              << (diags.size() == 1 ? "" : "s") << "\n";
    for (const Diagnostic& d : diags) {
        std::cout << "  " << to_string(d.condition) << " " << d.location
                  << " residual=" << format_double(d.residual) << " " << d.message
                  << "\n";
    }
}

int cmd_check(const std::string& file, const std::optional<std::string>& out_path) {
    const ParsedNetwork net = parse_network_file(file);
    const ConstructionResult result = construct_wave(net.graph, net.base_speed);
    if (out_path) {
        deliver(out_path, diagnostics_csv(result.diagnostics));
    }
    if (result.ok()) {
        std::cout << "pass: network admits a travelling solitary wave"
                     " (0 diagnostics)\n";
        return kExitOk;
    }
    print_diagnostics(result.diagnostics);
    return kExitDiagnostics;
}

int cmd_construct(const std::string& file, std::optional<double> c0_flag,
                  const std::optional<std::string>& out_path) {
    const ParsedNetwork net = parse_network_file(file);
    const double c0 = c0_flag.value_or(net.base_speed);
    const ConstructionResult result = construct_wave(net.graph, c0);
    if (!result.ok()) {
        print_diagnostics(result.diagnostics);
        if (out_path) deliver(out_path, diagnostics_csv(result.diagnostics));
        return kExitDiagnostics;
    }
    const TravellingWave& wave = *result.wave;
    const WaveVerification check = verify_wave(net.graph, wave, 50);

    std::ostringstream os;
    os << "edge,speed,shift,amplitude,wavenumber,level_offset\n";
    for (EdgeId e = 0; e < net.graph.edge_count(); ++e) {
        os << e << "," << format_double(wave.speeds[e]) << ","
           << format_double(wave.shifts[e]) << ","
           << format_double(wave.amplitude(e)) << ","
           << format_double(wave.wavenumber(e)) << ","
           << format_double(wave.level_offsets[e]) << "\n";
    }
    os << "# max_continuity_gap=" << format_double(check.max_continuity_gap) << "\n";
    os << "# max_kirchhoff_residual=" << format_double(check.max_kirchhoff_residual)
       << "\n";
    os << "# max_pde_residual=" << format_double(check.max_pde_residual) << "\n";
    deliver(out_path, os.str());
    return kExitOk;
}

int cmd_sample(const std::string& file, std::optional<double> c0_flag,
               const std::string& times_arg, int points_per_edge,
               const std::optional<std::string>& out_path) {
    const ParsedNetwork net = parse_network_file(file);
    const double c0 = c0_flag.value_or(net.base_speed);
    const ConstructionResult result = construct_wave(net.graph, c0);
    if (!result.ok()) {
        print_diagnostics(result.diagnostics);
        return kExitDiagnostics;
    }
    const TravellingWave& wave = *result.wave;

    std::vector<double> times;
    std::stringstream ts(times_arg);
    std::string item;
    while (std::getline(ts, item, ',')) {
        if (item.empty()) continue;
        try {
            size_t used = 0;
            times.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad time value '" + item + "'");
        }
    }
    if (times.empty()) {
        throw Error(ErrorCode::ParseError, "--times needs at least one value");
    }
    if (points_per_edge < 2) {
        throw Error(ErrorCode::ParseError, "--points-per-edge must be at least 2");
    }

    std::ostringstream os;
    os << "t,edge,x,u\n";
    for (double t : times) {
        for (EdgeId e = 0; e < net.graph.edge_count(); ++e) {
            const EdgeSpec& spec = net.graph.edge(e);
            double x_lo = 0.0, x_hi = spec.length;
            if (spec.infinite_end == InfiniteEnd::head) {
                x_hi = 40.0 / wave.wavenumber(e);
            } else if (spec.infinite_end == InfiniteEnd::tail) {
                x_lo = -40.0 / wave.wavenumber(e);
                x_hi = 0.0;
            }
            for (int i = 0; i < points_per_edge; ++i) {
                const double x =
                    x_lo + (x_hi - x_lo) * static_cast<double>(i) / (points_per_edge - 1);
                os << format_double(t) << "," << e << "," << format_double(x) << ","
                   << format_double(evaluate_wave(wave, e, x, t)) << "\n";
            }
        }
    }
    deliver(out_path, os.str());
    return kExitOk;
}

int cmd_simulate(const std::string& file, std::optional<double> c0_flag, double h,
                 double dt, double duration, double t0,
                 const std::optional<std::string>& out_path) {
    const ParsedNetwork net = parse_network_file(file);
    const double c0 = c0_flag.value_or(net.base_speed);
    const ConstructionResult result = construct_wave(net.graph, c0);
    if (!result.ok()) {
        print_diagnostics(result.diagnostics);
        return kExitDiagnostics;
    }
    const TravellingWave& wave = *result.wave;

    SimConfig cfg;
    cfg.grid_spacing = h;
    cfg.time_step = dt;

    NetworkSimulation sim = NetworkSimulation::from_wave(net.graph, wave, cfg, t0);
    const long steps = std::max<long>(1, std::lround(duration / sim.dt()));
    const long snapshots = 10;

    DeviationReport report;
    std::ostringstream os;
    os << "t,edge,x,u\n";
    auto emit_snapshot = [&]() {
        for (EdgeId e = 0; e < net.graph.edge_count(); ++e) {
            for (int i = 0; i < sim.node_count(e); ++i) {
                os << format_double(sim.time()) << "," << e << ","
                   << format_double(sim.node_coordinate(e, i)) << ","
                   << format_double(sim.value(e, i)) << "\n";
            }
        }
    };

    report.history.push_back(sim.deviation_from(wave));
    emit_snapshot();
    for (long i = 1; i <= steps; ++i) {
        sim.step();
        report.history.push_back(sim.deviation_from(wave));
        if (i % std::max<long>(1, steps / snapshots) == 0 || i == steps) {
            emit_snapshot();
        }
    }
    for (const DeviationSample& sample : report.history) {
        report.max_linf = std::max(report.max_linf, sample.linf);
        report.max_l2 = std::max(report.max_l2, sample.l2);
    }
    report.final_linf = report.history.back().linf;
    report.final_l2 = report.history.back().l2;

    deliver(out_path, os.str());
    std::cout << "# final_linf=" << format_double(report.final_linf) << "\n"
              << "# final_l2=" << format_double(report.final_l2) << "\n"
              << "# max_linf=" << format_double(report.max_linf) << "\n"
              << "# max_l2=" << format_double(report.max_l2) << "\n"
              << "# closure=" << report.closure << "\n";
    return kExitOk;
}

int cmd_phase(double a, double b, double c, double d, double A, bool homoclinic,
              std::optional<double> start_phi, std::optional<double> start_psi,
              double span, double step, const std::optional<std::string>& out_path) {
    ProfileParams params;
    params.a = a;
    params.b = b;
    params.c = c;
    params.d = d;
    params.A = A;

    PhaseState start;
    if (homoclinic) {
        const StationaryPoints sp = stationary_points(params);
        if (!sp.saddle) {
            std::cout << "fail: 1 diagnostic\n  "
                      << to_string(ConditionId::DiscriminantNonpositive)
                      << " phase residual=" << format_double(-sp.discriminant)
                      << " no homoclinic orbit: (c-d)^2 + 2Ab <= 0\n";
            return kExitDiagnostics;
        }
        start = homoclinic_apex(params);
    } else {
        start.phi = start_phi.value_or(0.0);
        start.psi = start_psi.value_or(0.0);
    }

    // backward half first so rows come out ordered by increasing y
    std::vector<OrbitPoint> rows;
    try {
        std::vector<OrbitPoint> back = integrate_orbit(params, start, -span, step);
        rows.assign(back.rbegin(), back.rend());
        std::vector<OrbitPoint> fwd = integrate_orbit(params, start, span, step);
        rows.insert(rows.end(), fwd.begin() + 1, fwd.end());
    } catch (const Error& err) {
        if (err.code() != ErrorCode::Diverged) throw;
        std::cout << "fail: 1 diagnostic\n  Diverged phase residual=inf " << err.what()
                  << "\n";
        return kExitDiagnostics;
    }

    std::ostringstream os;
    os << "y,phi,psi,H\n";
    for (const OrbitPoint& pt : rows) {
        os << format_double(pt.y) << "," << format_double(pt.state.phi) << ","
           << format_double(pt.state.psi) << "," << format_double(pt.hamiltonian)
           << "\n";
    }
    deliver(out_path, os.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"Travelling solitary waves of the BBM system on metric networks"};
    // --h is a grid-spacing option below, so help must not claim -h
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    std::string file;
    std::optional<double> c0;
    std::optional<std::string> out_path;

    auto* check = app.add_subcommand("check", "Check the wave compatibility conditions");
    check->add_option("file", file, "network description file")->required();
    check->add_option("--out", out_path, "write the diagnostics CSV here");

    auto* construct =
        app.add_subcommand("construct", "Construct the travelling wave table");
    construct->add_option("file", file)->required();
    construct->add_option("--c0", c0, "base speed (default: file base_speed)");
    construct->add_option("--out", out_path, "write the wave CSV here");

    std::string times = "0";
    int points_per_edge = 101;
    auto* sample = app.add_subcommand("sample", "Sample the wave over the network");
    sample->add_option("file", file)->required();
    sample->add_option("--c0", c0);
    sample->add_option("--times", times, "comma-separated sample times");
    sample->add_option("--points-per-edge", points_per_edge, "samples per edge");
    sample->add_option("--out", out_path, "write the sample CSV here");

    double h = 0.05, dt = 0.0, duration = 1.0, t0 = 0.0;
    auto* simulate = app.add_subcommand("simulate", "Time-step the network system");
    simulate->add_option("file", file)->required();
    simulate->add_option("--c0", c0);
    simulate->add_option("--h", h, "grid spacing");
    simulate->add_option("--dt", dt, "time step (default h / (2 max c))");
    simulate->add_option("--T", duration, "duration");
    simulate->add_option("--t0", t0, "initial time");
    simulate->add_option("--out", out_path, "write snapshot CSV here");

    double pa = 1.0, pb = 1.0, pc = 1.0, pd = 0.0, pA = 0.0;
    double span = 20.0, step = 1e-3;
    bool homoclinic = false;
    std::optional<double> start_phi, start_psi;
    auto* phase = app.add_subcommand("phase", "Integrate the phase-plane system");
    phase->add_option("--a", pa);
    phase->add_option("--b", pb);
    phase->add_option("--c", pc);
    phase->add_option("--d", pd);
    phase->add_option("--A", pA);
    phase->add_flag("--homoclinic", homoclinic, "start from the homoclinic apex");
    phase->add_option("--start-phi", start_phi);
    phase->add_option("--start-psi", start_psi);
    phase->add_option("--span", span, "integrate y in [-span, span]");
    phase->add_option("--step", step, "Runge-Kutta step");
    phase->add_option("--out", out_path, "write the trajectory CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitParseError;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(file, out_path);
        if (app.got_subcommand(construct)) return cmd_construct(file, c0, out_path);
        if (app.got_subcommand(sample)) {
            return cmd_sample(file, c0, times, points_per_edge, out_path);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(file, c0, h, dt, duration, t0, out_path);
        }
        if (app.got_subcommand(phase)) {
            return cmd_phase(pa, pb, pc, pd, pA, homoclinic, start_phi, start_psi,
                             span, step, out_path);
        }
    } catch (const Error& err) {
        std::cerr << "error (" << to_string(err.code()) << "): " << err.what() << "\n";
        switch (err.code()) {
            case ErrorCode::ParseError: return kExitParseError;
            case ErrorCode::IoError: return kExitIoError;
            default: return kExitDiagnostics;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitDiagnostics;
    }
    return kExitOk;
}
