#include "bbmnet/wave_profile.hpp"

#include <cmath>
#include <string>

namespace bbmnet {

namespace {

constexpr double kDivergenceLimit = 1e12;

// Shared factors of the closed forms, written in terms of E = exp(-|u|)
// so that large |u| neither overflows nor cancels:
//   1 + cosh u = (1 + E)^2 / (2 E)
//   1 - cosh u = -(1 - E)^2 / (2 E)
//   sinh u     = sign(u) (1 - E^2) / (2 E)
struct Expo {
    double E;    // exp(-|u|)
    double omE;  // 1 - E, via expm1 for small |u|
    double s;    // sign(u)
};

Expo expo(double u) {
    Expo x;
    x.s = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
    x.E = std::exp(-std::abs(u));
    x.omE = -std::expm1(-std::abs(u));
    return x;
}

} // namespace

double ProfileParams::wavenumber() const {
    return std::sqrt(level_gap() / (a * c));
}

void ProfileParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw Error(ErrorCode::InvalidParams, "profile: a must be positive");
    }
    if (b == 0.0 || !std::isfinite(b)) {
        throw Error(ErrorCode::InvalidParams, "profile: b must be nonzero");
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::InvalidParams, "profile: wave speed c must be positive");
    }
    if (!(level_gap() > 0.0)) {
        throw Error(ErrorCode::InvalidParams,
                    "profile: requires c > d + b*A (level gap " +
                        std::to_string(level_gap()) + ")");
    }
}

double profile_value(const ProfileParams& p, double y) {
    p.validate();
    const double k = p.wavenumber();
    const double amp = p.amplitude();
    const Expo x = expo(k * y);
    if (p.kind == ProfileKind::smooth) {
        const double onePlusE = 1.0 + x.E;
        return p.A + amp * 2.0 * x.E / (onePlusE * onePlusE);
    }
    if (y == 0.0) {
        throw Error(ErrorCode::SingularAtZero, "singular profile is undefined at y = 0");
    }
    return p.A - amp * 2.0 * x.E / (x.omE * x.omE);
}

double profile_derivative(const ProfileParams& p, double y, int order) {
    p.validate();
    if (order < 1 || order > 3) {
        throw Error(ErrorCode::InvalidParams, "profile derivative order must be 1, 2 or 3");
    }
    const double k = p.wavenumber();
    const double amp = p.amplitude();
    const Expo x = expo(k * y);
    const double E = x.E;

    if (p.kind == ProfileKind::smooth) {
        const double q = 1.0 + E;
        switch (order) {
            case 1:
                return -amp * k * x.s * 2.0 * E * x.omE / (q * q * q);
            case 2:
                return -amp * k * k * 2.0 * E * (4.0 * E - 1.0 - E * E) / (q * q * q * q);
            default:
                return amp * k * k * k * x.s * 2.0 * E * x.omE *
                       (10.0 * E - 1.0 - E * E) / (q * q * q * q * q);
        }
    }

    if (y == 0.0) {
        throw Error(ErrorCode::SingularAtZero, "singular profile is undefined at y = 0");
    }
    const double q = x.omE;
    switch (order) {
        case 1:
            return amp * k * x.s * 2.0 * E * (1.0 + E) / (q * q * q);
        case 2:
            return -amp * k * k * 2.0 * E * (E * E + 4.0 * E + 1.0) / (q * q * q * q);
        default:
            return amp * k * k * k * x.s * 2.0 * E * (1.0 + E) *
                   (E * E + 10.0 * E + 1.0) / (q * q * q * q * q);
    }
}

double ode_residual(const ProfileParams& p, double y) {
    const double phi = profile_value(p, y);
    const double d1 = profile_derivative(p, y, 1);
    const double d3 = profile_derivative(p, y, 3);
    return p.a * p.c * d3 + p.b * phi * d1 + (p.d - p.c) * d1;
}

PhaseState phase_rhs(const ProfileParams& p, const PhaseState& s) {
    PhaseState out;
    out.phi = s.psi;
    out.psi = (p.A + (p.c - p.d) * s.phi - 0.5 * p.b * s.phi * s.phi) / (p.a * p.c);
    return out;
}

double hamiltonian(const ProfileParams& p, const PhaseState& s) {
    const double phi = s.phi;
    const double cubic =
        p.A * phi + 0.5 * (p.c - p.d) * phi * phi - p.b / 6.0 * phi * phi * phi;
    return 0.5 * s.psi * s.psi - cubic / (p.a * p.c);
}

StationaryPoints stationary_points(const ProfileParams& p) {
    StationaryPoints out;
    out.discriminant = (p.c - p.d) * (p.c - p.d) + 2.0 * p.A * p.b;
    if (out.discriminant <= 0.0) return out;
    const double root = std::sqrt(out.discriminant);
    out.saddle = PhaseState{(p.c - p.d - root) / p.b, 0.0};
    out.center = PhaseState{(p.c - p.d + root) / p.b, 0.0};
    return out;
}

PhaseState homoclinic_apex(const ProfileParams& p) {
    const StationaryPoints sp = stationary_points(p);
    if (!sp.saddle) {
        throw Error(ErrorCode::InvalidParams,
                    "homoclinic orbit needs a positive discriminant");
    }
    const double root = std::sqrt(sp.discriminant);
    return PhaseState{(p.c - p.d + 2.0 * root) / p.b, 0.0};
}

std::vector<OrbitPoint> integrate_orbit(const ProfileParams& p, PhaseState start,
                                        double span, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw Error(ErrorCode::InvalidParams, "orbit step must be positive");
    }
    if (!std::isfinite(start.phi) || !std::isfinite(start.psi)) {
        throw Error(ErrorCode::InvalidParams, "orbit start must be finite");
    }
    const double dir = span < 0.0 ? -1.0 : 1.0;
    const long n = std::lround(std::abs(span) / step);
    const double h = dir * step;

    std::vector<OrbitPoint> out;
    out.reserve(static_cast<size_t>(n) + 1);
    PhaseState s = start;
    out.push_back({0.0, s, hamiltonian(p, s)});
    for (long i = 1; i <= n; ++i) {
        const PhaseState k1 = phase_rhs(p, s);
        const PhaseState s2{s.phi + 0.5 * h * k1.phi, s.psi + 0.5 * h * k1.psi};
        const PhaseState k2 = phase_rhs(p, s2);
        const PhaseState s3{s.phi + 0.5 * h * k2.phi, s.psi + 0.5 * h * k2.psi};
        const PhaseState k3 = phase_rhs(p, s3);
        const PhaseState s4{s.phi + h * k3.phi, s.psi + h * k3.psi};
        const PhaseState k4 = phase_rhs(p, s4);
        s.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
        s.psi += h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
        if (!std::isfinite(s.phi) || !std::isfinite(s.psi) ||
            std::abs(s.phi) > kDivergenceLimit || std::abs(s.psi) > kDivergenceLimit) {
            throw Error(ErrorCode::Diverged,
                        "orbit diverged at y = " + std::to_string(i * h));
        }
        out.push_back({static_cast<double>(i) * h, s, hamiltonian(p, s)});
    }
    return out;
}

} // namespace bbmnet
