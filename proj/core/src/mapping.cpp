#include "natanzon/mapping.hpp"

#include "natanzon/errors.hpp"
#include "natanzon/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace natanzon {

void ConfluentSpec::validate() const {
    for (double v : {lambda0, lambda1, lambda2, sigma_beta, sigma_q0, sigma_c})
        if (!std::isfinite(v)) throw DomainError(Stage::mapping, "non-finite family parameter");
    if (lambda0 == 0.0 && lambda1 == 0.0 && lambda2 == 0.0)
        throw DomainError(Stage::mapping, "lambda0, lambda1, lambda2 all zero");
}

MappingStart default_start(Interval domain) { return {0.5 * (domain.lo + domain.hi), 1.0, +1}; }

namespace {

// Point (u, xi) lies strictly inside the region where the mapping equation
// is regular.
bool regular_point(const ConfluentSpec& spec, const MassProfile& mass, double u, double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) return false;
    const double R = spec.R(xi);
    if (!(R > 0.0)) return false;
    const double m = mass.value(u);
    if (!(m > 0.0) || !std::isfinite(m)) return false;
    const double s = 4.0 * xi * xi / R;
    const double g = 8.0 * m / R;
    return std::isfinite(s) && s <= kMappingBlowup && g <= kMappingBlowup;
}

// d(log xi)/du. NaN outside the regular region.
double log_rate(const ConfluentSpec& spec, const MassProfile& mass, int branch, double u, double y) {
    const double xi = std::exp(y);
    if (!regular_point(spec, mass, u, xi)) return std::nan("");
    return branch * std::sqrt(8.0 * mass.value(u) / spec.R(xi));
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class LogMappingStepper {
public:
    LogMappingStepper(const ConfluentSpec& spec, const MassProfile& mass, int branch, MappingTolerance tol)
        : spec_(spec), mass_(mass), branch_(branch), tol_(tol) {}

    // Advances (u, y) to `target`. Returns false if the solution leaves the
    // regular region first; (u, y) then holds the last accepted state.
    bool advance(double& u, double& y, double target, double& h) {
        const double dir = target > u ? 1.0 : -1.0;
        if (h == 0.0 || std::isnan(h)) {
            const double rate = std::abs(log_rate(spec_, mass_, branch_, u, y));
            h = 0.05 / std::max(rate, 1e-12);
        }
        h = std::abs(h);
        double k1 = log_rate(spec_, mass_, branch_, u, y);
        while (dir * (target - u) > 0.0) {
            const double remaining = std::abs(target - u);
            const bool last = h >= remaining;
            const double step = dir * (last ? remaining : h);
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(u))) {
                if (last) {
                    u = target;
                    break;
                }
                return false;
            }
            double err = 0.0;
            double y_new = 0.0;
            double k7 = 0.0;
            if (!try_step(u, y, step, k1, y_new, k7, err)) {
                h = 0.25 * std::abs(step);
                continue;
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                u = last ? target : u + step;
                y = y_new;
                k1 = k7;
                h = std::abs(step) * factor;
                if (last) h = std::max(h, std::abs(step));
            } else {
                h = std::abs(step) * factor;
            }
        }
        return true;
    }

private:
    bool try_step(double u, double y, double h, double k1, double& y_new, double& k7, double& err) const {
        auto f = [&](double uu, double yy) { return log_rate(spec_, mass_, branch_, uu, yy); };
        const double k2 = f(u + c2 * h, y + h * (a21 * k1));
        const double k3 = f(u + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const double k4 = f(u + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(u + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = f(u + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(u + h, y_new);
        const double est = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        if (!std::isfinite(y_new) || !std::isfinite(k7) || !std::isfinite(est)) return false;
        // y is log(xi): its absolute error is the relative error of xi.
        err = std::abs(est) / (tol_.atol + tol_.rtol);
        return true;
    }

    const ConfluentSpec& spec_;
    const MassProfile& mass_;
    int branch_;
    MappingTolerance tol_;
};

void push_node(MappingSolution& sol, const ConfluentSpec& spec, const MassProfile& mass, double u, double xi) {
    const auto d = mapping_derivatives(spec, mass, u, xi, sol.branch);
    sol.u.push_back(u);
    sol.xi.push_back(xi);
    sol.d1.push_back(d.d1);
    sol.d2.push_back(d.d2);
    sol.d3.push_back(d.d3);
}

void check_span(const MappingSolution& sol) {
    if (sol.u.size() < 2 || sol.domain().span() < 0.01 * sol.requested.span())
        throw DomainError(Stage::mapping, "mapping leaves the regular region within 1% of the requested span");
}

}  // namespace

MappingDerivatives mapping_derivatives(const ConfluentSpec& spec, const MassProfile& mass, double u,
                                       double xi, int branch) {
    const double m = mass.value(u);
    const double dm = mass.d1(u);
    const double d2m = mass.d2(u);
    const double R = spec.R(xi);
    const double dR = spec.dR(xi);
    const double d2R = spec.d2R();

    const double d1 = branch * xi * std::sqrt(8.0 * m / R);
    // q = d/dxi (xi^2 / R) and its xi-derivative.
    const double q = 2.0 * xi / R - xi * xi * dR / (R * R);
    const double dq = 2.0 / R - 4.0 * xi * dR / (R * R) - xi * xi * d2R / (R * R) +
                      2.0 * xi * xi * dR * dR / (R * R * R);
    const double g = dm / (2.0 * m);
    const double d2 = g * d1 + 4.0 * m * q;
    const double dg = (d2m * m - dm * dm) / (2.0 * m * m);
    const double d3 = dg * d1 + g * d2 + 4.0 * dm * q + 4.0 * m * dq * d1;
    return {d1, d2, d3};
}

MappingSolution solve_mapping(const ConfluentSpec& spec, const MassProfile& mass,
                              std::span<const double> grid, const MappingStart& start,
                              MappingTolerance tol) {
    spec.validate();
    check_grid(grid, 2);
    if (start.branch != 1 && start.branch != -1) throw DomainError(Stage::mapping, "branch must be +1 or -1");
    if (!(start.xi0 > 0.0)) throw DomainError(Stage::mapping, "xi0 must be positive");
    const Interval requested{grid.front(), grid.back()};
    if (!requested.contains(start.u0)) throw DomainError(Stage::mapping, "u0 outside the requested domain");
    if (!(spec.R(start.xi0) > 0.0))
        throw SingularPointError(Stage::mapping, "R(xi0) <= 0: mapping starts on a singular point");
    if (!regular_point(spec, mass, start.u0, start.xi0))
        throw SingularPointError(Stage::mapping, "initial point outside the regular region");

    MappingSolution sol;
    sol.branch = start.branch;
    sol.start = start;
    sol.requested = requested;

    const auto first_fwd = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), start.u0) - grid.begin());

    LogMappingStepper stepper(spec, mass, start.branch, tol);

    // Backward sweep, collected in reverse and flipped afterwards.
    std::vector<std::pair<double, double>> back;
    {
        double u = start.u0, y = std::log(start.xi0), h = 0.0;
        for (std::size_t i = first_fwd; i-- > 0;) {
            if (!stepper.advance(u, y, grid[i], h)) {
                sol.clipped_lo = true;
                break;
            }
            back.emplace_back(grid[i], std::exp(y));
        }
    }
    for (auto it = back.rbegin(); it != back.rend(); ++it) push_node(sol, spec, mass, it->first, it->second);

    {
        double u = start.u0, y = std::log(start.xi0), h = 0.0;
        for (std::size_t i = first_fwd; i < grid.size(); ++i) {
            if (grid[i] == start.u0) {
                push_node(sol, spec, mass, grid[i], start.xi0);
                continue;
            }
            if (!stepper.advance(u, y, grid[i], h)) {
                sol.clipped_hi = true;
                break;
            }
            push_node(sol, spec, mass, grid[i], std::exp(y));
        }
    }
    check_span(sol);
    return sol;
}

MappingSolution solve_mapping(const ConfluentSpec& spec, const MassProfile& mass, Interval domain,
                              const MappingStart& start, int resolution, MappingTolerance tol) {
    if (resolution < 2) throw GridError(Stage::mapping, "resolution must be at least 2");
    if (!(domain.hi > domain.lo)) throw GridError(Stage::mapping, "empty domain");
    std::vector<double> grid(static_cast<std::size_t>(resolution));
    const double h = domain.span() / (resolution - 1);
    for (int i = 0; i < resolution; ++i) grid[static_cast<std::size_t>(i)] = domain.lo + i * h;
    grid.back() = domain.hi;
    return solve_mapping(spec, mass, grid, start, tol);
}

std::optional<MappingSolution> closed_form_mapping(const ConfluentSpec& spec, const MassProfile& mass,
                                                   std::span<const double> grid,
                                                   const MappingStart& start) {
    if (!mass.is_constant()) return std::nullopt;
    const int nonzero = (spec.lambda0 != 0.0) + (spec.lambda1 != 0.0) + (spec.lambda2 != 0.0);
    if (nonzero != 1) return std::nullopt;
    const double lam = spec.lambda0 + spec.lambda1 + spec.lambda2;
    if (!(lam > 0.0)) return std::nullopt;
    check_grid(grid, 2);

    const double m = mass.m0();
    const double sgn = start.branch;
    const double du0 = start.u0;

    // Returns {xi, xi', xi'', xi'''}, or xi <= 0 when outside the branch.
    auto eval = [&](double u) -> std::array<double, 4> {
        const double t = u - du0;
        if (spec.lambda1 != 0.0) {
            const double k = sgn * std::sqrt(2.0 * m / lam);
            const double s = std::sqrt(start.xi0) + k * t;
            if (!(s > 0.0)) return {0.0, 0.0, 0.0, 0.0};
            return {s * s, 2.0 * s * k, 2.0 * k * k, 0.0};
        }
        if (spec.lambda0 != 0.0) {
            const double k = sgn * std::sqrt(8.0 * m / lam);
            const double xi = start.xi0 * std::exp(k * t);
            return {xi, k * xi, k * k * xi, k * k * k * xi};
        }
        const double k = sgn * std::sqrt(8.0 * m / lam);
        return {start.xi0 + k * t, k, 0.0, 0.0};
    };

    MappingSolution sol;
    sol.branch = start.branch;
    sol.start = start;
    sol.requested = {grid.front(), grid.back()};
    bool seen_valid = false;
    for (double u : grid) {
        const auto v = eval(u);
        if (!regular_point(spec, mass, u, v[0])) {
            if (seen_valid) {
                sol.clipped_hi = true;
                break;
            }
            sol.clipped_lo = true;
            continue;
        }
        seen_valid = true;
        sol.u.push_back(u);
        sol.xi.push_back(v[0]);
        sol.d1.push_back(v[1]);
        sol.d2.push_back(v[2]);
        sol.d3.push_back(v[3]);
    }
    if (sol.u.empty()) return std::nullopt;
    check_span(sol);
    return sol;
}

double mapping_residual(const ConfluentSpec& spec, const MassProfile& mass, const MappingSolution& sol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const double xi = sol.xi[i];
        const double rhs = 4.0 * xi * xi / spec.R(xi);
        const double lhs = sol.d1[i] * sol.d1[i] / (2.0 * mass.value(sol.u[i]));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
    }
    return worst;
}

}  // namespace natanzon
