#pragma once

#include "natanzon/mass.hpp"

#include <optional>
#include <span>
#include <vector>

namespace natanzon {

/// Parameters of a confluent family: R(xi) = lambda2 xi^2 + lambda1 xi + lambda0
/// in the denominator and the numerator coefficients sigma_beta, sigma_q0,
/// sigma_c.
struct ConfluentSpec {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double sigma_beta = 0.0;
    double sigma_q0 = 0.0;
    double sigma_c = 0.0;

    /// Discriminant lambda1^2 - 4 lambda0 lambda2, always recomputed.
    double delta() const noexcept { return lambda1 * lambda1 - 4.0 * lambda0 * lambda2; }
    double R(double xi) const noexcept { return (lambda2 * xi + lambda1) * xi + lambda0; }
    double dR(double xi) const noexcept { return 2.0 * lambda2 * xi + lambda1; }
    double d2R() const noexcept { return 2.0 * lambda2; }

    /// Throws DomainError if all three lambdas vanish or any value is not finite.
    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double span() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Initial condition and sign of xi' for the mapping equation.
struct MappingStart {
    double u0 = 0.0;
    double xi0 = 1.0;
    int branch = +1;
};

/// Sampled solution xi(u) of xi'^2 / (2 m) = 4 xi^2 / R(xi) together with its
/// first three derivatives. The reported domain is the (possibly clipped)
/// range actually covered by `u`.
struct MappingSolution {
    std::vector<double> u;
    std::vector<double> xi;
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<double> d3;
    int branch = +1;
    MappingStart start;
    Interval requested;
    bool clipped_lo = false;
    bool clipped_hi = false;

    Interval domain() const { return {u.front(), u.back()}; }
    std::size_t size() const noexcept { return u.size(); }
};

/// Thresholds at which the mapping equation is considered singular: the
/// solution stops where 4 xi^2 / R or the log-derivative squared 8 m / R
/// exceeds `kMappingBlowup`.
inline constexpr double kMappingBlowup = 1e14;

struct MappingTolerance {
    double rtol = 1e-10;
    double atol = 1e-12;
};

/// Integrates the mapping equation through every node of `grid` (strictly
/// increasing). Integration runs in log(xi) with an adaptive Dormand-Prince
/// 5(4) pair, outward from start.u0 in both directions, and stops early when
/// R(xi) -> 0+ or xi -> 0+. xi'' and xi''' follow from differentiating the
/// right-hand side analytically. Throws SingularPointError if R(xi0) <= 0,
/// and DomainError if the surviving span is below 1% of the requested one.
MappingSolution solve_mapping(const ConfluentSpec& spec, const MassProfile& mass,
                              std::span<const double> grid, const MappingStart& start,
                              MappingTolerance tol = {});

/// Uniform-grid convenience overload with `resolution` nodes over `domain`.
MappingSolution solve_mapping(const ConfluentSpec& spec, const MassProfile& mass, Interval domain,
                              const MappingStart& start, int resolution, MappingTolerance tol = {});

/// Default start: midpoint of the domain, xi0 = 1, branch +1.
MappingStart default_start(Interval domain);

/// Analytic mapping when exactly one lambda is nonzero and the mass is
/// constant: square-law (lambda1), exponential (lambda0) or linear (lambda2).
std::optional<MappingSolution> closed_form_mapping(const ConfluentSpec& spec, const MassProfile& mass,
                                                   std::span<const double> grid,
                                                   const MappingStart& start);

/// xi'' and xi''' implied by the mapping equation at (u, xi, xi').
struct MappingDerivatives {
    double d1;
    double d2;
    double d3;
};
MappingDerivatives mapping_derivatives(const ConfluentSpec& spec, const MassProfile& mass, double u,
                                       double xi, int branch);

/// Largest pointwise residual |xi'^2/(2m) - 4xi^2/R| / max(1, 4xi^2/R).
double mapping_residual(const ConfluentSpec& spec, const MassProfile& mass, const MappingSolution& sol);

}  // namespace natanzon
