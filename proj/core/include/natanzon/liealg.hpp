#pragma once

#include "natanzon/mapping.hpp"
#include "natanzon/mass.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace natanzon {

/// Differential realization of the so(2,1) generators on a uniform grid.
/// The J generators depend on the mapping and the Casimir value only; the T
/// generators additionally carry the scale function P (left empty for P = 1).
/// Real is long double or __float128.
template <class Real>
struct Realization {
    std::vector<Real> u;
    std::vector<Real> xi;
    std::vector<Real> d1;
    std::vector<Real> d2;
    std::vector<Real> d3;
    Real h = 0;
    Real casimir = 0;
    std::vector<Real> P;
    std::vector<Real> dP;
    std::vector<Real> d2P;

    std::size_t size() const noexcept { return u.size(); }
    bool has_scale() const noexcept { return !P.empty(); }
};

enum class AnalyticMap { identity, square, exponential };

std::string_view to_string(AnalyticMap map) noexcept;

/// Realization for xi = u, u^2 or e^u on [lo, lo + h (n - 1)] with n >= hi.
/// Throws SingularPointError if xi' vanishes on the grid.
template <class Real>
Realization<Real> make_realization(AnalyticMap map, double lo, double hi, double h, double casimir);

/// Realization sampled from a mapping solution on a uniform grid.
template <class Real>
Realization<Real> make_realization(const MappingSolution& mapping, double casimir);

/// Attach P(u) = m(u) (with its derivatives) to the realization.
template <class Real>
void attach_scale(Realization<Real>& r, const MassProfile& mass);

enum class Generator { J0, J1, J2, T0, T1, T2 };

std::string_view to_string(Generator g) noexcept;

/// Complex samples as separate real and imaginary parts.
template <class Real>
struct ComplexGrid {
    std::vector<Real> re;
    std::vector<Real> im;
};

/// Applies the tagged generator to f using analytic mapping coefficients and
/// eighth-order central differences (fourth-order five-point near the ends).
/// T generators require an attached scale function.
template <class Real>
ComplexGrid<Real> apply_generator(const Realization<Real>& r, Generator g, const ComplexGrid<Real>& f);

/// Same with the Casimir value overridden (used by the negative control).
template <class Real>
ComplexGrid<Real> apply_generator(const Realization<Real>& r, Generator g, const ComplexGrid<Real>& f,
                                  Real casimir);

/// Gaussians times low-order polynomials centred near the middle of the grid.
/// Every member is below 1e-14 of its peak at both ends.
template <class Real>
struct TestFunctionSet {
    std::vector<ComplexGrid<Real>> functions;

    static TestFunctionSet make(const std::vector<Real>& u, int count, std::uint64_t seed);
};

/// Fraction of nodes excluded at each end when measuring residuals.
inline constexpr double kBoundaryExclusion = 0.2;

/// max over tests of ||(AB - BA - sign i C) f||_inf / ||f||_inf on the interior.
/// `casimir_a` overrides the Casimir value inside A only.
template <class Real>
double commutator_residual(const Realization<Real>& r, Generator A, Generator B, Generator C, int sign,
                           const TestFunctionSet<Real>& tests);
template <class Real>
double commutator_residual(const Realization<Real>& r, Generator A, Generator B, Generator C, int sign,
                           const TestFunctionSet<Real>& tests, Real casimir_a);

/// max over tests of ||T_k f - J_k f||_inf / ||f||_inf with the realization's
/// own scale function (exactly zero when P' = P'' = 0).
template <class Real>
double t_vs_j_residual(const Realization<Real>& r, const TestFunctionSet<Real>& tests);

/// Residual of exp(i theta T2) T0 exp(-i theta T2) = T0 cosh(theta) - T1 sinh(theta)
/// with the left side summed as nested commutators up to `order` (<= 6) and
/// the right side exact.
template <class Real>
double scale_identity_residual(const Realization<Real>& r, double theta, int order,
                               const TestFunctionSet<Real>& tests);

/// ||d/dx (x f) - x f' - f||_inf / ||f||_inf for Gaussian test functions on a
/// fine grid over [lo, hi].
double ab_commutator_residual(double lo, double hi, int points, int count, std::uint64_t seed);

/// Parameters of the scale transformation in terms of beta.
double theta_of_beta(double beta);
double delta_of_beta(double beta);

struct AlgebraRow {
    std::string check;
    std::string realization;
    double casimir;
    double residual;
    double threshold;
    bool expect_above;  ///< negative control: passes when residual > threshold
    bool pass() const noexcept { return expect_above ? residual > threshold : residual < threshold; }
};

struct AlgebraSuiteOptions {
    std::vector<double> casimirs{0.75, 1.25};
    int test_count = 5;
    std::uint64_t seed = 20240611;
    double theta = 0.1;
    int order = 6;
    double mass_kappa = 0.1;  ///< rational scale function for the T checks
};

/// Every algebra check in one table: commutators over three analytic maps and
/// the requested Casimir values, T/J coincidence for P = 1, the truncated
/// scale identity for orders 0..order, its theta = 0 limit, the [a, b] = 1
/// check and a perturbed-Casimir negative control.
std::vector<AlgebraRow> run_algebra_suite(const AlgebraSuiteOptions& options = {});

}  // namespace natanzon
