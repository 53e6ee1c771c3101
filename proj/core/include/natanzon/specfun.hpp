#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace natanzon {

/// Samples of a real function on a strictly increasing set of abscissae,
/// optionally carrying analytic derivative callbacks (orders 1..3).
class GridFunction {
public:
    using Callback = std::function<double(double)>;

    GridFunction() = default;
    GridFunction(std::vector<double> u, std::vector<double> f);

    /// Attach the analytic derivative of the given order (1, 2 or 3).
    GridFunction& with_derivative(int order, Callback d);

    std::span<const double> u() const noexcept { return u_; }
    std::span<const double> f() const noexcept { return f_; }
    std::size_t size() const noexcept { return u_.size(); }
    double u(std::size_t i) const { return u_[i]; }
    double f(std::size_t i) const { return f_[i]; }

    bool has_analytic(int order) const;
    double analytic(int order, double x) const;

    /// Local 7-point Lagrange interpolation of the samples.
    double interpolate(double x) const;

private:
    std::vector<double> u_;
    std::vector<double> f_;
    std::array<Callback, 3> d_{};
};

/// Truncated Kummer series 1F1(-n; b; z), a polynomial of degree n in z.
/// Throws DomainError when a Pochhammer denominator (b)_k vanishes, k <= n.
double kummer_1f1(int n, double b, double z);

/// Coefficients c_k of 1F1(-n; b; z) = sum_k c_k z^k, k = 0..n.
std::vector<double> kummer_coefficients(int n, double b);

/// Schwarzian derivative {xi, u} from pointwise derivatives xi', xi'', xi'''.
/// Throws SingularPointError when |xi'| is below 1e-12 times the local scale.
double schwarzian(double d1, double d2, double d3);

/// Schwarzian of a sampled map at u. Uses analytic derivatives when all three
/// are attached, otherwise finite differences interpolated to u.
double schwarzian(const GridFunction& xi, double u);

/// Derivative of the requested order (1, 2 or 3) at every node. Weights come
/// from a 7-point local polynomial fit (Fornberg), centred in the interior
/// and one-sided near the ends, so the result is exact for polynomials of
/// degree <= 6 on any grid.
GridFunction derivatives(const GridFunction& f, int order);

/// Same as above on raw arrays.
std::vector<double> differentiate(std::span<const double> u, std::span<const double> f, int order);

/// Finite-difference weights for derivatives 0..max_order at x0 from the
/// given nodes. Result[k][j] is the weight of node j for derivative k.
std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> nodes,
                                                  int max_order);

/// Composite Simpson rule on a possibly nonuniform grid. An odd number of
/// intervals is closed with the three-point correction on the last panel.
double integrate(std::span<const double> u, std::span<const double> f);

/// Validates a grid: size >= min_points, strictly increasing, finite.
void check_grid(std::span<const double> u, std::size_t min_points);

}  // namespace natanzon
