#include "natanzon/specfun.hpp"

#include "natanzon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace natanzon {

namespace {

constexpr std::size_t kStencil = 7;

// First index of a kStencil-wide window around node i, clamped to the grid.
std::size_t window_start(std::size_t i, std::size_t n) {
    const std::size_t half = kStencil / 2;
    if (i < half) return 0;
    if (i + half >= n) return n - kStencil;
    return i - half;
}

}  // namespace

GridFunction::GridFunction(std::vector<double> u, std::vector<double> f)
    : u_(std::move(u)), f_(std::move(f)) {
    if (u_.size() != f_.size())
        throw GridError(Stage::specfun, "abscissae and values differ in length");
    check_grid(u_, 1);
    for (double v : f_)
        if (!std::isfinite(v)) throw GridError(Stage::specfun, "non-finite sample value");
}

GridFunction& GridFunction::with_derivative(int order, Callback d) {
    if (order < 1 || order > 3) throw DomainError(Stage::specfun, "derivative order must be 1..3");
    d_[static_cast<std::size_t>(order - 1)] = std::move(d);
    return *this;
}

bool GridFunction::has_analytic(int order) const {
    return order >= 1 && order <= 3 && static_cast<bool>(d_[static_cast<std::size_t>(order - 1)]);
}

double GridFunction::analytic(int order, double x) const {
    if (!has_analytic(order)) throw DomainError(Stage::specfun, "no analytic derivative attached");
    return d_[static_cast<std::size_t>(order - 1)](x);
}

double GridFunction::interpolate(double x) const {
    const std::size_t n = u_.size();
    if (n == 0) throw GridError(Stage::specfun, "empty grid");
    if (n < kStencil) {
        // Plain Lagrange through all points.
        auto w = fornberg_weights(x, u_, 0);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += w[0][j] * f_[j];
        return s;
    }
    const auto it = std::lower_bound(u_.begin(), u_.end(), x);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - u_.begin()), n - 1);
    const std::size_t s0 = window_start(i, n);
    std::span<const double> nodes(u_.data() + s0, kStencil);
    auto w = fornberg_weights(x, nodes, 0);
    double s = 0.0;
    for (std::size_t j = 0; j < kStencil; ++j) s += w[0][j] * f_[s0 + j];
    return s;
}

std::vector<double> kummer_coefficients(int n, double b) {
    if (n < 0) throw DomainError(Stage::specfun, "1F1 degree must be nonnegative");
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        const double denom = (b + k - 1) * k;
        if (b + k - 1 == 0.0)
            throw DomainError(Stage::specfun,
                              "Pochhammer (b)_k vanishes for b = " + std::to_string(b));
        c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)] * (-n + k - 1) / denom;
    }
    return c;
}

double kummer_1f1(int n, double b, double z) {
    const auto c = kummer_coefficients(n, b);
    double acc = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * z + c[k];
    return acc;
}

double schwarzian(double d1, double d2, double d3) {
    const double scale = std::max(std::abs(d2), std::abs(d3));
    if (!(std::abs(d1) > 1e-12 * scale) || d1 == 0.0)
        throw SingularPointError(Stage::specfun, "xi' vanishes at Schwarzian query point");
    const double r = d2 / d1;
    if (d2 == 0.0) return d3 / d1 - 1.5 * r * r;
    return r * (d3 / d2 - 1.5 * r);
}

double schwarzian(const GridFunction& xi, double u) {
    if (xi.has_analytic(1) && xi.has_analytic(2) && xi.has_analytic(3))
        return schwarzian(xi.analytic(1, u), xi.analytic(2, u), xi.analytic(3, u));
    const GridFunction d1 = derivatives(xi, 1);
    const GridFunction d2 = derivatives(xi, 2);
    const GridFunction d3 = derivatives(xi, 3);
    return schwarzian(d1.interpolate(u), d2.interpolate(u), d3.interpolate(u));
}

std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> x,
                                                  int max_order) {
    const std::size_t n = x.size();
    const std::size_t m = static_cast<std::size_t>(max_order);
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    if (n == 0) return c;
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

std::vector<double> differentiate(std::span<const double> u, std::span<const double> f, int order) {
    if (order < 1 || order > 3) throw DomainError(Stage::specfun, "derivative order must be 1..3");
    if (u.size() != f.size()) throw GridError(Stage::specfun, "abscissae and values differ in length");
    check_grid(u, kStencil);
    const std::size_t n = u.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s0 = window_start(i, n);
        const auto w = fornberg_weights(u[i], u.subspan(s0, kStencil), order);
        const auto& wk = w[static_cast<std::size_t>(order)];
        double s = 0.0;
        for (std::size_t j = 0; j < kStencil; ++j) s += wk[j] * f[s0 + j];
        out[i] = s;
    }
    return out;
}

GridFunction derivatives(const GridFunction& f, int order) {
    std::vector<double> u(f.u().begin(), f.u().end());
    auto d = differentiate(f.u(), f.f(), order);
    return GridFunction(std::move(u), std::move(d));
}

double integrate(std::span<const double> u, std::span<const double> f) {
    if (u.size() != f.size()) throw GridError(Stage::specfun, "abscissae and values differ in length");
    const std::size_t n = u.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * (u[1] - u[0]) * (f[0] + f[1]);

    // Simpson on consecutive pairs of (possibly unequal) intervals.
    auto panel = [&](std::size_t i) {
        const double h0 = u[i + 1] - u[i];
        const double h1 = u[i + 2] - u[i + 1];
        const double hs = h0 + h1;
        return hs / 6.0 *
               ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    };

    const std::size_t intervals = n - 1;
    double s = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) s += panel(i);
    if (intervals % 2 == 1) {
        // Last interval [u_{n-2}, u_{n-1}] from the quadratic through the
        // last three nodes.
        const double h0 = u[n - 2] - u[n - 3];
        const double h1 = u[n - 1] - u[n - 2];
        const double a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        const double b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        const double c = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        s += a * f[n - 1] + b * f[n - 2] - c * f[n - 3];
    }
    return s;
}

void check_grid(std::span<const double> u, std::size_t min_points) {
    if (u.size() < min_points)
        throw GridError(Stage::specfun, "grid has " + std::to_string(u.size()) +
                                            " points, need at least " + std::to_string(min_points));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i])) throw GridError(Stage::specfun, "non-finite abscissa");
        if (i > 0 && !(u[i] > u[i - 1])) throw GridError(Stage::specfun, "abscissae not strictly increasing");
    }
}

}  // namespace natanzon
