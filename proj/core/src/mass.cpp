#include "natanzon/mass.hpp"

#include "natanzon/errors.hpp"
#include "natanzon/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace natanzon {

std::string_view to_string(MassFamily family) noexcept {
    switch (family) {
        case MassFamily::constant: return "constant";
        case MassFamily::exponential: return "exponential";
        case MassFamily::rational: return "rational";
        case MassFamily::sech2: return "sech2";
        case MassFamily::tabulated: return "tabulated";
        case MassFamily::custom: return "custom";
    }
    return "unknown";
}

// Natural cubic spline; second derivatives at the nodes are stored in `m2`.
struct MassProfile::Spline {
    std::vector<double> u;
    std::vector<double> m;
    std::vector<double> m2;

    Spline(std::vector<double> uu, std::vector<double> mm) : u(std::move(uu)), m(std::move(mm)) {
        const std::size_t n = u.size();
        m2.assign(n, 0.0);
        std::vector<double> c(n, 0.0), d(n, 0.0);
        // Tridiagonal system for interior second derivatives (Thomas).
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = u[i] - u[i - 1];
            const double h1 = u[i + 1] - u[i];
            const double a = h0 / 6.0;
            const double b = (h0 + h1) / 3.0;
            const double cc = h1 / 6.0;
            const double r = (m[i + 1] - m[i]) / h1 - (m[i] - m[i - 1]) / h0;
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 1; i-- > 1;) m2[i] = d[i] - c[i] * m2[i + 1];
    }

    // Returns value, first and second derivative at x.
    std::array<double, 3> eval(double x) const {
        const std::size_t n = u.size();
        std::size_t k = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), x) - u.begin());
        k = std::clamp<std::size_t>(k, 1, n - 1);
        const std::size_t j = k - 1;
        const double h = u[k] - u[j];
        const double a = (u[k] - x) / h;
        const double b = (x - u[j]) / h;
        const double v = a * m[j] + b * m[k] + ((a * a * a - a) * m2[j] + (b * b * b - b) * m2[k]) * h * h / 6.0;
        const double d1 = (m[k] - m[j]) / h + (-(3.0 * a * a - 1.0) * m2[j] + (3.0 * b * b - 1.0) * m2[k]) * h / 6.0;
        const double d2 = a * m2[j] + b * m2[k];
        return {v, d1, d2};
    }
};

MassProfile::MassProfile(MassFamily family, double m0, double kappa)
    : family_(family), m0_(m0), kappa_(kappa), name_(to_string(family)) {
    if (family != MassFamily::tabulated && family != MassFamily::custom && !(m0 > 0.0))
        throw DomainError(Stage::mapping, "mass scale m0 must be positive");
}

MassProfile MassProfile::constant(double m0) { return MassProfile(MassFamily::constant, m0, 0.0); }

MassProfile MassProfile::exponential(double m0, double kappa) {
    return MassProfile(MassFamily::exponential, m0, kappa);
}

MassProfile MassProfile::rational(double m0, double kappa) {
    if (kappa < 0.0) throw DomainError(Stage::mapping, "rational mass needs kappa >= 0");
    return MassProfile(MassFamily::rational, m0, kappa);
}

MassProfile MassProfile::sech2(double m0, double kappa) {
    if (!(kappa > -1.0)) throw DomainError(Stage::mapping, "sech2 mass needs kappa > -1");
    return MassProfile(MassFamily::sech2, m0, kappa);
}

MassProfile MassProfile::tabulated(std::vector<double> u, std::vector<double> m) {
    if (u.size() != m.size()) throw GridError(Stage::mapping, "mass table columns differ in length");
    check_grid(u, 4);
    for (double v : m)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(Stage::mapping, "tabulated mass must be positive");
    MassProfile p(MassFamily::tabulated, 1.0, 0.0);
    p.spline_ = std::make_shared<const Spline>(std::move(u), std::move(m));
    return p;
}

MassProfile MassProfile::custom(std::string name, Fn m, Fn dm, Fn d2m) {
    MassProfile p(MassFamily::custom, 1.0, 0.0);
    p.name_ = std::move(name);
    p.fn_[0] = std::move(m);
    p.fn_[1] = std::move(dm);
    p.fn_[2] = std::move(d2m);
    return p;
}

double MassProfile::value(double u) const {
    switch (family_) {
        case MassFamily::constant: return m0_;
        case MassFamily::exponential: return m0_ * std::exp(kappa_ * u);
        case MassFamily::rational: return m0_ / (1.0 + kappa_ * u * u);
        case MassFamily::sech2: {
            const double s = 1.0 / std::cosh(u);
            return m0_ * (1.0 + kappa_ * s * s);
        }
        case MassFamily::tabulated: return spline_->eval(u)[0];
        case MassFamily::custom: return fn_[0](u);
    }
    return m0_;
}

double MassProfile::d1(double u) const {
    switch (family_) {
        case MassFamily::constant: return 0.0;
        case MassFamily::exponential: return m0_ * kappa_ * std::exp(kappa_ * u);
        case MassFamily::rational: {
            const double q = 1.0 + kappa_ * u * u;
            return -2.0 * m0_ * kappa_ * u / (q * q);
        }
        case MassFamily::sech2: {
            const double s = 1.0 / std::cosh(u);
            return -2.0 * m0_ * kappa_ * s * s * std::tanh(u);
        }
        case MassFamily::tabulated: return spline_->eval(u)[1];
        case MassFamily::custom: return fn_[1](u);
    }
    return 0.0;
}

double MassProfile::d2(double u) const {
    switch (family_) {
        case MassFamily::constant: return 0.0;
        case MassFamily::exponential: return m0_ * kappa_ * kappa_ * std::exp(kappa_ * u);
        case MassFamily::rational: {
            const double q = 1.0 + kappa_ * u * u;
            return m0_ * (6.0 * kappa_ * kappa_ * u * u - 2.0 * kappa_) / (q * q * q);
        }
        case MassFamily::sech2: {
            const double s = 1.0 / std::cosh(u);
            const double t = std::tanh(u);
            // d/du sech^2 = -2 sech^2 tanh ; d2/du2 = sech^2 (4 tanh^2 - 2 sech^2)
            return m0_ * kappa_ * s * s * (4.0 * t * t - 2.0 * s * s);
        }
        case MassFamily::tabulated: return spline_->eval(u)[2];
        case MassFamily::custom: return fn_[2](u);
    }
    return 0.0;
}

void MassProfile::check_positive(std::span<const double> u) const {
    for (double x : u) {
        const double v = value(x);
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(Stage::potential, "mass not positive at u = " + std::to_string(x));
    }
}

double MassProfile::derivative_consistency(double u_min, double u_max, double h) const {
    double worst = 0.0;
    for (double x = u_min + 2 * h; x <= u_max - 2 * h; x += h) {
        const double fm2 = value(x - 2 * h), fm1 = value(x - h), f0 = value(x);
        const double fp1 = value(x + h), fp2 = value(x + 2 * h);
        const double fd1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
        const double fd2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
        const double scale = std::max({1.0, std::abs(f0), std::abs(d1(x)), std::abs(d2(x))});
        worst = std::max({worst, std::abs(fd1 - d1(x)) / scale, std::abs(fd2 - d2(x)) / scale});
    }
    return worst;
}

std::span<const double> MassProfile::table_u() const noexcept {
    if (!spline_) return {};
    return spline_->u;
}

std::span<const double> MassProfile::table_m() const noexcept {
    if (!spline_) return {};
    return spline_->m;
}

}  // namespace natanzon
