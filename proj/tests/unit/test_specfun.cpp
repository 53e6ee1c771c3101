#include <natanzon/errors.hpp>
#include <natanzon/specfun.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace natanzon;

namespace {

// Term-by-term series in long double; independent of the library's Horner form.
long double kummer_series(int n, long double b, long double z) {
    long double term = 1, sum = 1;
    for (int k = 0; k < n; ++k) {
        term *= (-n + k) * z / ((b + k) * (k + 1));
        sum += term;
    }
    return sum;
}

// Generalized Laguerre polynomial by its three-term recurrence.
double laguerre(int n, double alpha, double x) {
    double lm1 = 1.0, l = 1.0 + alpha - x;
    if (n == 0) return lm1;
    for (int k = 1; k < n; ++k) {
        const double next = ((2 * k + 1 + alpha - x) * l - (k + alpha) * lm1) / (k + 1);
        lm1 = l;
        l = next;
    }
    return l;
}

double pochhammer(double x, int n) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= x + k;
    return p;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("kummer polynomial values") {
    CHECK(kummer_1f1(0, 2.5, 7.0) == 1.0);
    CHECK(kummer_1f1(1, 2.0, 3.0) == doctest::Approx(1.0 - 1.5).epsilon(1e-15));
    CHECK(kummer_1f1(2, 1.5, 0.4) == doctest::Approx(1.0 - 4.0 * 0.4 / 3.0 + 0.16 / 1.5 / 2.5 * 2.0 / 2.0 * 1.0).epsilon(1e-14));

    const double ref = static_cast<double>(kummer_series(3, 2.5L, 0.8L));
    CHECK(std::abs(kummer_1f1(3, 2.5, 0.8) - ref) < 1e-14);
}

TEST_CASE("kummer agrees with a long double series over a parameter sweep") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> bd(0.3, 8.0), zd(0.0, 12.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = trial % 9;
        const double b = bd(rng), z = zd(rng);
        const long double ref = kummer_series(n, b, z);
        const double scale = std::max(1.0L, std::abs(ref));
        CHECK(std::abs(kummer_1f1(n, b, z) - static_cast<double>(ref)) < 1e-11 * scale);
    }
}

TEST_CASE("kummer matches the Laguerre recurrence") {
    for (int n = 0; n <= 6; ++n)
        for (double alpha : {0.0, 0.5, 2.25})
            for (double x : {0.1, 1.0, 4.5}) {
                const double via_laguerre = laguerre(n, alpha, x) * std::tgamma(n + 1.0) / pochhammer(alpha + 1.0, n);
                CHECK(kummer_1f1(n, alpha + 1.0, x) == doctest::Approx(via_laguerre).epsilon(1e-12));
            }
}

TEST_CASE("kummer contiguous relation in the first parameter") {
    // (b - a) M(a-1) + (2a - b + z) M(a) - a M(a+1) = 0 with a = -n
    for (int n = 1; n <= 7; ++n) {
        const double a = -n, b = 1.7, z = 2.3;
        const double lhs = (b - a) * kummer_1f1(n + 1, b, z) + (2 * a - b + z) * kummer_1f1(n, b, z) -
                           a * kummer_1f1(n - 1, b, z);
        CHECK(std::abs(lhs) < 1e-11 * std::max(1.0, std::abs(kummer_1f1(n + 1, b, z))));
    }
}

TEST_CASE("kummer rejects vanishing Pochhammer denominators") {
    CHECK_THROWS_AS(kummer_1f1(3, -1.0, 0.5), DomainError);
    CHECK_THROWS_AS(kummer_1f1(-1, 2.0, 0.5), DomainError);
    CHECK_NOTHROW(kummer_1f1(1, -1.5, 0.5));
    const auto c = kummer_coefficients(4, 1.5);
    REQUIRE(c.size() == 5);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == doctest::Approx(-4.0 / 1.5));
}

TEST_CASE("schwarzian of closed-form maps") {
    // affine
    CHECK(schwarzian(3.0, 0.0, 0.0) == 0.0);
    // Moebius (2u + 1)/(u + 3) at u = 0.7: derivatives by hand
    {
        const double u = 0.7, d = u + 3.0, det = 2.0 * 3.0 - 1.0;
        CHECK(std::abs(schwarzian(det / (d * d), -2.0 * det / (d * d * d), 6.0 * det / (d * d * d * d))) < 1e-13);
    }
    // e^{2u} at 0 and the general {e^{ku}, u} = -k^2/2
    CHECK(schwarzian(2.0, 4.0, 8.0) == doctest::Approx(-2.0).epsilon(1e-15));
    for (double k : {0.5, 1.0, 3.0}) {
        const double e = std::exp(k * 0.3);
        CHECK(schwarzian(k * e, k * k * e, k * k * k * e) == doctest::Approx(-0.5 * k * k).epsilon(1e-14));
    }
    // u^2: -3/(2u^2)
    CHECK(schwarzian(2.0 * 1.5, 2.0, 0.0) == doctest::Approx(-1.5 / (1.5 * 1.5)).epsilon(1e-15));
}

TEST_CASE("schwarzian guards a vanishing first derivative") {
    CHECK_THROWS_AS(schwarzian(0.0, 1.0, 1.0), SingularPointError);
    CHECK_THROWS_AS(schwarzian(1e-15, 2.0, 0.0), SingularPointError);
    // tiny but regular: exponential map far to the left
    const double e = std::exp(-30.0);
    CHECK(schwarzian(e, e, e) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("schwarzian is invariant under Moebius post-composition") {
    const auto u = linspace(0.5, 3.0, 801);
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = u[i] * u[i];
        g[i] = (2.0 * x + 1.0) / (x + 3.0);
    }
    const GridFunction gf(u, g);
    for (double x : {0.9, 1.6, 2.4}) CHECK(schwarzian(gf, x) == doctest::Approx(-1.5 / (x * x)).epsilon(1e-6));
}

TEST_CASE("schwarzian prefers attached analytic derivatives") {
    const auto u = linspace(-1.0, 1.0, 21);
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::exp(2.0 * u[i]);
    GridFunction gf(u, f);
    gf.with_derivative(1, [](double x) { return 2.0 * std::exp(2.0 * x); })
        .with_derivative(2, [](double x) { return 4.0 * std::exp(2.0 * x); })
        .with_derivative(3, [](double x) { return 8.0 * std::exp(2.0 * x); });
    CHECK(schwarzian(gf, 0.123) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("derivatives are exact for degree six polynomials on nonuniform grids") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::vector<double> u;
    for (int i = 0; i < 60; ++i) u.push_back(0.1 * i + 0.02 * jitter(rng));
    auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x - 0.1 * std::pow(x, 5) + 0.01 * std::pow(x, 6); };
    auto dp = [](double x) { return -2.0 + 1.5 * x * x - 0.5 * std::pow(x, 4) + 0.06 * std::pow(x, 5); };
    auto d2p = [](double x) { return 3.0 * x - 2.0 * std::pow(x, 3) + 0.3 * std::pow(x, 4); };
    auto d3p = [](double x) { return 3.0 - 6.0 * x * x + 1.2 * std::pow(x, 3); };
    std::vector<double> f;
    for (double x : u) f.push_back(p(x));
    const auto g1 = differentiate(u, f, 1), g2 = differentiate(u, f, 2), g3 = differentiate(u, f, 3);
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(g1[i] == doctest::Approx(dp(u[i])).epsilon(1e-8).scale(1.0));
        CHECK(g2[i] == doctest::Approx(d2p(u[i])).epsilon(1e-7).scale(1.0));
        CHECK(g3[i] == doctest::Approx(d3p(u[i])).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("derivatives converge at fourth order or better in the interior") {
    auto err = [](int n) {
        const auto u = linspace(0.0, 2.0, n);
        std::vector<double> f;
        for (double x : u) f.push_back(std::sin(3.0 * x));
        const auto d = differentiate(u, f, 1);
        double worst = 0.0;
        for (std::size_t i = 3; i + 3 < u.size(); ++i) worst = std::max(worst, std::abs(d[i] - 3.0 * std::cos(3.0 * u[i])));
        return worst;
    };
    const double ratio = err(41) / err(81);
    CHECK(ratio > 14.0);  // 2^4 = 16 for a fourth-order stencil
}

TEST_CASE("fornberg weights reproduce the centred second difference") {
    const std::vector<double> x{-1.0, 0.0, 1.0};
    const auto w = fornberg_weights(0.0, x, 2);
    CHECK(w[0][1] == doctest::Approx(1.0));
    CHECK(w[1][0] == doctest::Approx(-0.5));
    CHECK(w[1][2] == doctest::Approx(0.5));
    CHECK(w[2][0] == doctest::Approx(1.0));
    CHECK(w[2][1] == doctest::Approx(-2.0));
}

TEST_CASE("simpson integration") {
    const auto u = linspace(0.0, 1.0, 11);  // even number of intervals
    std::vector<double> f;
    for (double x : u) f.push_back(x * x * x);
    CHECK(integrate(u, f) == doctest::Approx(0.25).epsilon(1e-15));

    const auto v = linspace(0.0, 1.0, 12);  // odd number of intervals
    std::vector<double> g;
    for (double x : v) g.push_back(x * x);
    CHECK(integrate(v, g) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const auto w = linspace(0.0, M_PI, 2001);
    std::vector<double> s;
    for (double x : w) s.push_back(std::sin(x));
    CHECK(integrate(w, s) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(check_grid(std::vector<double>{0.0, 1.0, 1.0, 2.0}, 2), GridError);
    CHECK_THROWS_AS(check_grid(std::vector<double>{0.0, 1.0}, 3), GridError);
    CHECK_THROWS_AS(check_grid(std::vector<double>{0.0, NAN, 2.0}, 2), GridError);
    CHECK_NOTHROW(check_grid(std::vector<double>{0.0, 0.5, 2.0}, 3));
}

TEST_CASE("grid function interpolation") {
    const auto u = linspace(0.0, 1.0, 21);
    std::vector<double> f;
    for (double x : u) f.push_back(std::pow(x, 5) - x);
    const GridFunction gf(u, f);
    CHECK(gf.interpolate(0.333) == doctest::Approx(std::pow(0.333, 5) - 0.333).epsilon(1e-13));
    CHECK(gf.interpolate(0.5) == doctest::Approx(std::pow(0.5, 5) - 0.5).epsilon(1e-15));
    CHECK_FALSE(gf.has_analytic(1));
}
