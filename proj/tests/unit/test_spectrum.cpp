#include <natanzon/errors.hpp>
#include <natanzon/spectrum.hpp>

#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

using namespace natanzon;

namespace {

ConfluentSpec make_spec(double l0, double l1, double l2, double sb, double sq, double sc) {
    ConfluentSpec s;
    s.lambda0 = l0;
    s.lambda1 = l1;
    s.lambda2 = l2;
    s.sigma_beta = sb;
    s.sigma_q0 = sq;
    s.sigma_c = sc;
    return s;
}

const ConfluentSpec kOscillator = make_spec(0, 4, 0, 4, 0, 0);
const ConfluentSpec kCoulomb = make_spec(0, 0, 1, 0, -4.0 * std::sqrt(2.0), 0);
const ConfluentSpec kMorse = make_spec(4, 0, 0, 1, -17, -11);

// Energy condition written out independently of the library.
std::optional<double> F(const ConfluentSpec& s, int n, double E) {
    const double r1 = s.sigma_beta - s.lambda2 * E;
    const double r2 = 1 + s.sigma_c - s.lambda0 * E;
    if (!(r1 > 0) || r2 < 0) return std::nullopt;
    return (s.lambda1 * E - s.sigma_q0) / (2 * std::sqrt(r1)) - std::sqrt(r2) - (2 * n + 1);
}

// Lowest root on [lo, hi] by a dense scan and plain bisection.
std::optional<double> lowest_root(const ConfluentSpec& s, int n, double lo, double hi, int samples = 200000) {
    double prev_e = lo;
    auto prev = F(s, n, lo);
    for (int i = 1; i <= samples; ++i) {
        const double e = lo + (hi - lo) * i / samples;
        const auto f = F(s, n, e);
        if (f && prev && (*prev == 0.0 || (*prev < 0) != (*f < 0))) {
            double a = prev_e, b = e, fa = *prev;
            for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
                const double m = 0.5 * (a + b);
                const double fm = *F(s, n, m);
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        prev = f;
        prev_e = e;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("energy condition examples") {
    CHECK(energy_condition(kOscillator, 0, 2.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(energy_condition(kOscillator, 1, 4.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(energy_condition(kOscillator, 0, 3.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(energy_condition(kCoulomb, 0, 1.0), DomainError);
    CHECK_THROWS_AS(energy_condition(kMorse, 0, 0.0), DomainError);
}

TEST_CASE("oscillator spectrum is 2n + 2") {
    const auto scan = solve_levels(kOscillator, 5);
    REQUIRE(scan.states.size() == 6);
    CHECK(scan.missing.empty());
    for (const auto& s : scan.states) {
        CHECK(s.E == doctest::Approx(2.0 * s.n + 2.0).epsilon(1e-11));
        CHECK(s.a == doctest::Approx(2.0));
        CHECK(s.b == doctest::Approx(2.0));
    }
}

TEST_CASE("Coulomb spectrum matches the algebraic solution") {
    const auto scan = solve_levels(kCoulomb, 6);
    REQUIRE(scan.states.size() == 7);
    for (const auto& s : scan.states) {
        const double ref = -2.0 / ((s.n + 1.0) * (s.n + 1.0));
        CHECK(std::abs(s.E - ref) < 1e-9);
    }
    // general member: E_n = sigma_beta - sigma_q0^2 / (4 (2n + 1 + sqrt(1 + sigma_c))^2)
    const auto gen = make_spec(0, 0, 1, 0.3, -5.0, 0.8);
    const auto g = solve_levels(gen, 4);
    for (const auto& s : g.states) {
        const double d = 2 * s.n + 1 + std::sqrt(1.8);
        CHECK(std::abs(s.E - (0.3 - 25.0 / (4 * d * d))) < 1e-9);
    }
}

TEST_CASE("Morse spectrum is finite") {
    const auto scan = solve_levels(kMorse, 6);
    const double expected[] = {-16.5625, -10.0625, -5.5625, -3.0625};
    REQUIRE(scan.states.size() == 4);
    for (int n = 0; n < 4; ++n) {
        REQUIRE(scan.find(n) != nullptr);
        CHECK(std::abs(scan.find(n)->E - expected[n]) < 1e-9);
    }
    CHECK(scan.find(4) == nullptr);
    CHECK(scan.missing == std::vector<int>{4, 5, 6});
    // b shrinks with n while a stays fixed
    CHECK(scan.find(0)->b > scan.find(3)->b);
    CHECK(scan.find(0)->a == doctest::Approx(scan.find(3)->a));
}

TEST_CASE("empty valid interval gives an empty scan") {
    const auto spec = make_spec(0, 1, 0, -1, 0, 0);
    CHECK_FALSE(valid_energy_interval(spec).has_value());
    const auto scan = solve_levels(spec, 3);
    CHECK(scan.empty_interval);
    CHECK(scan.states.empty());
    CHECK(scan.missing.size() == 4);
}

TEST_CASE("valid interval bounds") {
    const auto iv = valid_energy_interval(kCoulomb);
    REQUIRE(iv.has_value());
    CHECK(iv->hi == 0.0);
    CHECK(iv->hi_open);
    CHECK(std::isinf(iv->lo));
    const auto m = valid_energy_interval(kMorse);
    REQUIRE(m.has_value());
    CHECK(m->hi == doctest::Approx(-2.5));
    CHECK_FALSE(m->hi_open);
}

TEST_CASE("level invariants hold for random specs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lam(0.0, 3.0), sb(0.5, 6.0), sq(-12.0, -0.5), sc(-0.5, 3.0);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto spec = make_spec(lam(rng), lam(rng), lam(rng), sb(rng), sq(rng), sc(rng));
        const auto scan = solve_levels(spec, 3);
        for (const auto& s : scan.states) {
            ++checked;
            CHECK(s.a > 0);
            CHECK(s.b > 0);
            CHECK(beta_residual(spec, s) < 1e-10);
            CHECK(c_residual(spec, s) < 1e-10);
            CHECK(s.q0_residual() < 1e-10);
            const double scale = std::max({1.0, std::abs(s.E), std::abs(spec.sigma_q0)});
            CHECK(linear_residual(spec, s) < 1e-8 * scale);
            // rebuild from (n, E)
            const auto r = make_bound_state(spec, s.n, s.E);
            CHECK(r.a == s.a);
            CHECK(r.b == s.b);
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("solve_levels agrees with an independent scan") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> sb(0.5, 5.0), sq(-10.0, -1.0), sc(-0.5, 2.0), l(0.2, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        // Coulomb and oscillator classes have infinitely many levels; bracket them on a finite window
        const bool coulomb = trial % 2 == 0;
        const auto spec = coulomb ? make_spec(0, 0, l(rng), sb(rng), sq(rng), sc(rng))
                                  : make_spec(0, l(rng), 0, sb(rng), sq(rng), sc(rng));
        const auto scan = solve_levels(spec, 3);
        double prev = -INFINITY;
        for (int n = 0; n <= 3; ++n) {
            const auto* s = scan.find(n);
            const double lo = coulomb ? -200.0 : -50.0;
            const double hi = coulomb ? spec.sigma_beta / spec.lambda2 - 1e-12 : 200.0;
            const auto ref = lowest_root(spec, n, lo, hi);
            REQUIRE(ref.has_value());
            REQUIRE(s != nullptr);
            CHECK(std::abs(s->E - *ref) < 1e-9 * std::max(1.0, std::abs(*ref)));
            CHECK(s->E > prev);
            prev = s->E;
        }
    }
}

TEST_CASE("level parameters depend on n when lambda2 or lambda0 is nonzero") {
    const auto c = solve_levels(kCoulomb, 3);
    CHECK(c.states[0].a != doctest::Approx(c.states[3].a));
    const auto spec = make_spec(0.2, 2.0, 0, 2.0, -3.0, 3.0);
    const auto s = solve_levels(spec, 3);
    REQUIRE(s.states.size() >= 2);
    CHECK(s.states[0].b != doctest::Approx(s.states[1].b));
}

TEST_CASE("quartic carries every genuine root") {
    for (const auto& spec : {kOscillator, kCoulomb, kMorse, make_spec(0.5, 1.0, 0.2, 2.0, -6.0, 0.4)}) {
        const auto scan = solve_levels(spec, 3);
        for (const auto& s : scan.states) {
            const auto p = energy_quartic(spec, s.n);
            double val = 0.0, mag = 0.0;
            for (std::size_t k = p.size(); k-- > 0;) {
                val = val * s.E + p[k];
                mag = mag * std::abs(s.E) + std::abs(p[k]);
            }
            CHECK(std::abs(val) < 1e-9 * std::max(1.0, mag));

            const auto roots = quartic_roots_all(spec, s.n);
            bool found = false;
            for (const auto& r : roots)
                if (r.genuine && std::abs(r.E - s.E) < 1e-9 * std::max(1.0, std::abs(s.E))) found = true;
            CHECK(found);
            for (const auto& r : roots)
                if (r.genuine) CHECK(std::abs(energy_condition(spec, s.n, r.E)) < 1e-8 * std::max(1.0, std::abs(r.E)));
        }
    }
    const auto osc = quartic_roots_all(kOscillator, 0);
    bool has_two = false;
    for (const auto& r : osc) has_two = has_two || (r.genuine && std::abs(r.E - 2.0) < 1e-10);
    CHECK(has_two);
}

TEST_CASE("bound state derived quantities") {
    const auto s = make_bound_state(kOscillator, 1, 4.0);
    CHECK(s.beta() == doctest::Approx(4.0));
    CHECK(s.c() == doctest::Approx(0.0));
    CHECK(s.q0() == doctest::Approx(-2.0));
    CHECK(s.j0() == doctest::Approx(2.0));
    CHECK_THROWS_AS(make_bound_state(kCoulomb, 0, 1.0), DomainError);
}
