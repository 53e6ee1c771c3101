#include <natanzon/errors.hpp>
#include <natanzon/liealg.hpp>
#include <natanzon/mapping.hpp>

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace natanzon;

using L = long double;

namespace {

ComplexGrid<L> gaussian(const std::vector<L>& u, L centre, L width) {
    ComplexGrid<L> f{std::vector<L>(u.size()), std::vector<L>(u.size(), 0)};
    for (std::size_t i = 0; i < u.size(); ++i) {
        const L s = (u[i] - centre) / width;
        f.re[i] = std::exp(-s * s / 2);
    }
    return f;
}

}  // namespace

TEST_CASE("J2 with the identity map is -i u d/du") {
    const auto r = make_realization<L>(AnalyticMap::identity, 1.0, 9.0, 0.0025, 0.75);
    const L c = 5, w = 0.6;
    const auto f = gaussian(r.u, c, w);
    const auto g = apply_generator(r, Generator::J2, f);
    L worst = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const L df = -(r.u[i] - c) / (w * w) * f.re[i];
        CHECK(g.re[i] == 0);
        worst = std::max(worst, std::abs(g.im[i] + r.u[i] * df));
    }
    CHECK(worst < 1e-10L);
}

TEST_CASE("J0 - J1 multiplies by xi/2") {
    for (auto map : {AnalyticMap::identity, AnalyticMap::square, AnalyticMap::exponential}) {
        const auto r = make_realization<L>(map, 0.5, 3.5, 0.0025, 1.25);
        const auto f = gaussian(r.u, 2.0, 0.2);
        const auto a = apply_generator(r, Generator::J0, f);
        const auto b = apply_generator(r, Generator::J1, f);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(std::abs(static_cast<double>(a.re[i] - b.re[i] - r.xi[i] / 2 * f.re[i])) < 1e-10);
    }
}

TEST_CASE("T generators reduce to J generators for a unit scale") {
    auto r = make_realization<L>(AnalyticMap::square, 0.5, 4.5, 0.0025, 0.75);
    attach_scale(r, MassProfile::constant(1.0));
    const auto tests = TestFunctionSet<L>::make(r.u, 5, 1);
    CHECK(t_vs_j_residual(r, tests) == 0.0);
    for (const auto& f : tests.functions) {
        const auto t = apply_generator(r, Generator::T2, f);
        const auto j = apply_generator(r, Generator::J2, f);
        CHECK(t.re == j.re);
        CHECK(t.im == j.im);
    }
}

TEST_CASE("T generators require a scale function") {
    const auto r = make_realization<L>(AnalyticMap::identity, 1.0, 2.0, 0.01, 0.75);
    const auto f = gaussian(r.u, 1.5, 0.05);
    CHECK_THROWS_AS(apply_generator(r, Generator::T0, f), DomainError);
}

TEST_CASE("commutation relations hold for three maps and two Casimir values") {
    struct Case {
        AnalyticMap map;
        double lo, hi;
    };
    for (const Case c : {Case{AnalyticMap::identity, 1, 9}, Case{AnalyticMap::square, 0.5, 4.5}, Case{AnalyticMap::exponential, -3, 3}})
        for (double casimir : {0.75, 1.25}) {
            auto r = make_realization<L>(c.map, c.lo, c.hi, 0.0025, casimir);
            const auto tests = TestFunctionSet<L>::make(r.u, 5, 99);
            CHECK(commutator_residual(r, Generator::J0, Generator::J1, Generator::J2, +1, tests) < 1e-6);
            CHECK(commutator_residual(r, Generator::J2, Generator::J0, Generator::J1, +1, tests) < 1e-6);
            CHECK(commutator_residual(r, Generator::J1, Generator::J2, Generator::J0, -1, tests) < 1e-6);
            // wrong sign is caught
            CHECK(commutator_residual(r, Generator::J0, Generator::J1, Generator::J2, -1, tests) > 1e-2);
            attach_scale(r, MassProfile::exponential(1.0, 0.3));
            CHECK(commutator_residual(r, Generator::T0, Generator::T1, Generator::T2, +1, tests) < 1e-6);
            CHECK(commutator_residual(r, Generator::T1, Generator::T2, Generator::T0, -1, tests) < 1e-6);
        }
}

TEST_CASE("perturbed Casimir in one generator breaks the algebra") {
    const auto r = make_realization<L>(AnalyticMap::square, 0.5, 4.5, 0.0025, 0.75);
    const auto tests = TestFunctionSet<L>::make(r.u, 5, 3);
    CHECK(commutator_residual(r, Generator::J0, Generator::J1, Generator::J2, +1, tests, L(1.25)) > 1e-2);
    CHECK(commutator_residual(r, Generator::J0, Generator::J1, Generator::J2, +1, tests, L(0.75)) < 1e-6);
}

TEST_CASE("commutators on an integrated mapping") {
    ConfluentSpec spec;
    spec.lambda1 = 4;
    const auto map = solve_mapping(spec, MassProfile::rational(1.0, 0.1), Interval{1.0, 5.0}, MappingStart{1.0, 0.5, 1}, 1601);
    auto r = make_realization<L>(map, 0.75);
    const auto tests = TestFunctionSet<L>::make(r.u, 3, 8);
    CHECK(commutator_residual(r, Generator::J0, Generator::J1, Generator::J2, +1, tests) < 1e-6);
    CHECK(commutator_residual(r, Generator::J2, Generator::J0, Generator::J1, +1, tests) < 1e-6);

    const auto coarse = solve_mapping(spec, MassProfile::constant(), std::vector<double>{1.0, 1.1, 1.3, 1.6, 2.0, 2.5, 3.1, 3.8, 4.6, 5.5},
                                      MappingStart{1.0, 0.5, 1});
    CHECK_THROWS_AS(make_realization<L>(coarse, 0.75), GridError);
}

TEST_CASE("[a, b] = 1 for d/dx and x") {
    CHECK(ab_commutator_residual(-6.0, 6.0, 12001, 5, 4) < 1e-10);
}

TEST_CASE("scale identity") {
    auto r = make_realization<__float128>(AnalyticMap::square, 1.0, 13.0, 0.005, 0.75);
    attach_scale(r, MassProfile::rational(1.0, 0.1));
    const auto tests = TestFunctionSet<__float128>::make(r.u, 3, 2);
    CHECK(scale_identity_residual(r, 0.0, 6, tests) < 1e-12);
    double prev = INFINITY;
    for (int k = 0; k <= 6; ++k) {
        const double res = scale_identity_residual(r, 0.1, k, tests);
        CHECK(res < prev);
        prev = res;
    }
    CHECK(prev < 1e-7);
    CHECK_THROWS_AS(scale_identity_residual(r, 0.1, 7, tests), DomainError);
}

TEST_CASE("theta and delta in terms of beta") {
    CHECK(theta_of_beta(1.0) == 0.0);
    CHECK(delta_of_beta(1.0) == 0.0);
    CHECK(theta_of_beta(3.0) == doctest::Approx(0.5));
    CHECK(delta_of_beta(std::exp(2.0)) == doctest::Approx(1.0));
}

TEST_CASE("test functions decay and are reproducible") {
    const auto r = make_realization<L>(AnalyticMap::exponential, -3.0, 3.0, 0.0025, 0.75);
    const auto a = TestFunctionSet<L>::make(r.u, 6, 17);
    const auto b = TestFunctionSet<L>::make(r.u, 6, 17);
    REQUIRE(a.functions.size() == 6);
    for (std::size_t k = 0; k < a.functions.size(); ++k) {
        CHECK(a.functions[k].re == b.functions[k].re);
        L peak = 0;
        for (L v : a.functions[k].re) peak = std::max(peak, std::abs(v));
        CHECK(std::abs(a.functions[k].re.front()) < 1e-14L * peak);
        CHECK(std::abs(a.functions[k].re.back()) < 1e-14L * peak);
    }
}

TEST_CASE("full suite passes with default options") {
    const auto rows = run_algebra_suite();
    CHECK(rows.size() > 30);
    int controls = 0;
    for (const auto& row : rows) {
        INFO(row.check << " " << row.realization << " residual " << row.residual);
        CHECK(row.pass());
        controls += row.expect_above;
    }
    CHECK(controls == 1);
}
