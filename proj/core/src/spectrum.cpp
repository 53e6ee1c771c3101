#include "natanzon/spectrum.hpp"

#include "natanzon/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace natanzon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double a_squared(const ConfluentSpec& s, double E) { return s.sigma_beta - s.lambda2 * E; }
double b_radicand(const ConfluentSpec& s, double E) { return 1.0 + s.sigma_c - s.lambda0 * E; }

// Magnitude used to judge |F(E)| against round-off.
double condition_scale(const ConfluentSpec& s, int n, double E) {
    const double A2 = a_squared(s, E);
    const double B2 = b_radicand(s, E);
    const double first = A2 > 0.0 ? std::abs(s.lambda1 * E - s.sigma_q0) / (2.0 * std::sqrt(A2)) : 0.0;
    return std::max({1.0, first, std::sqrt(std::max(B2, 0.0)) + 2.0 * n + 1.0});
}

using Poly = std::vector<double>;

Poly mul(const Poly& p, const Poly& q) {
    Poly r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

Poly add(const Poly& p, const Poly& q, double sq = 1.0) {
    Poly r(std::max(p.size(), q.size()), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) r[i] += p[i];
    for (std::size_t i = 0; i < q.size(); ++i) r[i] += sq * q[i];
    return r;
}

double horner(const Poly& p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

double horner_d(const Poly& p, double x) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * p[i];
    return acc;
}

// Drops leading coefficients that are negligible against the largest one.
Poly trimmed(Poly p) {
    double big = 0.0;
    for (double c : p) big = std::max(big, std::abs(c));
    while (!p.empty() && std::abs(p.back()) <= 1e-14 * big) p.pop_back();
    return p;
}

// Cauchy bound on the moduli of the roots of p (trimmed, degree >= 1).
double cauchy_bound(const Poly& p) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) worst = std::max(worst, std::abs(p[i] / p.back()));
    return 1.0 + worst;
}

}  // namespace

double BoundState::j0() const noexcept { return n + 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * c())); }

double BoundState::q0_residual() const {
    return std::abs(q0() + 0.25 * std::sqrt(beta()) * (2.0 * n + 1.0 + std::sqrt(1.0 + 4.0 * c())));
}

BoundState make_bound_state(const ConfluentSpec& spec, int n, double E) {
    const double A2 = a_squared(spec, E);
    const double B2 = b_radicand(spec, E);
    if (!(A2 > 0.0) || B2 < 0.0) throw DomainError(Stage::spectrum, "level parameters undefined at this energy");
    return BoundState{n, E, std::sqrt(A2), 1.0 + std::sqrt(B2)};
}

double linear_residual(const ConfluentSpec& spec, const BoundState& s) {
    return std::abs(2.0 * s.a * (2.0 * s.n + s.b) - (spec.lambda1 * s.E - spec.sigma_q0));
}

double beta_residual(const ConfluentSpec& spec, const BoundState& s) {
    return std::abs(s.a * s.a - a_squared(spec, s.E)) / std::max(1.0, s.a * s.a);
}

double c_residual(const ConfluentSpec& spec, const BoundState& s) {
    const double lhs = s.b * (s.b - 2.0);
    return std::abs(lhs - (spec.sigma_c - spec.lambda0 * s.E)) / std::max(1.0, std::abs(lhs));
}

double energy_condition(const ConfluentSpec& spec, int n, double E) {
    const double A2 = a_squared(spec, E);
    const double B2 = b_radicand(spec, E);
    if (!(A2 > 0.0) || B2 < 0.0) throw DomainError(Stage::spectrum, "energy outside the radicand-valid interval");
    return (spec.lambda1 * E - spec.sigma_q0) / (2.0 * std::sqrt(A2)) - std::sqrt(B2) - (2.0 * n + 1.0);
}

std::optional<EnergyInterval> valid_energy_interval(const ConfluentSpec& spec) {
    EnergyInterval iv{-kInf, kInf, true, true};
    // sigma_beta - lambda2 E > 0
    if (spec.lambda2 > 0.0) {
        iv.hi = spec.sigma_beta / spec.lambda2;
        iv.hi_open = true;
    } else if (spec.lambda2 < 0.0) {
        iv.lo = spec.sigma_beta / spec.lambda2;
        iv.lo_open = true;
    } else if (!(spec.sigma_beta > 0.0)) {
        return std::nullopt;
    }
    // 1 + sigma_c - lambda0 E >= 0
    const double t = 1.0 + spec.sigma_c;
    if (spec.lambda0 > 0.0) {
        const double e = t / spec.lambda0;
        if (e < iv.hi) {
            iv.hi = e;
            iv.hi_open = false;
        } else if (e == iv.hi) {
            iv.hi_open = true;
        }
    } else if (spec.lambda0 < 0.0) {
        const double e = t / spec.lambda0;
        if (e > iv.lo) {
            iv.lo = e;
            iv.lo_open = false;
        } else if (e == iv.lo) {
            iv.lo_open = true;
        }
    } else if (t < 0.0) {
        return std::nullopt;
    }
    if (iv.lo > iv.hi || (iv.lo == iv.hi && (iv.lo_open || iv.hi_open))) return std::nullopt;
    return iv;
}

const BoundState* LevelScan::find(int n) const {
    for (const auto& s : states)
        if (s.n == n) return &s;
    return nullptr;
}

std::vector<double> energy_quartic(const ConfluentSpec& spec, int n) {
    const double k = 2.0 * n + 1.0;
    const Poly A2{spec.sigma_beta, -spec.lambda2};
    const Poly B2{1.0 + spec.sigma_c, -spec.lambda0};
    const Poly lin{-spec.sigma_q0, spec.lambda1};
    // (lambda1 E - sigma_q0) = 2A(B + k)  =>  lin^2 - 4A^2(B^2 + k^2) = 8 k A^2 B
    const Poly L = add(mul(lin, lin), mul(A2, add(B2, Poly{k * k})), -4.0);
    const Poly rhs = mul(mul(A2, A2), B2);
    Poly P = add(mul(L, L), rhs, -64.0 * k * k);
    P.resize(5, 0.0);
    return P;
}

std::vector<QuarticRoot> quartic_roots_all(const ConfluentSpec& spec, int n) {
    const Poly full = energy_quartic(spec, n);
    const Poly p = trimmed(full);
    std::vector<QuarticRoot> out;
    if (p.size() < 2) return out;
    const int deg = static_cast<int>(p.size()) - 1;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p.back();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto ev = solver.eigenvalues();

    std::vector<double> real_roots;
    for (int i = 0; i < deg; ++i) {
        const double re = ev[i].real();
        const double im = ev[i].imag();
        if (std::abs(im) > 1e-6 * std::max(1.0, std::abs(re))) continue;
        // Newton polish on the polynomial.
        double x = re;
        for (int it = 0; it < 8; ++it) {
            const double d = horner_d(p, x);
            if (d == 0.0) break;
            const double step = horner(p, x) / d;
            const double nx = x - step;
            if (!std::isfinite(nx) || std::abs(horner(p, nx)) > std::abs(horner(p, x))) break;
            x = nx;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        real_roots.push_back(x);
    }
    std::sort(real_roots.begin(), real_roots.end());
    for (double x : real_roots) {
        if (!out.empty() && std::abs(out.back().E - x) <= 1e-10 * std::max(1.0, std::abs(x))) continue;
        bool genuine = false;
        const double A2 = a_squared(spec, x);
        double B2 = b_radicand(spec, x);
        if (B2 < 0.0 && B2 > -1e-12 * std::max(1.0, std::abs(spec.lambda0 * x))) B2 = 0.0;
        if (A2 > 0.0 && B2 >= 0.0) {
            const double F = (spec.lambda1 * x - spec.sigma_q0) / (2.0 * std::sqrt(A2)) - std::sqrt(B2) -
                             (2.0 * n + 1.0);
            genuine = std::abs(F) <= 1e-8 * condition_scale(spec, n, x);
        }
        out.push_back({x, genuine});
    }
    return out;
}

LevelScan solve_levels(const ConfluentSpec& spec, int n_max) {
    LevelScan scan;
    const auto iv = valid_energy_interval(spec);
    if (!iv) {
        scan.empty_interval = true;
        for (int n = 0; n <= n_max; ++n) scan.missing.push_back(n);
        return scan;
    }
    for (int n = 0; n <= n_max; ++n) {
        // Finite scan window: the valid interval clipped to a root bound of
        // the squared condition (every root of F is a root of that polynomial).
        const Poly p = trimmed(energy_quartic(spec, n));
        const double bound = p.size() >= 2 ? cauchy_bound(p) + 1.0 : 1e6;
        double lo = std::max(iv->lo, -bound);
        double hi = std::min(iv->hi, bound);
        if (iv->lo_open && lo == iv->lo) lo += 1e-13 * std::max(1.0, std::abs(lo));
        if (iv->hi_open && hi == iv->hi) hi -= 1e-13 * std::max(1.0, std::abs(hi));
        // Closed ends can round to a slightly negative radicand.
        auto valid = [&](double E) { return a_squared(spec, E) > 0.0 && b_radicand(spec, E) >= 0.0; };
        for (int k = 0; k < 64 && lo < hi && !valid(lo); ++k) lo = std::nextafter(lo, hi);
        for (int k = 0; k < 64 && lo < hi && !valid(hi); ++k) hi = std::nextafter(hi, lo);
        if (!valid(lo) || !valid(hi)) hi = lo;

        std::vector<double> roots;
        if (lo < hi) {
            auto F = [&](double E) { return energy_condition(spec, n, E); };
            const double width = (hi - lo) / kScanBrackets;
            double e_prev = lo;
            double f_prev = F(lo);
            if (f_prev == 0.0) roots.push_back(lo);
            for (int i = 1; i <= kScanBrackets; ++i) {
                const double e = i == kScanBrackets ? hi : lo + i * width;
                const double f = F(e);
                if (f == 0.0) {
                    roots.push_back(e);
                } else if (f_prev != 0.0 && (f_prev < 0.0) != (f < 0.0)) {
                    double a = e_prev, b = e, fa = f_prev;
                    while (b - a > 1e-12 * std::max(1.0, std::abs(a))) {
                        const double mid = 0.5 * (a + b);
                        if (mid <= a || mid >= b) break;
                        const double fm = F(mid);
                        if (fm == 0.0) {
                            a = b = mid;
                            break;
                        }
                        if ((fm < 0.0) == (fa < 0.0)) {
                            a = mid;
                            fa = fm;
                        } else {
                            b = mid;
                        }
                    }
                    const double r = 0.5 * (a + b);
                    // Reject sign flips that are not zeros.
                    if (std::abs(F(r)) <= 1e-8 * condition_scale(spec, n, r)) roots.push_back(r);
                }
                e_prev = e;
                f_prev = f;
            }
        }

        std::vector<BoundState> passing;
        for (double r : roots) {
            const BoundState s = make_bound_state(spec, n, r);
            if (!(s.a > 0.0) || !(s.b > 0.0)) continue;
            const double scale = std::max({1.0, std::abs(spec.lambda1 * r - spec.sigma_q0), 2.0 * s.a * (2.0 * n + s.b)});
            if (linear_residual(spec, s) > 1e-8 * scale) continue;
            passing.push_back(s);
        }
        if (passing.empty()) {
            scan.missing.push_back(n);
            continue;
        }
        const auto best = std::min_element(passing.begin(), passing.end(),
                                           [](const BoundState& x, const BoundState& y) { return x.E < y.E; });
        scan.states.push_back(*best);
    }
    return scan;
}

}  // namespace natanzon
