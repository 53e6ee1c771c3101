#pragma once

#include "natanzon/mapping.hpp"

#include <optional>
#include <vector>

namespace natanzon {

/// A level of the confluent family: quantum number n, energy E and the two
/// level parameters a (> 0, plays the role of a scale factor) and b (> 0).
struct BoundState {
    int n = 0;
    double E = 0.0;
    double a = 0.0;
    double b = 0.0;

    double beta() const noexcept { return a * a; }
    double c() const noexcept { return 0.5 * b * (0.5 * b - 1.0); }
    double q0() const noexcept { return -0.5 * a * (0.5 * b + n); }
    double j0() const noexcept;

    /// |q0 + (sqrt(beta)/4)(2n + 1 + sqrt(1 + 4c))|
    double q0_residual() const;
};

/// Builds a BoundState from (n, E) with a = sqrt(sigma_beta - lambda2 E) and
/// b = 1 + sqrt(1 + sigma_c - lambda0 E). Throws DomainError if a radicand
/// is invalid.
BoundState make_bound_state(const ConfluentSpec& spec, int n, double E);

/// |2a(2n + b) - (lambda1 E - sigma_q0)| for the state's own a, b.
double linear_residual(const ConfluentSpec& spec, const BoundState& s);
/// |a^2 - (sigma_beta - lambda2 E)| / max(1, a^2)
double beta_residual(const ConfluentSpec& spec, const BoundState& s);
/// |b(b-2) - (sigma_c - lambda0 E)| / max(1, |b(b-2)|)
double c_residual(const ConfluentSpec& spec, const BoundState& s);

/// Energy condition F(E) = (lambda1 E - sigma_q0) / (2 sqrt(sigma_beta - lambda2 E))
///                        - sqrt(1 + sigma_c - lambda0 E) - (2n + 1).
/// Throws DomainError outside the radicand-valid set.
double energy_condition(const ConfluentSpec& spec, int n, double E);

/// Set of energies where both radicands are valid. Either end may be
/// infinite; `lo_open`/`hi_open` mark strict inequalities.
struct EnergyInterval {
    double lo;
    double hi;
    bool lo_open;
    bool hi_open;
};
std::optional<EnergyInterval> valid_energy_interval(const ConfluentSpec& spec);

/// Outcome of a level scan. `missing` lists every n <= n_max without an
/// admissible root (finite spectra).
struct LevelScan {
    std::vector<BoundState> states;
    std::vector<int> missing;
    bool empty_interval = false;

    const BoundState* find(int n) const;
};

inline constexpr int kScanBrackets = 10000;

/// Bracket-and-bisect solution of the energy condition for n = 0..n_max.
LevelScan solve_levels(const ConfluentSpec& spec, int n_max);

/// Polynomial (coefficients low to high degree, at most 4) obtained by
/// squaring the energy condition twice.
std::vector<double> energy_quartic(const ConfluentSpec& spec, int n);

struct QuarticRoot {
    double E;
    bool genuine;
};

/// All real roots of energy_quartic via companion-matrix eigenvalues,
/// tagged genuine if they satisfy the unsquared energy condition.
std::vector<QuarticRoot> quartic_roots_all(const ConfluentSpec& spec, int n);

}  // namespace natanzon
