#pragma once

#include "natanzon/mapping.hpp"
#include "natanzon/mass.hpp"
#include "natanzon/potential.hpp"
#include "natanzon/spectrum.hpp"
#include "natanzon/wavefunc.hpp"

#include <optional>
#include <string>
#include <vector>

namespace natanzon {

/// Bound-state problem -(1/(2m) psi')' + V psi = E psi on a uniform grid with
/// psi = 0 at both end nodes.
struct FDProblem {
    std::vector<double> u;
    std::vector<double> mass;
    std::vector<double> potential;

    double h() const { return (u.back() - u.front()) / static_cast<double>(u.size() - 1); }
    /// Throws GridError/DomainError unless N >= 201, the grid is uniform,
    /// m > 0 and V is finite everywhere.
    void validate() const;
};

inline constexpr std::size_t kMinOraclePoints = 201;
inline constexpr int kMaxEigenpairs = 12;

/// Symmetric tridiagonal matrix acting on the interior nodes.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  ///< off[i] couples i and i+1

    std::size_t size() const noexcept { return diag.size(); }
    double norm_inf() const;
    std::vector<double> apply(const std::vector<double>& v) const;
    /// Number of eigenvalues strictly below x (Sturm sequence).
    int count_below(double x) const;
};

/// Three-point conservative discretization with midpoint masses
/// m_{i+1/2} = (m_i + m_{i+1}) / 2.
SymTridiagonal discretize(const FDProblem& problem);

struct EigenPairs {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  ///< unit Euclidean norm, interior nodes only
    std::vector<double> residuals;             ///< ||(A - lambda) v|| / ||v||
};

/// k algebraically smallest eigenpairs by Sturm bisection and inverse
/// iteration. Throws ConvergenceError if an iteration cap is hit or a
/// residual stays above max(1e-9, 1e-13 ||A||).
EigenPairs eigen_lowest(const SymTridiagonal& a, int k);

/// Interior vector padded with the two Dirichlet zeros.
std::vector<double> with_boundary(const std::vector<double>& interior);

struct SpectralRow {
    int n = 0;
    std::string status;  ///< "ok" or "no-root"
    double E_closed = 0.0;
    double E_oracle = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    double overlap = 0.0;
    double ortho_residual = 0.0;
    int nodes = 0;
};

struct Calibration {
    bool mode_auto = false;
    bool variant_auto = false;
    std::vector<std::pair<PotentialMode, double>> mode_errors;     ///< max relative |dE| per candidate
    std::vector<std::pair<WaveVariant, double>> variant_overlaps;  ///< ground-state overlap per candidate
};

struct ValidationInput {
    ConfluentSpec spec;
    MassProfile mass = MassProfile::constant(1.0);
    OrderingParams ordering;
    std::optional<PotentialMode> mode;   ///< empty: calibrate
    std::optional<WaveVariant> variant;  ///< empty: calibrate
    int n_max = 3;
    Interval domain{0.0, 1.0};
    int points = 8001;
    MappingStart start;
    bool pad = true;
};

struct SpectralReport {
    std::vector<SpectralRow> rows;
    Interval requested;
    Interval domain;
    int points = 0;
    int padding_steps = 0;
    bool tails_ok = true;
    bool closed_form_mapping = false;
    PotentialMode mode = kCalibratedMode;
    WaveVariant variant = kCalibratedVariant;
    OrderingParams ordering;
    Calibration calibration;

    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    double min_overlap = 1.0;
    double gram_residual = 0.0;
    double continuity_residual = 0.0;
    double schwarzian_residual = 0.0;
    double eigen_residual = 0.0;

    std::vector<double> u;
    std::vector<WavefunctionSamples> states;         ///< closed-form states that exist, by n
    std::vector<std::vector<double>> oracle_vectors;  ///< by n, unit weighted norm, sign-aligned
};

/// Full pipeline: mapping, potential, levels, states and the finite-difference
/// oracle, with automatic domain padding and optional calibration of the
/// potential mode and state variant. Errors carry their originating stage.
SpectralReport validate(const ValidationInput& input);

/// Overlap |integral f g du| of two samples on the same grid, each normalized
/// by its own integral of squares.
double normalized_overlap(const std::vector<double>& u, const std::vector<double>& f, const std::vector<double>& g);

}  // namespace natanzon
