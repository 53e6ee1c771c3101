#pragma once

#include "natanzon/mapping.hpp"
#include "natanzon/mass.hpp"
#include "natanzon/spectrum.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace natanzon {

/// How the level scale factor a enters the closed-form state.
///   bare    xi^{(b-1)/2} e^{-xi/2} 1F1(-n; b; a xi)
///   scaled  (a xi)^{(b-1)/2} e^{-a xi/2} 1F1(-n; b; a xi)
/// Both carry the prefactor m^{1/4} R^{1/4}.
enum class WaveVariant { bare, scaled };

std::string_view to_string(WaveVariant v) noexcept;
std::optional<WaveVariant> parse_variant(std::string_view name) noexcept;

/// Variant that matches the finite-difference eigenvectors (see tests/acceptance).
inline constexpr WaveVariant kCalibratedVariant = WaveVariant::scaled;

struct WavefunctionSamples {
    std::vector<double> u;
    std::vector<double> psi_bar;  ///< state in the weighted picture
    std::vector<double> chi;      ///< physical state, psi_bar / sqrt(m)
    std::vector<double> weight;   ///< m(u), the inverse weight factor
    double norm = 0.0;            ///< weighted norm before normalization
    double tail_ratio = 0.0;      ///< max end |psi_bar|^2 over peak |psi_bar|^2
    bool normalized = false;
    BoundState state;
    WaveVariant variant = kCalibratedVariant;
};

struct WaveOptions {
    bool normalize = true;
    /// Throw DivergentNormError unless |psi_bar|^2 at both ends is below
    /// kTailTolerance times its peak.
    bool require_decay = true;
};

inline constexpr double kTailTolerance = 1e-12;

/// Closed-form state sampled on the mapping's grid.
WavefunctionSamples build_wavefunction(const BoundState& state, const ConfluentSpec& spec,
                                       const MappingSolution& mapping, const MassProfile& mass,
                                       WaveVariant variant, WaveOptions options = {});

/// Profile of the state (before the m^{1/4} R^{1/4} prefactor) at one xi.
double state_profile(const BoundState& state, double xi, WaveVariant variant);

/// Weighted product: integral of chi_f m chi_g, equal to the plain integral of
/// psi_bar_f psi_bar_g. Throws GridError if the grids differ.
double weighted_inner_product(const WavefunctionSamples& f, const WavefunctionSamples& g);

/// Gram matrix of the weighted product.
std::vector<std::vector<double>> weighted_gram(const std::vector<WavefunctionSamples>& states);

/// Sign changes of psi_bar in the interior, ignoring samples below
/// 1e-10 of the peak magnitude.
int count_nodes(const WavefunctionSamples& f);

struct ContinuityResult {
    double residual = 0.0;       ///< |(E1 - E2) <psi2|psi1>_W|
    double boundary_flux = 0.0;  ///< [ (psi1 psi2' - psi1' psi2) / (2m) ] across the ends
    bool flagged = false;
};

inline constexpr double kContinuityTolerance = 1e-6;

/// Stationary continuity check for two states of the same operator. The
/// residual must match the boundary flux and both vanish for bound states;
/// `flagged` is set when the residual exceeds kContinuityTolerance.
ContinuityResult continuity_check(const WavefunctionSamples& f, const WavefunctionSamples& g);

/// Largest relative deviation from its mean of the ratio
/// sqrt(m / |xi'|) sqrt(xi) / (m^{1/4} R^{1/4}) over the mapping grid. The two
/// prefactor forms are proportional iff this vanishes.
double prefactor_ratio_spread(const ConfluentSpec& spec, const MappingSolution& mapping,
                              const MassProfile& mass);

}  // namespace natanzon
