#pragma once

#include "natanzon/mapping.hpp"
#include "natanzon/mass.hpp"
#include "natanzon/specfun.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace natanzon {

/// von Roos ambiguity parameters; rho is fixed by eta + epsilon + rho = -1.
struct OrderingParams {
    double eta = 0.0;
    double epsilon = -1.0;

    double rho() const noexcept { return -1.0 - eta - epsilon; }
};

/// Which correction joins V in the total potential fed to the eigensolver.
enum class PotentialMode { bare, plus_um, plus_ueff };

std::string_view to_string(PotentialMode mode) noexcept;
std::optional<PotentialMode> parse_mode(std::string_view name) noexcept;

/// Mode that reproduces the closed-form spectrum with the Sturm-Liouville
/// kinetic term and the default ordering (see tests/acceptance).
inline constexpr PotentialMode kCalibratedMode = PotentialMode::plus_ueff;

struct MassCorrections {
    std::vector<double> vm;    ///< ordering-dependent correction
    std::vector<double> um;    ///< ordering-free correction from the Schwarzian split
    std::vector<double> ueff;  ///< vm + um
};

struct PotentialTable {
    std::vector<double> u;
    std::vector<double> xi;
    std::vector<double> v;
    std::vector<double> vm;
    std::vector<double> um;
    std::vector<double> ueff;
    std::vector<double> total;
    OrderingParams ordering;
    PotentialMode mode = kCalibratedMode;
};

/// Confluent potential at a single xi (no mapping needed).
double confluent_potential(const ConfluentSpec& spec, double xi);

/// Confluent potential sampled along a mapping. Throws SingularPointError if
/// R(xi) <= 0 anywhere on the grid.
GridFunction eval_V(const ConfluentSpec& spec, const MappingSolution& mapping);

/// Mass-dependent corrections on the given nodes. Throws DomainError if the
/// mass is not positive there.
MassCorrections eval_mass_corrections(const MassProfile& mass, const OrderingParams& ordering,
                                      std::span<const double> grid);

PotentialTable assemble_effective(const ConfluentSpec& spec, const MappingSolution& mapping,
                                  const MassProfile& mass, const OrderingParams& ordering,
                                  PotentialMode mode = kCalibratedMode);

/// Largest scaled mismatch between {xi,u}/(4m) computed from the mapping
/// derivatives and its closed form in terms of R(xi) and the mass. Each
/// node's difference is divided by max(1, sum of |terms|) so that the check
/// remains meaningful near xi -> 0 where individual terms diverge.
double check_schwarzian_split(const ConfluentSpec& spec, const MappingSolution& mapping,
                              const MassProfile& mass);

}  // namespace natanzon
