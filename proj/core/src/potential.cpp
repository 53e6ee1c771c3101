#include "natanzon/potential.hpp"

#include "natanzon/errors.hpp"

#include <algorithm>
#include <cmath>

namespace natanzon {

std::string_view to_string(PotentialMode mode) noexcept {
    switch (mode) {
        case PotentialMode::bare: return "V";
        case PotentialMode::plus_um: return "V+Um";
        case PotentialMode::plus_ueff: return "V+Ueff";
    }
    return "?";
}

std::optional<PotentialMode> parse_mode(std::string_view name) noexcept {
    if (name == "V") return PotentialMode::bare;
    if (name == "V+Um") return PotentialMode::plus_um;
    if (name == "V+Ueff") return PotentialMode::plus_ueff;
    return std::nullopt;
}

double confluent_potential(const ConfluentSpec& spec, double xi) {
    const double R = spec.R(xi);
    if (!(R > 0.0)) throw SingularPointError(Stage::potential, "R(xi) <= 0");
    const double num = (spec.sigma_beta * xi + spec.sigma_q0) * xi + spec.sigma_c + 1.0;
    return num / R + (spec.lambda1 * xi - spec.lambda2 * xi * xi) / (R * R) -
           1.25 * xi * xi * spec.delta() / (R * R * R);
}

GridFunction eval_V(const ConfluentSpec& spec, const MappingSolution& mapping) {
    std::vector<double> v(mapping.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = confluent_potential(spec, mapping.xi[i]);
    return GridFunction(mapping.u, std::move(v));
}

MassCorrections eval_mass_corrections(const MassProfile& mass, const OrderingParams& ord,
                                      std::span<const double> grid) {
    mass.check_positive(grid);
    const double e = ord.eta, eps = ord.epsilon;
    const double a_vm = ((1.0 + 2.0 * e) * (1.0 + 2.0 * e) + 4.0 * eps * (1.0 + e)) / 8.0;
    const double b_vm = eps / 4.0;
    const double a_ue = (4.0 * (1.0 + 2.0 * e) * (1.0 + 2.0 * e) + 16.0 * eps * (1.0 + e) + 5.0) / 32.0;
    const double b_ue = (2.0 * eps + 1.0) / 8.0;

    MassCorrections out;
    out.vm.resize(grid.size());
    out.um.resize(grid.size());
    out.ueff.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = mass.value(grid[i]);
        const double dm = mass.d1(grid[i]);
        const double d2m = mass.d2(grid[i]);
        const double s1 = dm * dm / (m * m * m);
        const double s2 = d2m / (m * m);
        out.vm[i] = a_vm * s1 - b_vm * s2;
        out.um[i] = 5.0 / 32.0 * s1 - 1.0 / 8.0 * s2;
        out.ueff[i] = a_ue * s1 - b_ue * s2;
    }
    return out;
}

PotentialTable assemble_effective(const ConfluentSpec& spec, const MappingSolution& mapping,
                                  const MassProfile& mass, const OrderingParams& ordering,
                                  PotentialMode mode) {
    const GridFunction v = eval_V(spec, mapping);
    MassCorrections corr = eval_mass_corrections(mass, ordering, mapping.u);

    PotentialTable t;
    t.u = mapping.u;
    t.xi = mapping.xi;
    t.v.assign(v.f().begin(), v.f().end());
    t.total.resize(t.v.size());
    for (std::size_t i = 0; i < t.v.size(); ++i) {
        switch (mode) {
            case PotentialMode::bare: t.total[i] = t.v[i]; break;
            case PotentialMode::plus_um: t.total[i] = t.v[i] + corr.um[i]; break;
            case PotentialMode::plus_ueff: t.total[i] = t.v[i] + corr.ueff[i]; break;
        }
        if (!std::isfinite(t.total[i])) throw DomainError(Stage::potential, "non-finite total potential");
    }
    t.vm = std::move(corr.vm);
    t.um = std::move(corr.um);
    t.ueff = std::move(corr.ueff);
    t.ordering = ordering;
    t.mode = mode;
    return t;
}

double check_schwarzian_split(const ConfluentSpec& spec, const MappingSolution& mapping,
                              const MassProfile& mass) {
    const MassCorrections corr = eval_mass_corrections(mass, OrderingParams{}, mapping.u);
    double worst = 0.0;
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        const double xi = mapping.xi[i];
        const double m = mass.value(mapping.u[i]);
        const double lhs = schwarzian(mapping.d1[i], mapping.d2[i], mapping.d3[i]) / (4.0 * m);
        const double R = spec.R(xi);
        const double dR = spec.dR(xi);
        const double t1 = -1.0 / R;
        const double t2 = -(xi * xi * spec.d2R() + xi * dR) / (R * R);
        const double t3 = 1.25 * xi * xi * dR * dR / (R * R * R);
        const double t4 = -corr.um[i];
        const double rhs = t1 + t2 + t3 + t4;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4)});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

}  // namespace natanzon
