#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace natanzon {

enum class MassFamily { constant, exponential, rational, sech2, tabulated, custom };

std::string_view to_string(MassFamily family) noexcept;

/// Positive, twice-differentiable effective mass m(u) with its first two
/// derivatives. Families:
///   constant     m0
///   exponential  m0 exp(kappa u)
///   rational     m0 / (1 + kappa u^2)          (kappa >= 0)
///   sech2        m0 (1 + kappa sech^2(u))      (kappa > -1)
///   tabulated    natural cubic spline through (u_i, m_i)
///   custom       user callbacks
class MassProfile {
public:
    using Fn = std::function<double(double)>;

    static MassProfile constant(double m0 = 1.0);
    static MassProfile exponential(double m0, double kappa);
    static MassProfile rational(double m0, double kappa);
    static MassProfile sech2(double m0, double kappa);
    static MassProfile tabulated(std::vector<double> u, std::vector<double> m);
    static MassProfile custom(std::string name, Fn m, Fn dm, Fn d2m);

    MassFamily family() const noexcept { return family_; }
    double m0() const noexcept { return m0_; }
    double kappa() const noexcept { return kappa_; }
    const std::string& name() const noexcept { return name_; }
    bool is_constant() const noexcept { return family_ == MassFamily::constant; }

    double value(double u) const;
    double d1(double u) const;
    double d2(double u) const;

    /// Throws DomainError unless m > 0 at every given node.
    void check_positive(std::span<const double> u) const;

    /// Largest relative mismatch between the analytic m', m'' and 4th-order
    /// central differences of m on a probe grid of the given spacing.
    double derivative_consistency(double u_min, double u_max, double h) const;

    /// Tabulated nodes (empty for analytic families).
    std::span<const double> table_u() const noexcept;
    std::span<const double> table_m() const noexcept;

private:
    struct Spline;

    MassProfile(MassFamily family, double m0, double kappa);

    MassFamily family_;
    double m0_;
    double kappa_;
    std::string name_;
    std::shared_ptr<const Spline> spline_;
    Fn fn_[3];
};

}  // namespace natanzon
