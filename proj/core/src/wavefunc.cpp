#include "natanzon/wavefunc.hpp"

#include "natanzon/errors.hpp"
#include "natanzon/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace natanzon {

std::string_view to_string(WaveVariant v) noexcept {
    return v == WaveVariant::bare ? "bare" : "scaled";
}

std::optional<WaveVariant> parse_variant(std::string_view name) noexcept {
    if (name == "bare") return WaveVariant::bare;
    if (name == "scaled") return WaveVariant::scaled;
    return std::nullopt;
}

double state_profile(const BoundState& s, double xi, WaveVariant variant) {
    if (!(xi > 0.0)) throw DomainError(Stage::wavefunc, "xi must be positive");
    const double z = s.a * xi;
    const double x = variant == WaveVariant::scaled ? z : xi;
    // power and exponential combined in log space to avoid 0 * inf
    return std::exp(0.5 * (s.b - 1.0) * std::log(x) - 0.5 * x) * kummer_1f1(s.n, s.b, z);
}

WavefunctionSamples build_wavefunction(const BoundState& state, const ConfluentSpec& spec,
                                       const MappingSolution& mapping, const MassProfile& mass,
                                       WaveVariant variant, WaveOptions options) {
    if (!(state.b > 0.0) || !(state.a > 0.0))
        throw DomainError(Stage::wavefunc, "state fails the normalizability gate b > 0");
    check_grid(mapping.u, 7);

    WavefunctionSamples w;
    w.state = state;
    w.variant = variant;
    w.u = mapping.u;
    const std::size_t n = w.u.size();
    w.psi_bar.resize(n);
    w.chi.resize(n);
    w.weight.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = mass.value(w.u[i]);
        const double R = spec.R(mapping.xi[i]);
        if (!(R > 0.0)) throw SingularPointError(Stage::wavefunc, "R(xi) <= 0 on the state grid");
        w.weight[i] = m;
        w.psi_bar[i] = std::pow(m * R, 0.25) * state_profile(state, mapping.xi[i], variant);
        if (!std::isfinite(w.psi_bar[i])) throw DivergentNormError(Stage::wavefunc, "non-finite state sample");
    }

    std::vector<double> sq(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = w.psi_bar[i] * w.psi_bar[i];
        peak = std::max(peak, sq[i]);
    }
    if (!(peak > 0.0)) throw DivergentNormError(Stage::wavefunc, "state vanishes on the grid");
    w.tail_ratio = std::max(sq.front(), sq.back()) / peak;
    if (options.require_decay && w.tail_ratio >= kTailTolerance)
        throw DivergentNormError(Stage::wavefunc, "state has not decayed at the domain ends; extend the domain");

    const double nn = integrate(w.u, sq);
    if (!(nn > 0.0) || !std::isfinite(nn)) throw DivergentNormError(Stage::wavefunc, "weighted norm quadrature failed");
    w.norm = std::sqrt(nn);
    if (options.normalize) {
        for (double& v : w.psi_bar) v /= w.norm;
        w.normalized = true;
    }
    for (std::size_t i = 0; i < n; ++i) w.chi[i] = w.psi_bar[i] / std::sqrt(w.weight[i]);
    return w;
}

namespace {

void require_same_grid(const WavefunctionSamples& f, const WavefunctionSamples& g) {
    if (f.u.size() != g.u.size() || !std::equal(f.u.begin(), f.u.end(), g.u.begin()))
        throw GridError(Stage::wavefunc, "states live on different grids");
}

}  // namespace

double weighted_inner_product(const WavefunctionSamples& f, const WavefunctionSamples& g) {
    require_same_grid(f, g);
    std::vector<double> prod(f.u.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.psi_bar[i] * g.psi_bar[i];
    return integrate(f.u, prod);
}

std::vector<std::vector<double>> weighted_gram(const std::vector<WavefunctionSamples>& states) {
    const std::size_t k = states.size();
    std::vector<std::vector<double>> g(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) g[i][j] = g[j][i] = weighted_inner_product(states[i], states[j]);
    return g;
}

int count_nodes(const WavefunctionSamples& f) {
    double peak = 0.0;
    for (double v : f.psi_bar) peak = std::max(peak, std::abs(v));
    const double floor = 1e-10 * peak;
    int nodes = 0;
    int last = 0;
    for (double v : f.psi_bar) {
        if (std::abs(v) <= floor) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++nodes;
        last = s;
    }
    return nodes;
}

ContinuityResult continuity_check(const WavefunctionSamples& f, const WavefunctionSamples& g) {
    require_same_grid(f, g);
    ContinuityResult r;
    const double dE = f.state.E - g.state.E;
    if (dE == 0.0) return r;
    r.residual = std::abs(dE * weighted_inner_product(g, f));

    const auto df = differentiate(f.u, f.psi_bar, 1);
    const auto dg = differentiate(g.u, g.psi_bar, 1);
    auto wronskian = [&](std::size_t i) {
        return (f.psi_bar[i] * dg[i] - df[i] * g.psi_bar[i]) / (2.0 * f.weight[i]);
    };
    r.boundary_flux = wronskian(f.u.size() - 1) - wronskian(0);
    r.flagged = r.residual > kContinuityTolerance;
    return r;
}

double prefactor_ratio_spread(const ConfluentSpec& spec, const MappingSolution& mapping,
                              const MassProfile& mass) {
    std::vector<double> ratio(mapping.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        const double m = mass.value(mapping.u[i]);
        const double xi = mapping.xi[i];
        const double lhs = std::sqrt(m / std::abs(mapping.d1[i])) * std::sqrt(xi);
        ratio[i] = lhs / std::pow(m * spec.R(xi), 0.25);
    }
    double mean = 0.0;
    for (double r : ratio) mean += r;
    mean /= static_cast<double>(ratio.size());
    double worst = 0.0;
    for (double r : ratio) worst = std::max(worst, std::abs(r / mean - 1.0));
    return worst;
}

}  // namespace natanzon
