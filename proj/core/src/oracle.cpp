#include "natanzon/oracle.hpp"

#include "natanzon/errors.hpp"
#include "natanzon/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace natanzon {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void scale_to_unit(std::vector<double>& v) {
    const double n = std::sqrt(dot(v, v));
    if (!(n > 0.0)) throw ConvergenceError(Stage::oracle, "inverse iteration collapsed to zero");
    for (double& x : v) x /= n;
}

// Tridiagonal LU with partial pivoting (the LAPACK gttrf/gtts2 scheme).
class ShiftedLU {
public:
    ShiftedLU(const SymTridiagonal& a, double shift) : n_(a.size()) {
        dl_ = a.off;
        du_ = a.off;
        d_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) d_[i] = a.diag[i] - shift;
        du2_.assign(n_ > 2 ? n_ - 2 : 0, 0.0);
        swap_.assign(n_ > 0 ? n_ - 1 : 0, false);
        tiny_ = kEps * std::max(1.0, a.norm_inf());
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0) d_[i] = tiny_;
                const double f = dl_[i] / d_[i];
                dl_[i] = f;
                d_[i + 1] -= f * du_[i];
            } else {
                const double f = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = f;
                const double t = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = t - f * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -f * du_[i + 1];
                }
                swap_[i] = true;
            }
        }
        if (n_ > 0 && d_[n_ - 1] == 0.0) d_[n_ - 1] = tiny_;
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (swap_[i]) {
                const double t = b[i] - dl_[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = t;
            } else {
                b[i + 1] -= dl_[i] * b[i];
            }
        }
        b[n_ - 1] /= d_[n_ - 1];
        if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
        for (std::size_t i = n_ >= 3 ? n_ - 3 : 0; n_ >= 3; --i) {
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
            if (i == 0) break;
        }
    }

private:
    std::size_t n_;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<bool> swap_;
    double tiny_;
};

double residual_norm(const SymTridiagonal& a, const std::vector<double>& v, double lambda) {
    auto av = a.apply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = av[i] - lambda * v[i];
        s += r * r;
    }
    return std::sqrt(s) / std::sqrt(dot(v, v));
}

}  // namespace

void FDProblem::validate() const {
    if (u.size() < kMinOraclePoints) throw GridError(Stage::oracle, "oracle grid needs at least 201 points");
    if (mass.size() != u.size() || potential.size() != u.size())
        throw GridError(Stage::oracle, "mass/potential samples do not match the grid");
    check_grid(u, kMinOraclePoints);
    const double step = h();
    for (std::size_t i = 1; i < u.size(); ++i)
        if (std::abs((u[i] - u[i - 1]) - step) > 1e-6 * step) throw GridError(Stage::oracle, "oracle grid must be uniform");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(mass[i] > 0.0) || !std::isfinite(mass[i])) throw DomainError(Stage::oracle, "mass must be positive");
        // the end nodes carry the Dirichlet condition and never enter the matrix
        if (i > 0 && i + 1 < u.size() && !std::isfinite(potential[i]))
            throw DomainError(Stage::oracle, "potential is not finite on the interior");
    }
}

double SymTridiagonal::norm_inf() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double row = std::abs(diag[i]);
        if (i > 0) row += std::abs(off[i - 1]);
        if (i < off.size()) row += std::abs(off[i]);
        worst = std::max(worst, row);
    }
    return worst;
}

std::vector<double> SymTridiagonal::apply(const std::vector<double>& v) const {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double s = diag[i] * v[i];
        if (i > 0) s += off[i - 1] * v[i - 1];
        if (i < off.size()) s += off[i] * v[i + 1];
        r[i] = s;
    }
    return r;
}

int SymTridiagonal::count_below(double x) const {
    int count = 0;
    double q = 1.0;
    const double tiny = kEps * std::max(1.0, norm_inf()) * 1e-3;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double e2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
        q = diag[i] - x - (i > 0 ? e2 / q : 0.0);
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
    }
    return count;
}

SymTridiagonal discretize(const FDProblem& p) {
    p.validate();
    const std::size_t n = p.u.size();
    const double h = p.h();
    const double s = 1.0 / (2.0 * h * h);
    SymTridiagonal a;
    a.diag.resize(n - 2);
    a.off.resize(n - 3);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double m_lo = 0.5 * (p.mass[i - 1] + p.mass[i]);
        const double m_hi = 0.5 * (p.mass[i] + p.mass[i + 1]);
        a.diag[i - 1] = s * (1.0 / m_lo + 1.0 / m_hi) + p.potential[i];
        if (i + 2 < n) a.off[i - 1] = -s / m_hi;
    }
    return a;
}

EigenPairs eigen_lowest(const SymTridiagonal& a, int k) {
    if (k < 1 || k > kMaxEigenpairs) throw DomainError(Stage::oracle, "eigenpair count must lie in 1..12");
    const std::size_t n = a.size();
    if (static_cast<std::size_t>(k) > n) throw GridError(Stage::oracle, "more eigenpairs requested than unknowns");

    // Gershgorin interval
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(a.off[i - 1]);
        if (i < a.off.size()) r += std::abs(a.off[i]);
        lo = std::min(lo, a.diag[i] - r);
        hi = std::max(hi, a.diag[i] + r);
    }
    const double norm = a.norm_inf();
    const double abs_tol = 2.0 * kEps * std::max(1.0, norm);

    EigenPairs out;
    double floor = lo;
    for (int j = 0; j < k; ++j) {
        double l = floor, r = hi;
        int it = 0;
        while (r - l > std::max(abs_tol, 4.0 * kEps * std::max(std::abs(l), std::abs(r)))) {
            const double mid = 0.5 * (l + r);
            if (mid <= l || mid >= r) break;
            if (a.count_below(mid) > j)
                r = mid;
            else
                l = mid;
            if (++it > 400) throw ConvergenceError(Stage::oracle, "bisection did not converge");
        }
        const double lambda = 0.5 * (l + r);
        out.values.push_back(lambda);
        floor = l;
    }

    const double tol = std::max(1e-9, 1e-13 * norm);
    for (int j = 0; j < k; ++j) {
        const double lambda = out.values[static_cast<std::size_t>(j)];
        const ShiftedLU lu(a, lambda);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.25 * std::sin(0.6180339887 * static_cast<double>(i + 1));
        scale_to_unit(v);
        double res = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 12; ++it) {
            lu.solve(v);
            // keep clustered eigenvectors apart
            for (int p = 0; p < j; ++p)
                if (std::abs(out.values[static_cast<std::size_t>(p)] - lambda) < 1e-8 * std::max(1.0, norm)) {
                    const auto& w = out.vectors[static_cast<std::size_t>(p)];
                    const double c = dot(v, w);
                    for (std::size_t i = 0; i < n; ++i) v[i] -= c * w[i];
                }
            scale_to_unit(v);
            res = residual_norm(a, v, lambda);
            if (it >= 2 && res < tol) break;
        }
        if (!(res < tol)) throw ConvergenceError(Stage::oracle, "inverse iteration residual above tolerance");
        // deterministic sign: largest-magnitude component positive
        const auto big = std::max_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        if (*big < 0.0)
            for (double& x : v) x = -x;
        out.vectors.push_back(std::move(v));
        out.residuals.push_back(res);
    }
    return out;
}

std::vector<double> with_boundary(const std::vector<double>& interior) {
    std::vector<double> v(interior.size() + 2, 0.0);
    std::copy(interior.begin(), interior.end(), v.begin() + 1);
    return v;
}

double normalized_overlap(const std::vector<double>& u, const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> ff(u.size()), gg(u.size()), fg(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        ff[i] = f[i] * f[i];
        gg[i] = g[i] * g[i];
        fg[i] = f[i] * g[i];
    }
    const double o = std::abs(integrate(u, fg)) / std::sqrt(integrate(u, ff) * integrate(u, gg));
    return std::min(o, 1.0);
}

namespace {

constexpr double kPadTolerance = 1e-10;
constexpr int kMaxPadSteps = 8;
constexpr double kPadFraction = 0.25;

MappingSolution build_mapping(const ValidationInput& in, Interval domain, int points, bool& closed) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = domain.lo + domain.span() * static_cast<double>(i) / (points - 1);
    grid.back() = domain.hi;
    if (auto cf = closed_form_mapping(in.spec, in.mass, grid, in.start)) {
        closed = true;
        return *cf;
    }
    closed = false;
    auto sol = solve_mapping(in.spec, in.mass, grid, in.start);
    if (sol.clipped_lo || sol.clipped_hi) {
        // re-grid the surviving range so the oracle keeps N uniform nodes
        const Interval kept = sol.domain();
        for (int i = 0; i < points; ++i)
            grid[static_cast<std::size_t>(i)] = kept.lo + kept.span() * static_cast<double>(i) / (points - 1);
        grid.back() = kept.hi;
        auto again = solve_mapping(in.spec, in.mass, grid, in.start);
        again.clipped_lo = sol.clipped_lo;
        again.clipped_hi = sol.clipped_hi;
        again.requested = sol.requested;
        return again;
    }
    return sol;
}

// An end where xi -> 0 or the mapping was clipped is a singular point of the
// construction; states vanish there by themselves and the end is never moved.
bool natural_end(const MappingSolution& m, bool low) {
    if (low ? m.clipped_lo : m.clipped_hi) return true;
    const double big = *std::max_element(m.xi.begin(), m.xi.end());
    const double xi_end = low ? m.xi.front() : m.xi.back();
    return xi_end <= 1e-4 * std::max(1.0, big);
}

std::vector<WavefunctionSamples> build_states(const LevelScan& scan, const ValidationInput& in,
                                              const MappingSolution& mapping, WaveVariant variant, bool normalize) {
    std::vector<WavefunctionSamples> out;
    for (const auto& s : scan.states)
        out.push_back(build_wavefunction(s, in.spec, mapping, in.mass, variant, {normalize, false}));
    return out;
}

FDProblem make_problem(const MappingSolution& mapping, const ValidationInput& in, PotentialMode mode) {
    const PotentialTable t = assemble_effective(in.spec, mapping, in.mass, in.ordering, mode);
    FDProblem p;
    p.u = mapping.u;
    p.mass.resize(p.u.size());
    for (std::size_t i = 0; i < p.u.size(); ++i) p.mass[i] = in.mass.value(p.u[i]);
    p.potential = t.total;
    return p;
}

}  // namespace

SpectralReport validate(const ValidationInput& in) {
    in.spec.validate();
    if (in.n_max < 0 || in.n_max + 1 > kMaxEigenpairs) throw DomainError(Stage::oracle, "n_max must lie in 0..11");
    if (in.points < static_cast<int>(kMinOraclePoints)) throw GridError(Stage::oracle, "oracle grid needs at least 201 points");
    if (!(in.domain.hi > in.domain.lo) || !in.domain.contains(in.start.u0))
        throw DomainError(Stage::mapping, "domain must be nonempty and contain the mapping start");

    SpectralReport rep;
    rep.requested = in.domain;
    rep.points = in.points;
    rep.ordering = in.ordering;

    const LevelScan scan = solve_levels(in.spec, in.n_max);
    const WaveVariant probe_variant = in.variant.value_or(kCalibratedVariant);

    Interval domain = in.domain;
    bool closed = false;
    MappingSolution mapping = build_mapping(in, domain, in.points, closed);
    auto pending_growth = [&](const MappingSolution& m) {
        std::pair<bool, bool> grow{false, false};
        for (const auto& w : build_states(scan, in, m, probe_variant, false)) {
            double peak = 0.0;
            for (double v : w.psi_bar) peak = std::max(peak, std::abs(v));
            if (std::abs(w.psi_bar.front()) >= kPadTolerance * peak) grow.first = true;
            if (std::abs(w.psi_bar.back()) >= kPadTolerance * peak) grow.second = true;
        }
        grow.first = grow.first && !natural_end(m, true);
        grow.second = grow.second && !natural_end(m, false);
        return grow;
    };
    if (!scan.states.empty()) {
        auto grow = pending_growth(mapping);
        for (int step = 0; in.pad && step < kMaxPadSteps && (grow.first || grow.second); ++step) {
            const Interval cur = mapping.domain();
            const double extra = kPadFraction * cur.span();
            domain = {grow.first ? cur.lo - extra : cur.lo, grow.second ? cur.hi + extra : cur.hi};
            mapping = build_mapping(in, domain, in.points, closed);
            rep.padding_steps = step + 1;
            grow = pending_growth(mapping);
        }
        rep.tails_ok = !grow.first && !grow.second;
    }
    rep.domain = mapping.domain();
    rep.points = static_cast<int>(mapping.size());
    rep.closed_form_mapping = closed;
    rep.u = mapping.u;

    const int k = in.n_max + 1;

    // potential mode
    std::vector<PotentialMode> modes;
    if (in.mode) {
        modes = {*in.mode};
    } else {
        rep.calibration.mode_auto = true;
        modes = {kCalibratedMode};
        for (auto m : {PotentialMode::bare, PotentialMode::plus_um, PotentialMode::plus_ueff})
            if (m != kCalibratedMode) modes.push_back(m);
    }
    EigenPairs best_pairs;
    double best_err = std::numeric_limits<double>::infinity();
    for (auto m : modes) {
        EigenPairs pairs = eigen_lowest(discretize(make_problem(mapping, in, m)), k);
        double err = 0.0;
        for (const auto& s : scan.states) {
            const double eo = pairs.values[static_cast<std::size_t>(s.n)];
            err = std::max(err, std::abs(eo - s.E) / std::max(1.0, std::abs(s.E)));
        }
        if (rep.calibration.mode_auto) rep.calibration.mode_errors.emplace_back(m, err);
        if (err < best_err * (1.0 - 1e-9)) {
            best_err = err;
            best_pairs = std::move(pairs);
            rep.mode = m;
        }
    }

    // state variant
    std::vector<WaveVariant> variants;
    if (in.variant) {
        variants = {*in.variant};
    } else {
        rep.calibration.variant_auto = true;
        variants = {kCalibratedVariant, kCalibratedVariant == WaveVariant::scaled ? WaveVariant::bare : WaveVariant::scaled};
    }
    double best_overlap = -1.0;
    for (auto v : variants) {
        auto states = build_states(scan, in, mapping, v, true);
        double ov = 0.0;
        if (!states.empty()) {
            const auto& s0 = states.front();
            ov = normalized_overlap(rep.u, s0.psi_bar, with_boundary(best_pairs.vectors[static_cast<std::size_t>(s0.state.n)]));
        }
        if (rep.calibration.variant_auto) rep.calibration.variant_overlaps.emplace_back(v, ov);
        if (ov > best_overlap * (1.0 + 1e-12) + 1e-15) {
            best_overlap = ov;
            rep.states = std::move(states);
            rep.variant = v;
        }
    }

    // oracle vectors on the full grid, unit norm under the same quadrature
    for (int n = 0; n < k; ++n) {
        auto v = with_boundary(best_pairs.vectors[static_cast<std::size_t>(n)]);
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
        const double nrm = std::sqrt(integrate(rep.u, sq));
        for (double& x : v) x /= nrm;
        rep.oracle_vectors.push_back(std::move(v));
        rep.eigen_residual = std::max(rep.eigen_residual, best_pairs.residuals[static_cast<std::size_t>(n)]);
    }

    const auto gram = weighted_gram(rep.states);
    for (int n = 0; n <= in.n_max; ++n) {
        SpectralRow row;
        row.n = n;
        row.E_oracle = best_pairs.values[static_cast<std::size_t>(n)];
        const auto it = std::find_if(rep.states.begin(), rep.states.end(), [n](const auto& w) { return w.state.n == n; });
        if (it == rep.states.end()) {
            row.status = "no-root";
            rep.rows.push_back(row);
            continue;
        }
        const auto idx = static_cast<std::size_t>(it - rep.states.begin());
        row.status = "ok";
        row.E_closed = it->state.E;
        row.abs_error = std::abs(row.E_oracle - row.E_closed);
        row.rel_error = row.abs_error / std::max(std::abs(row.E_closed), std::numeric_limits<double>::min());
        auto& ov = rep.oracle_vectors[static_cast<std::size_t>(n)];
        if (dot(ov, it->psi_bar) < 0.0)
            for (double& x : ov) x = -x;
        row.overlap = normalized_overlap(rep.u, it->psi_bar, ov);
        for (std::size_t j = 0; j < gram.size(); ++j)
            row.ortho_residual = std::max(row.ortho_residual, std::abs(gram[idx][j] - (idx == j ? 1.0 : 0.0)));
        row.nodes = count_nodes(*it);

        rep.max_abs_error = std::max(rep.max_abs_error, row.abs_error);
        rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
        rep.min_overlap = std::min(rep.min_overlap, row.overlap);
        rep.gram_residual = std::max(rep.gram_residual, row.ortho_residual);
        rep.rows.push_back(row);
    }
    for (std::size_t i = 0; i < rep.states.size(); ++i)
        for (std::size_t j = i + 1; j < rep.states.size(); ++j)
            rep.continuity_residual = std::max(rep.continuity_residual, continuity_check(rep.states[i], rep.states[j]).residual);
    rep.schwarzian_residual = check_schwarzian_split(in.spec, mapping, in.mass);
    return rep;
}

}  // namespace natanzon
