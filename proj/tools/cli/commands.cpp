#include "commands.hpp"

#include "output.hpp"

#include <natanzon/errors.hpp>
#include <natanzon/liealg.hpp>
#include <natanzon/oracle.hpp>
#include <natanzon/potential.hpp>
#include <natanzon/spectrum.hpp>
#include <natanzon/wavefunc.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace natanzon::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSchemaVersion = "1";

struct Context {
    const RunConfig& cfg;
    const CommandOptions& opt;
    std::ostream& log;

    fs::path path(const std::string& name) const { return opt.out_dir / name; }

    void write(const std::string& name, const std::string& content) const {
        write_atomic(path(name), content);
        log << "wrote " << path(name).string() << '\n';
    }
};

MappingSolution config_mapping(const RunConfig& cfg, const MassProfile& mass) {
    const ConfluentSpec& spec = cfg.require_spec();
    const Interval dom = cfg.require_domain();
    std::vector<double> grid(static_cast<std::size_t>(cfg.mapping_points));
    for (int i = 0; i < cfg.mapping_points; ++i)
        grid[static_cast<std::size_t>(i)] = dom.lo + dom.span() * static_cast<double>(i) / (cfg.mapping_points - 1);
    grid.back() = dom.hi;
    if (auto cf = closed_form_mapping(spec, mass, grid, cfg.resolved_start())) return *cf;
    return solve_mapping(spec, mass, grid, cfg.resolved_start());
}

ValidationInput validation_input(const RunConfig& cfg) {
    ValidationInput in;
    in.spec = cfg.require_spec();
    in.mass = cfg.mass.build();
    in.ordering = cfg.ordering;
    in.mode = cfg.mode_choice();
    in.variant = cfg.variant_choice();
    in.n_max = cfg.n_max;
    in.domain = cfg.require_domain();
    in.points = cfg.oracle_points;
    in.start = cfg.resolved_start();
    in.pad = cfg.pad;
    return in;
}

struct Resolved {
    PotentialMode mode = kCalibratedMode;
    WaveVariant variant = kCalibratedVariant;
    std::string how;  ///< "config", "calibrated" or "default"
};

// "auto" is settled by a calibration run before anything is written.
Resolved resolve(const RunConfig& cfg) {
    Resolved r;
    const auto m = cfg.mode_choice();
    const auto v = cfg.variant_choice();
    if (m && v) {
        r.mode = *m;
        r.variant = *v;
        r.how = "config";
        return r;
    }
    if (solve_levels(cfg.require_spec(), cfg.n_max).states.empty()) {
        r.mode = m.value_or(kCalibratedMode);
        r.variant = v.value_or(kCalibratedVariant);
        r.how = "default";
        return r;
    }
    const SpectralReport rep = validate(validation_input(cfg));
    r.mode = rep.mode;
    r.variant = rep.variant;
    r.how = "calibrated";
    return r;
}

json calibration_json(const SpectralReport& rep) {
    json c;
    c["mode_auto"] = rep.calibration.mode_auto;
    json me = json::object();
    for (const auto& [m, e] : rep.calibration.mode_errors) me[std::string(to_string(m))] = e;
    c["mode_max_rel_error"] = me;
    c["variant_auto"] = rep.calibration.variant_auto;
    json vo = json::object();
    for (const auto& [v, o] : rep.calibration.variant_overlaps) vo[std::string(to_string(v))] = o;
    c["variant_ground_overlap"] = vo;
    c["mode"] = to_string(rep.mode);
    c["variant"] = to_string(rep.variant);
    return c;
}

json report_json(const SpectralReport& rep, const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = to_json(cfg, std::string(to_string(rep.mode)), std::string(to_string(rep.variant)));
    j["calibration"] = calibration_json(rep);
    j["grid"] = {{"requested_u_min", rep.requested.lo},
                 {"requested_u_max", rep.requested.hi},
                 {"u_min", rep.domain.lo},
                 {"u_max", rep.domain.hi},
                 {"points", rep.points},
                 {"padding_steps", rep.padding_steps},
                 {"tails_decayed", rep.tails_ok},
                 {"closed_form_mapping", rep.closed_form_mapping}};
    j["summary"] = {{"max_abs_error", rep.max_abs_error},
                    {"max_rel_error", rep.max_rel_error},
                    {"min_overlap", rep.min_overlap},
                    {"gram_residual", rep.gram_residual},
                    {"continuity_residual", rep.continuity_residual},
                    {"schwarzian_residual", rep.schwarzian_residual},
                    {"eigen_residual", rep.eigen_residual}};
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row = {{"n", r.n}, {"status", r.status}, {"E_oracle", r.E_oracle}};
        if (r.status == "ok") {
            row["E_closed"] = r.E_closed;
            row["abs_error"] = r.abs_error;
            row["rel_error"] = r.rel_error;
            row["overlap"] = r.overlap;
            row["ortho_residual"] = r.ortho_residual;
            row["nodes"] = r.nodes;
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

struct StrictOutcome {
    bool ok = true;
    std::vector<std::string> failures;
};

StrictOutcome check_strict(const SpectralReport& rep, const StrictThresholds& t) {
    StrictOutcome s;
    auto need = [&](bool cond, const std::string& what) {
        if (!cond) {
            s.ok = false;
            s.failures.push_back(what);
        }
    };
    need(rep.max_abs_error < t.max_abs_error, "max_abs_error");
    need(rep.max_rel_error < t.max_rel_error, "max_rel_error");
    need(rep.min_overlap > t.min_overlap, "min_overlap");
    need(rep.gram_residual < t.gram_residual, "gram_residual");
    need(rep.continuity_residual < t.continuity_residual, "continuity_residual");
    return s;
}

int cmd_potential(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const MassProfile mass = cfg.mass.build();
    const Resolved r = resolve(cfg);
    const MappingSolution mapping = config_mapping(cfg, mass);
    const PotentialTable t = assemble_effective(cfg.require_spec(), mapping, mass, cfg.ordering, r.mode);
    CsvTable csv({"u", "xi", "V", "Vm", "Um", "Ueff", "Vtotal"});
    for (std::size_t i = 0; i < t.u.size(); ++i)
        csv.row().add(t.u[i]).add(t.xi[i]).add(t.v[i]).add(t.vm[i]).add(t.um[i]).add(t.ueff[i]).add(t.total[i]);
    ctx.write("potential.csv", csv.str());
    ctx.log << "mode " << to_string(r.mode) << " (" << r.how << ")\n";
    return kOk;
}

int cmd_spectrum(const Context& ctx) {
    const ConfluentSpec& spec = ctx.cfg.require_spec();
    const LevelScan scan = solve_levels(spec, ctx.cfg.n_max);
    CsvTable csv({"n", "status", "E", "a", "b", "q0", "beta", "c", "j0", "residual_q0", "residual_linear"});
    for (int n = 0; n <= ctx.cfg.n_max; ++n) {
        csv.row().add(n);
        const BoundState* s = scan.find(n);
        if (!s) {
            csv.add("no-root");
            for (int k = 0; k < 9; ++k) csv.empty();
            continue;
        }
        csv.add("ok").add(s->E).add(s->a).add(s->b).add(s->q0()).add(s->beta()).add(s->c()).add(s->j0());
        csv.add(s->q0_residual()).add(linear_residual(spec, *s));
    }
    ctx.write("levels.csv", csv.str());
    if (scan.empty_interval) ctx.log << "valid energy interval is empty\n";
    return kOk;
}

int cmd_wavefunctions(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const ConfluentSpec& spec = cfg.require_spec();
    const MassProfile mass = cfg.mass.build();
    const Resolved r = resolve(cfg);
    const MappingSolution mapping = config_mapping(cfg, mass);
    const LevelScan scan = solve_levels(spec, cfg.n_max);
    std::vector<WavefunctionSamples> states;
    for (const auto& s : scan.states) states.push_back(build_wavefunction(s, spec, mapping, mass, r.variant, {true, false}));

    std::vector<std::string> header{"u", "xi", "m"};
    for (const auto& w : states) {
        header.push_back("psi_bar_" + std::to_string(w.state.n));
        header.push_back("chi_" + std::to_string(w.state.n));
    }
    const double sqrt_n = std::sqrt(cfg.normalization_constant);
    CsvTable csv(header);
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        csv.row().add(mapping.u[i]).add(mapping.xi[i]).add(mass.value(mapping.u[i]));
        for (const auto& w : states) csv.add(w.psi_bar[i]).add(w.chi[i] * sqrt_n);
    }
    ctx.write("wavefunctions.csv", csv.str());
    for (const auto& w : states)
        if (w.tail_ratio >= kTailTolerance) ctx.log << "state " << w.state.n << " has not decayed at the domain ends\n";
    ctx.log << "variant " << to_string(r.variant) << " (" << r.how << ")\n";
    return kOk;
}

int cmd_verify(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const SpectralReport rep = validate(validation_input(cfg));
    json j = report_json(rep, cfg);
    const StrictOutcome s = check_strict(rep, cfg.strict);
    j["strict"] = {{"requested", ctx.opt.strict}, {"pass", s.ok}, {"failures", s.failures}};

    const double sqrt_n = std::sqrt(cfg.normalization_constant);
    for (const auto& w : rep.states) {
        const auto& ov = rep.oracle_vectors[static_cast<std::size_t>(w.state.n)];
        CsvTable csv({"u", "psi_bar", "chi", "oracle_vector"});
        for (std::size_t i = 0; i < rep.u.size(); ++i) csv.row().add(rep.u[i]).add(w.psi_bar[i]).add(w.chi[i] * sqrt_n).add(ov[i]);
        ctx.write("states_" + std::to_string(w.state.n) + ".csv", csv.str());
    }
    ctx.write("report.json", j.dump(2) + "\n");
    ctx.log << "max |dE| " << format_number(rep.max_abs_error) << ", min overlap " << format_number(rep.min_overlap)
            << ", mode " << to_string(rep.mode) << ", variant " << to_string(rep.variant) << '\n';
    if (ctx.opt.strict && !s.ok) return kStrictViolation;
    return kOk;
}

int cmd_algebra(const Context& ctx) {
    const auto& a = ctx.cfg.algebra;
    AlgebraSuiteOptions o;
    o.casimirs = a.casimirs;
    o.test_count = a.test_count;
    o.seed = ctx.cfg.seed;
    o.theta = a.theta;
    o.order = a.order;
    o.mass_kappa = a.mass_kappa;
    const auto rows = run_algebra_suite(o);
    CsvTable csv({"check", "realization", "casimir", "residual", "threshold", "expect", "pass"});
    bool all = true;
    for (const auto& r : rows) {
        csv.row().add(r.check).add(r.realization).add(r.casimir).add(r.residual).add(r.threshold);
        csv.add(r.expect_above ? "above" : "below").add(r.pass() ? "true" : "false");
        all = all && r.pass();
    }
    ctx.write("algebra.csv", csv.str());
    ctx.log << (all ? "all algebra checks pass\n" : "some algebra checks fail\n");
    if (ctx.opt.strict && !all) return kStrictViolation;
    return kOk;
}

struct SweepResult {
    std::string status = "ok";
    std::string message;
    SpectralReport report;
    bool strict_ok = true;
};

int cmd_sweep(const Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.sweep) throw ConfigError("missing field 'sweep'");
    const auto& values = cfg.sweep->values;
    std::vector<RunConfig> runs;
    for (double v : values) runs.push_back(with_parameter(cfg, cfg.sweep->parameter, v));
    for (const auto& r : runs) {
        r.require_spec().validate();
        r.mass.build();
    }

    std::vector<SweepResult> results(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            try {
                results[i].report = validate(validation_input(runs[i]));
                results[i].strict_ok = check_strict(results[i].report, runs[i].strict).ok;
            } catch (const std::exception& e) {
                results[i].status = "error";
                results[i].message = e.what();
            }
        }
    };
    const unsigned threads = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(std::max<std::size_t>(1, runs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    CsvTable csv({"value", "status", "states", "max_abs_error", "max_rel_error", "min_overlap", "gram_residual", "mode",
                  "variant", "message"});
    json rows = json::array();
    bool all_ok = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = results[i];
        csv.row().add(values[i]).add(r.status);
        json row = {{"value", values[i]}, {"status", r.status}};
        if (r.status == "ok") {
            const auto& rep = r.report;
            csv.add(static_cast<long long>(rep.states.size())).add(rep.max_abs_error).add(rep.max_rel_error).add(rep.min_overlap);
            csv.add(rep.gram_residual).add(to_string(rep.mode)).add(to_string(rep.variant)).empty();
            row["report"] = report_json(rep, runs[i]);
            all_ok = all_ok && r.strict_ok;
        } else {
            for (int k = 0; k < 7; ++k) csv.empty();
            csv.add(r.message);
            row["message"] = r.message;
            all_ok = false;
        }
        rows.push_back(row);
    }
    ctx.write("sweep.csv", csv.str());
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = to_json(cfg);
    j["runs"] = rows;
    ctx.write("report.json", j.dump(2) + "\n");
    if (ctx.opt.strict && !all_ok) return kStrictViolation;
    return kOk;
}

}  // namespace

unsigned sweep_threads() {
    if (const char* env = std::getenv("NATANZON_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log,
                std::ostream& err) {
    const Context ctx{cfg, opt, log};
    try {
        if (name == "potential") return cmd_potential(ctx);
        if (name == "spectrum") return cmd_spectrum(ctx);
        if (name == "wavefunctions") return cmd_wavefunctions(ctx);
        if (name == "verify") return cmd_verify(ctx);
        if (name == "algebra-check") return cmd_algebra(ctx);
        if (name == "sweep") return cmd_sweep(ctx);
        err << "error: unknown command '" << name << "'\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    }
}

}  // namespace natanzon::cli
