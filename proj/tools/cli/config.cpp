#include "config.hpp"

#include <natanzon/errors.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace natanzon::cli {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) throw ConfigError("unknown field '" + join(prefix, key) + "'");
}

const json& require_object(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.contains(key)) throw ConfigError("missing field '" + join(prefix, key) + "'");
    const json& v = obj.at(key);
    if (!v.is_object()) throw ConfigError("field '" + join(prefix, key) + "' must be an object");
    return v;
}

double number(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.contains(key)) throw ConfigError("missing field '" + join(prefix, key) + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("field '" + join(prefix, key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("field '" + join(prefix, key) + "' must be finite");
    return d;
}

double number_or(const json& obj, const std::string& key, const std::string& prefix, double fallback) {
    return obj.contains(key) ? number(obj, key, prefix) : fallback;
}

int integer_or(const json& obj, const std::string& key, const std::string& prefix, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("field '" + join(prefix, key) + "' must be an integer");
    return v.get<int>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& prefix, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError("field '" + join(prefix, key) + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.contains(key)) throw ConfigError("missing field '" + join(prefix, key) + "'");
    const json& v = obj.at(key);
    if (!v.is_array()) throw ConfigError("field '" + join(prefix, key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("field '" + join(prefix, key) + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

void read_mass_table(const std::filesystem::path& path, std::vector<double>& u, std::vector<double>& m) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mass table '" + path.string() + "'");
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.find_first_of("0123456789") == std::string::npos || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        }
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        double a = 0.0, b = 0.0;
        char comma = 0;
        if (!(ls >> a >> comma >> b) || comma != ',') throw ConfigError("malformed row in mass table '" + path.string() + "'");
        u.push_back(a);
        m.push_back(b);
    }
}

}  // namespace

MassProfile MassConfig::build() const {
    try {
        if (family == "constant") return MassProfile::constant(m0);
        if (family == "exponential") return MassProfile::exponential(m0, kappa);
        if (family == "rational") return MassProfile::rational(m0, kappa);
        if (family == "sech2") return MassProfile::sech2(m0, kappa);
        if (family == "tabulated") return MassProfile::tabulated(u, m);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("mass: ") + e.what());
    } catch (const GridError& e) {
        throw ConfigError(std::string("mass: ") + e.what());
    }
    throw ConfigError("field 'mass.family' must be one of constant, exponential, rational, sech2, tabulated");
}

const ConfluentSpec& RunConfig::require_spec() const {
    if (!spec) throw ConfigError("missing field 'spec'");
    return *spec;
}

Interval RunConfig::require_domain() const {
    if (!domain) throw ConfigError("missing field 'domain'");
    return *domain;
}

MappingStart RunConfig::resolved_start() const { return start ? *start : default_start(require_domain()); }

std::optional<PotentialMode> RunConfig::mode_choice() const {
    if (mode == "auto") return std::nullopt;
    return parse_mode(mode);
}

std::optional<WaveVariant> RunConfig::variant_choice() const {
    if (variant == "auto") return std::nullopt;
    return parse_variant(variant);
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, "", {"spec", "mass", "ordering", "domain", "grid", "mapping", "mode", "variant", "n_max",
                             "output_dir", "seed", "pad", "normalization_constant", "strict", "algebra", "sweep"});
    RunConfig cfg;

    if (doc.contains("spec")) {
        const json& s = require_object(doc, "spec", "");
        reject_unknown(s, "spec", {"lambda0", "lambda1", "lambda2", "sigma_beta", "sigma_q0", "sigma_c"});
        ConfluentSpec spec;
        spec.lambda0 = number(s, "lambda0", "spec");
        spec.lambda1 = number(s, "lambda1", "spec");
        spec.lambda2 = number(s, "lambda2", "spec");
        spec.sigma_beta = number(s, "sigma_beta", "spec");
        spec.sigma_q0 = number(s, "sigma_q0", "spec");
        spec.sigma_c = number(s, "sigma_c", "spec");
        try {
            spec.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string("spec: ") + e.what());
        }
        cfg.spec = spec;
    }

    if (doc.contains("mass")) {
        const json& m = require_object(doc, "mass", "");
        reject_unknown(m, "mass", {"family", "m0", "kappa", "path", "u", "m"});
        cfg.mass.family = string_or(m, "family", "mass", "constant");
        cfg.mass.m0 = number_or(m, "m0", "mass", 1.0);
        cfg.mass.kappa = number_or(m, "kappa", "mass", 0.0);
        if (cfg.mass.family == "tabulated") {
            if (m.contains("path")) {
                cfg.mass.path = string_or(m, "path", "mass", "");
                std::filesystem::path p(cfg.mass.path);
                if (p.is_relative() && !base.empty()) p = base / p;
                read_mass_table(p, cfg.mass.u, cfg.mass.m);
            } else {
                cfg.mass.u = numbers(m, "u", "mass");
                cfg.mass.m = numbers(m, "m", "mass");
            }
        }
        cfg.mass.build();  // validates family and parameters now
    }

    if (doc.contains("ordering")) {
        const json& o = require_object(doc, "ordering", "");
        reject_unknown(o, "ordering", {"eta", "epsilon", "rho"});
        cfg.ordering.eta = number_or(o, "eta", "ordering", 0.0);
        cfg.ordering.epsilon = number_or(o, "epsilon", "ordering", -1.0);
        // rho is implied; accepted only when it matches eta + epsilon + rho = -1
        if (o.contains("rho") &&
            std::abs(number_or(o, "rho", "ordering", 0.0) - cfg.ordering.rho()) > 1e-12 * (1.0 + std::abs(cfg.ordering.rho())))
            throw ConfigError("field 'ordering.rho' must equal -1 - eta - epsilon");
    }

    if (doc.contains("domain")) {
        const json& d = require_object(doc, "domain", "");
        reject_unknown(d, "domain", {"u_min", "u_max"});
        Interval iv{number(d, "u_min", "domain"), number(d, "u_max", "domain")};
        if (!(iv.hi > iv.lo)) throw ConfigError("field 'domain.u_max' must exceed 'domain.u_min'");
        cfg.domain = iv;
    }

    if (doc.contains("grid")) {
        const json& g = require_object(doc, "grid", "");
        reject_unknown(g, "grid", {"mapping_points", "oracle_points"});
        cfg.mapping_points = integer_or(g, "mapping_points", "grid", cfg.mapping_points);
        cfg.oracle_points = integer_or(g, "oracle_points", "grid", cfg.oracle_points);
        if (cfg.mapping_points < 7) throw ConfigError("field 'grid.mapping_points' must be at least 7");
        if (cfg.oracle_points < 201) throw ConfigError("field 'grid.oracle_points' must be at least 201");
    }

    if (doc.contains("mapping")) {
        const json& m = require_object(doc, "mapping", "");
        reject_unknown(m, "mapping", {"u0", "xi0", "branch"});
        MappingStart st;
        st.u0 = number(m, "u0", "mapping");
        st.xi0 = number(m, "xi0", "mapping");
        st.branch = integer_or(m, "branch", "mapping", 1);
        if (!(st.xi0 > 0.0)) throw ConfigError("field 'mapping.xi0' must be positive");
        if (st.branch != 1 && st.branch != -1) throw ConfigError("field 'mapping.branch' must be +1 or -1");
        cfg.start = st;
    }
    if (cfg.start && cfg.domain && !cfg.domain->contains(cfg.start->u0))
        throw ConfigError("field 'mapping.u0' must lie inside the domain");

    cfg.mode = string_or(doc, "mode", "", "auto");
    if (cfg.mode != "auto" && !parse_mode(cfg.mode)) throw ConfigError("field 'mode' must be one of auto, V, V+Um, V+Ueff");
    cfg.variant = string_or(doc, "variant", "", "auto");
    if (cfg.variant != "auto" && !parse_variant(cfg.variant))
        throw ConfigError("field 'variant' must be one of auto, bare, scaled");
    cfg.n_max = integer_or(doc, "n_max", "", cfg.n_max);
    if (cfg.n_max < 0 || cfg.n_max > 11) throw ConfigError("field 'n_max' must lie in 0..11");
    cfg.output_dir = string_or(doc, "output_dir", "", cfg.output_dir);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("field 'seed' must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("pad")) {
        if (!doc["pad"].is_boolean()) throw ConfigError("field 'pad' must be a boolean");
        cfg.pad = doc["pad"].get<bool>();
    }
    cfg.normalization_constant = number_or(doc, "normalization_constant", "", 1.0);
    if (!(cfg.normalization_constant > 0.0)) throw ConfigError("field 'normalization_constant' must be positive");

    if (doc.contains("strict")) {
        const json& s = require_object(doc, "strict", "");
        reject_unknown(s, "strict", {"max_abs_error", "max_rel_error", "min_overlap", "gram_residual", "continuity_residual"});
        auto& t = cfg.strict;
        t.max_abs_error = number_or(s, "max_abs_error", "strict", t.max_abs_error);
        t.max_rel_error = number_or(s, "max_rel_error", "strict", t.max_rel_error);
        t.min_overlap = number_or(s, "min_overlap", "strict", t.min_overlap);
        t.gram_residual = number_or(s, "gram_residual", "strict", t.gram_residual);
        t.continuity_residual = number_or(s, "continuity_residual", "strict", t.continuity_residual);
    }

    if (doc.contains("algebra")) {
        const json& a = require_object(doc, "algebra", "");
        reject_unknown(a, "algebra", {"casimirs", "test_count", "theta", "order", "mass_kappa"});
        auto& al = cfg.algebra;
        if (a.contains("casimirs")) al.casimirs = numbers(a, "casimirs", "algebra");
        if (al.casimirs.empty()) throw ConfigError("field 'algebra.casimirs' must not be empty");
        al.test_count = integer_or(a, "test_count", "algebra", al.test_count);
        if (al.test_count < 1) throw ConfigError("field 'algebra.test_count' must be positive");
        al.theta = number_or(a, "theta", "algebra", al.theta);
        al.order = integer_or(a, "order", "algebra", al.order);
        if (al.order < 0 || al.order > 6) throw ConfigError("field 'algebra.order' must lie in 0..6");
        al.mass_kappa = number_or(a, "mass_kappa", "algebra", al.mass_kappa);
        if (al.mass_kappa < 0.0) throw ConfigError("field 'algebra.mass_kappa' must be nonnegative");
    }

    if (doc.contains("sweep")) {
        const json& s = require_object(doc, "sweep", "");
        reject_unknown(s, "sweep", {"parameter", "values"});
        SweepConfig sw;
        sw.parameter = string_or(s, "parameter", "sweep", "");
        if (sw.parameter.empty()) throw ConfigError("missing field 'sweep.parameter'");
        sw.values = numbers(s, "values", "sweep");
        with_parameter(cfg, sw.parameter, sw.values.empty() ? 0.0 : sw.values.front());  // name check
        cfg.sweep = sw;
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

json to_json(const RunConfig& cfg, std::optional<std::string> mode, std::optional<std::string> variant) {
    json j;
    if (cfg.spec) {
        const auto& s = *cfg.spec;
        j["spec"] = {{"lambda0", s.lambda0}, {"lambda1", s.lambda1}, {"lambda2", s.lambda2},
                     {"sigma_beta", s.sigma_beta}, {"sigma_q0", s.sigma_q0}, {"sigma_c", s.sigma_c}};
    }
    json m = {{"family", cfg.mass.family}, {"m0", cfg.mass.m0}, {"kappa", cfg.mass.kappa}};
    if (cfg.mass.family == "tabulated") {
        if (!cfg.mass.path.empty()) m["path"] = cfg.mass.path;
        m["u"] = cfg.mass.u;
        m["m"] = cfg.mass.m;
    }
    j["mass"] = m;
    j["ordering"] = {{"eta", cfg.ordering.eta}, {"epsilon", cfg.ordering.epsilon}, {"rho", cfg.ordering.rho()}};
    if (cfg.domain) j["domain"] = {{"u_min", cfg.domain->lo}, {"u_max", cfg.domain->hi}};
    j["grid"] = {{"mapping_points", cfg.mapping_points}, {"oracle_points", cfg.oracle_points}};
    if (cfg.domain) {
        const MappingStart st = cfg.resolved_start();
        j["mapping"] = {{"u0", st.u0}, {"xi0", st.xi0}, {"branch", st.branch}};
    }
    j["mode"] = mode.value_or(cfg.mode);
    j["variant"] = variant.value_or(cfg.variant);
    j["n_max"] = cfg.n_max;
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["pad"] = cfg.pad;
    j["normalization_constant"] = cfg.normalization_constant;
    const auto& t = cfg.strict;
    j["strict"] = {{"max_abs_error", t.max_abs_error}, {"max_rel_error", t.max_rel_error}, {"min_overlap", t.min_overlap},
                   {"gram_residual", t.gram_residual}, {"continuity_residual", t.continuity_residual}};
    const auto& a = cfg.algebra;
    j["algebra"] = {{"casimirs", a.casimirs}, {"test_count", a.test_count}, {"theta", a.theta}, {"order", a.order},
                    {"mass_kappa", a.mass_kappa}};
    if (cfg.sweep) j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
    return j;
}

RunConfig with_parameter(const RunConfig& cfg, const std::string& name, double value) {
    RunConfig c = cfg;
    auto spec_field = [&](double ConfluentSpec::*field) {
        if (!c.spec) throw ConfigError("sweep over '" + name + "' needs a 'spec' block");
        (*c.spec).*field = value;
    };
    if (name == "spec.lambda0") spec_field(&ConfluentSpec::lambda0);
    else if (name == "spec.lambda1") spec_field(&ConfluentSpec::lambda1);
    else if (name == "spec.lambda2") spec_field(&ConfluentSpec::lambda2);
    else if (name == "spec.sigma_beta") spec_field(&ConfluentSpec::sigma_beta);
    else if (name == "spec.sigma_q0") spec_field(&ConfluentSpec::sigma_q0);
    else if (name == "spec.sigma_c") spec_field(&ConfluentSpec::sigma_c);
    else if (name == "mass.m0") c.mass.m0 = value;
    else if (name == "mass.kappa") c.mass.kappa = value;
    else if (name == "ordering.eta") c.ordering.eta = value;
    else if (name == "ordering.epsilon") c.ordering.epsilon = value;
    else throw ConfigError("field 'sweep.parameter' names an unsupported parameter '" + name + "'");
    return c;
}

}  // namespace natanzon::cli
