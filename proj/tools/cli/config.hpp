#pragma once

#include <natanzon/mapping.hpp>
#include <natanzon/mass.hpp>
#include <natanzon/potential.hpp>
#include <natanzon/wavefunc.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace natanzon::cli {

using json = nlohmann::ordered_json;

struct MassConfig {
    std::string family = "constant";
    double m0 = 1.0;
    double kappa = 0.0;
    std::string path;  ///< tabulated: CSV with columns u,m (relative to the config file)
    std::vector<double> u;
    std::vector<double> m;

    MassProfile build() const;
};

struct StrictThresholds {
    double max_abs_error = 1e-4;
    double max_rel_error = 1e-3;
    double min_overlap = 0.9999;
    double gram_residual = 1e-6;
    double continuity_residual = 1e-6;
};

struct AlgebraConfig {
    std::vector<double> casimirs{0.75, 1.25};
    int test_count = 5;
    double theta = 0.1;
    int order = 6;
    double mass_kappa = 0.1;
};

struct SweepConfig {
    std::string parameter;  ///< e.g. "spec.sigma_beta", "mass.kappa"
    std::vector<double> values;
};

/// Fully parsed run configuration. Optional blocks stay empty until a command
/// that needs them asks (require_* throw ConfigError naming the field).
struct RunConfig {
    std::optional<ConfluentSpec> spec;
    MassConfig mass;
    OrderingParams ordering;
    std::optional<Interval> domain;
    int mapping_points = 2001;
    int oracle_points = 8001;
    std::optional<MappingStart> start;
    std::string mode = "auto";
    std::string variant = "auto";
    int n_max = 3;
    std::string output_dir = ".";
    std::uint64_t seed = 20240611;
    bool pad = true;
    double normalization_constant = 1.0;
    StrictThresholds strict;
    AlgebraConfig algebra;
    std::optional<SweepConfig> sweep;

    const ConfluentSpec& require_spec() const;
    Interval require_domain() const;
    MappingStart resolved_start() const;
    std::optional<PotentialMode> mode_choice() const;
    std::optional<WaveVariant> variant_choice() const;
};

/// Parses a JSON document; `base` resolves relative paths inside it.
RunConfig parse_config(const json& doc, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

/// Config as JSON, with `mode`/`variant` replaced by the given resolved values.
json to_json(const RunConfig& cfg, std::optional<std::string> mode = {}, std::optional<std::string> variant = {});

/// Applies a sweep parameter (dotted name) to a copy of the config.
RunConfig with_parameter(const RunConfig& cfg, const std::string& name, double value);

}  // namespace natanzon::cli
