#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

#include <natanzon/errors.hpp>

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace natanzon;
using namespace natanzon::cli;
namespace fs = std::filesystem;

namespace {

const char* const kOscillatorConfig = R"({
  "spec": {"lambda0": 0, "lambda1": 4, "lambda2": 0, "sigma_beta": 4, "sigma_q0": 0, "sigma_c": 0},
  "domain": {"u_min": 1e-6, "u_max": 14},
  "grid": {"oracle_points": 2001, "mapping_points": 401},
  "mapping": {"u0": 1, "xi0": 0.5},
  "n_max": 3
})";

const char* const kMorseConfig = R"({
  "spec": {"lambda0": 4, "lambda1": 0, "lambda2": 0, "sigma_beta": 1, "sigma_q0": -17, "sigma_c": -11},
  "domain": {"u_min": -25, "u_max": 4},
  "grid": {"oracle_points": 4001},
  "mapping": {"u0": 0, "xi0": 1},
  "n_max": 5
})";

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("natanzon_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name, std::ios::binary) << text;
        return path / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" NATANZON_PDM_EXE "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') {
                quoted = !quoted;
            } else if (ch == ',' && !quoted) {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += ch;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(json::parse(text));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config parsing fills defaults") {
    const auto cfg = parse_config(json::parse(kOscillatorConfig));
    CHECK(cfg.require_spec().lambda1 == 4.0);
    CHECK(cfg.mass.family == "constant");
    CHECK(cfg.ordering.eta == 0.0);
    CHECK(cfg.ordering.epsilon == -1.0);
    CHECK(cfg.oracle_points == 2001);
    CHECK(cfg.mode == "auto");
    CHECK_FALSE(cfg.mode_choice().has_value());
    CHECK(cfg.require_domain().hi == 14.0);
    CHECK(cfg.resolved_start().xi0 == 0.5);
}

TEST_CASE("config errors name the offending field") {
    CHECK(config_error(R"({"spec": {"lambda0": 0, "lambda1": 4, "lambda2": 0, "sigma_beta": 4, "sigma_q0": 0}})")
              .find("spec.sigma_c") != std::string::npos);
    CHECK(config_error(R"({"spec": {"lambda0": 0, "lambda1": "four", "lambda2": 0, "sigma_beta": 4, "sigma_q0": 0, "sigma_c": 0}})")
              .find("spec.lambda1") != std::string::npos);
    CHECK(config_error(R"({"colour": 1})").find("colour") != std::string::npos);
    CHECK(config_error(R"({"mass": {"family": "cubic"}})").find("mass.family") != std::string::npos);
    CHECK(config_error(R"({"mode": "V+W"})").find("mode") != std::string::npos);
    CHECK(config_error(R"({"variant": "odd"})").find("variant") != std::string::npos);
    CHECK(config_error(R"({"n_max": -1})").find("n_max") != std::string::npos);
    CHECK(config_error(R"({"ordering": {"eta": 0, "epsilon": -1, "rho": 0.5}})").find("ordering.rho") != std::string::npos);

    const auto empty = parse_config(json::parse("{}"));
    CHECK_THROWS_AS(empty.require_spec(), ConfigError);
    CHECK_THROWS_AS(empty.require_domain(), ConfigError);
}

TEST_CASE("config round trip and sweep parameters") {
    const auto cfg = parse_config(json::parse(kOscillatorConfig));
    const auto j = to_json(cfg, std::string("V+Ueff"), std::string("scaled"));
    CHECK(j["mode"] == "V+Ueff");
    const auto again = parse_config(j);
    CHECK(again.require_spec().sigma_beta == 4.0);
    CHECK(again.mode == "V+Ueff");

    const auto swept = with_parameter(cfg, "spec.sigma_beta", 9.0);
    CHECK(swept.require_spec().sigma_beta == 9.0);
    CHECK(cfg.require_spec().sigma_beta == 4.0);
    CHECK(with_parameter(cfg, "mass.kappa", 0.3).mass.kappa == 0.3);
    CHECK_THROWS_AS(with_parameter(cfg, "spec.nothing", 1.0), ConfigError);
}

TEST_CASE("number formatting and CSV dialect") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(-1.5e-300) == "-1.5000000000000001e-300");
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);

    CsvTable t({"a", "b"});
    t.row().add(1).add("x,y");
    t.row().empty().add(0.5);
    CHECK(t.str() == "a,b\n1,\"x,y\"\n,0.5\n");
}

TEST_CASE("atomic writes") {
    TempDir dir;
    const auto target = dir.path / "nested" / "out.txt";
    write_atomic(target, "first");
    write_atomic(target, "second");
    CHECK(slurp(target) == "second");
    int files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(target.parent_path())) ++files;
    CHECK(files == 1);
}

TEST_CASE("thread count honours the environment") {
    ::setenv("NATANZON_THREADS", "3", 1);
    CHECK(sweep_threads() == 3u);
    ::setenv("NATANZON_THREADS", "zero", 1);
    CHECK(sweep_threads() >= 1u);
    ::unsetenv("NATANZON_THREADS");
    CHECK(sweep_threads() >= 1u);
}

TEST_CASE("potential command writes the oscillator potential") {
    TempDir dir;
    const auto cfg = dir.write("osc.json", kOscillatorConfig);
    REQUIRE(run("potential --config " + cfg.string() + " --out " + dir.path.string()) == 0);
    const auto rows = read_csv(dir.path / "potential.csv");
    REQUIRE(rows.size() == 402);
    CHECK(rows[0] == std::vector<std::string>{"u", "xi", "V", "Vm", "Um", "Ueff", "Vtotal"});
    for (std::size_t i = 1; i < rows.size(); i += 40) {
        const double u = std::stod(rows[i][0]);
        if (u < 1e-3) continue;  // xi loses relative digits right at the origin
        CHECK(std::stod(rows[i][2]) == doctest::Approx(0.5 * u * u + 3.0 / (8.0 * u * u)).epsilon(1e-12));
    }
    const auto text = slurp(dir.path / "potential.csv");
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("spectrum command reports missing levels") {
    TempDir dir;
    const auto cfg = dir.write("morse.json", kMorseConfig);
    REQUIRE(run("spectrum --config " + cfg.string() + " --out " + dir.path.string()) == 0);
    const auto rows = read_csv(dir.path / "levels.csv");
    REQUIRE(rows.size() == 7);
    CHECK(rows[0][0] == "n");
    CHECK(rows[1][1] == "ok");
    CHECK(std::stod(rows[1][2]) == doctest::Approx(-16.5625).epsilon(1e-10));
    CHECK(rows[5][1] == "no-root");
    CHECK(rows[5][2].empty());
    CHECK(rows[6][1] == "no-root");
}

TEST_CASE("wavefunctions command") {
    TempDir dir;
    const auto cfg = dir.write("osc.json", kOscillatorConfig);
    REQUIRE(run("wavefunctions --config " + cfg.string() + " --out " + dir.path.string()) == 0);
    const auto rows = read_csv(dir.path / "wavefunctions.csv");
    REQUIRE(rows.size() > 2);
    CHECK(rows[0] == std::vector<std::string>{"u", "xi", "m", "psi_bar_0", "chi_0", "psi_bar_1", "chi_1", "psi_bar_2",
                                              "chi_2", "psi_bar_3", "chi_3"});
}

TEST_CASE("verify is deterministic and embeds the resolved config") {
    TempDir a, b;
    const auto cfg = a.write("osc.json", kOscillatorConfig);
    REQUIRE(run("verify --config " + cfg.string() + " --out " + a.path.string()) == 0);
    REQUIRE(run("verify --config " + cfg.string() + " --out " + b.path.string()) == 0);
    const auto ra = slurp(a.path / "report.json"), rb = slurp(b.path / "report.json");
    CHECK(ra == rb);
    for (int n = 0; n < 4; ++n) {
        const auto name = "states_" + std::to_string(n) + ".csv";
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    const auto rep = json::parse(ra);
    CHECK(rep["schema_version"] == "1");
    CHECK(rep["config"]["mode"] == "V+Ueff");
    CHECK(rep["config"]["variant"] == "scaled");
    CHECK(rep["config"]["spec"]["lambda1"] == 4.0);
    CHECK(rep["calibration"]["mode_auto"] == true);
    CHECK(rep["rows"].size() == 4);
    CHECK(rep["summary"]["max_abs_error"].get<double>() < 1e-3);
    CHECK(rep["summary"]["min_overlap"].get<double>() > 0.9999);
}

TEST_CASE("strict mode exits 4 on a violated threshold") {
    TempDir dir;
    auto doc = json::parse(kOscillatorConfig);
    doc["strict"] = {{"max_abs_error", 1e-12}};
    const auto cfg = dir.write("tight.json", doc.dump());
    CHECK(run("verify --config " + cfg.string() + " --out " + dir.path.string()) == 0);
    CHECK(run("verify --strict --config " + cfg.string() + " --out " + dir.path.string()) == 4);
    const auto rep = json::parse(slurp(dir.path / "report.json"));
    CHECK(rep["strict"]["pass"] == false);
    auto fine = json::parse(kOscillatorConfig);
    fine["grid"]["oracle_points"] = 8001;
    const auto ok = dir.write("osc.json", fine.dump());
    CHECK(run("verify --strict --config " + ok.string() + " --out " + dir.path.string()) == 0);
}

TEST_CASE("exit codes for configuration and numerical failures") {
    TempDir dir;
    CHECK(run("verify --config " + dir.write("bad.json", "{oops").string()) == 2);
    CHECK(run("verify --config " + (dir.path / "missing.json").string()) == 2);
    CHECK(run("frobnicate --config " + dir.write("x.json", kOscillatorConfig).string()) == 2);
    CHECK(run("verify --config " + dir.write("nospec.json", "{}").string()) == 2);
    // R(xi0) = 1 - xi0 < 0: the mapping cannot start
    const auto singular = dir.write("singular.json", R"({
      "spec": {"lambda0": 1, "lambda1": -1, "lambda2": 0, "sigma_beta": 1, "sigma_q0": -3, "sigma_c": 0},
      "domain": {"u_min": 0, "u_max": 1}, "mapping": {"u0": 0.5, "xi0": 2}})");
    CHECK(run("potential --config " + singular.string() + " --out " + dir.path.string()) == 3);
}

TEST_CASE("algebra-check writes a passing table") {
    TempDir dir;
    const auto cfg = dir.write("alg.json", R"({"algebra": {"test_count": 2}})");
    REQUIRE(run("algebra-check --strict --config " + cfg.string() + " --out " + dir.path.string()) == 0);
    const auto rows = read_csv(dir.path / "algebra.csv");
    REQUIRE(rows.size() > 30);
    CHECK(rows[0] == std::vector<std::string>{"check", "realization", "casimir", "residual", "threshold", "expect", "pass"});
    bool control = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][6] == "true");
        control = control || rows[i][5] == "above";
    }
    CHECK(control);
}

TEST_CASE("sweep output does not depend on the thread count") {
    TempDir one, many;
    auto doc = json::parse(kOscillatorConfig);
    doc["sweep"] = {{"parameter", "spec.sigma_beta"}, {"values", {2.0, 4.0, 6.0, 8.0}}};
    const auto cfg = one.write("sweep.json", doc.dump());
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + one.path.string(), "NATANZON_THREADS=1") == 0);
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + many.path.string(), "NATANZON_THREADS=4") == 0);
    CHECK(slurp(one.path / "sweep.csv") == slurp(many.path / "sweep.csv"));
    CHECK(slurp(one.path / "report.json") == slurp(many.path / "report.json"));
    const auto rows = read_csv(one.path / "sweep.csv");
    CHECK(rows.size() == 5);
}

TEST_CASE("run_command maps errors without a subprocess") {
    std::ostringstream log, err;
    RunConfig cfg;
    CHECK(run_command("spectrum", cfg, CommandOptions{}, log, err) == kConfigError);
    CHECK(err.str().find("spec") != std::string::npos);
}
