// Command-line front end: builds the explicit solution fields from a JSON
// config, runs the verification suites on saved fields, and emits reports
// and plot-ready tables.  Everything written to the output directory is a
// pure function of the effective config, so reruns (at any thread count)
// reproduce the files byte for byte.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csc/analysis.hpp"
#include "csc/construct.hpp"
#include "csc/dimension.hpp"
#include "csc/fields.hpp"
#include "csc/fowler.hpp"
#include "csc/reporting.hpp"
#include "csc/suites.hpp"
#include "json.hpp"

using namespace csc;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

// ---- config schema ---------------------------------------------------------

bool is_integral_number(const nlohmann::json& v) {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double x = v.get<double>();
    return std::floor(x) == x && std::abs(x) < 9.0e15;
}

// Structural validator for the subset of JSON-schema keywords the published
// schema uses: type, enum, required, properties, additionalProperties,
// items, minItems, minimum, maximum, exclusiveMinimum.  Appends one message
// per violation, each naming the offending path.
void validate_node(const nlohmann::json& schema, const nlohmann::json& value,
                   const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        bool ok = true;
        if (type == "object")
            ok = value.is_object();
        else if (type == "array")
            ok = value.is_array();
        else if (type == "string")
            ok = value.is_string();
        else if (type == "boolean")
            ok = value.is_boolean();
        else if (type == "number")
            ok = value.is_number();
        else if (type == "integer")
            ok = is_integral_number(value);
        if (!ok) {
            errors.push_back(path + ": expected " + type);
            return;  // further keyword checks would just cascade
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& option : schema["enum"])
            if (option == value) found = true;
        if (!found) {
            std::string allowed;
            for (const auto& option : schema["enum"]) {
                if (!allowed.empty()) allowed += ", ";
                allowed += option.dump();
            }
            errors.push_back(path + ": must be one of " + allowed);
        }
    }
    if (value.is_number()) {
        const double x = value.get<double>();
        if (schema.contains("minimum") && x < schema["minimum"].get<double>())
            errors.push_back(path + ": below minimum " + schema["minimum"].dump());
        if (schema.contains("maximum") && x > schema["maximum"].get<double>())
            errors.push_back(path + ": above maximum " + schema["maximum"].dump());
        if (schema.contains("exclusiveMinimum") &&
            x <= schema["exclusiveMinimum"].get<double>())
            errors.push_back(path + ": must exceed " + schema["exclusiveMinimum"].dump());
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(path + ": missing required key '" +
                                     key.get<std::string>() + "'");
        const bool closed = schema.contains("additionalProperties") &&
                            schema["additionalProperties"].is_boolean() &&
                            !schema["additionalProperties"].get<bool>();
        for (const auto& [key, sub] : value.items()) {
            const std::string sub_path = path + "." + key;
            if (schema.contains("properties") && schema["properties"].contains(key))
                validate_node(schema["properties"][key], sub, sub_path, errors);
            else if (closed)
                errors.push_back(sub_path + ": unknown key");
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") &&
            value.size() < schema["minItems"].get<std::size_t>())
            errors.push_back(path + ": needs at least " + schema["minItems"].dump() +
                             " entries");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < value.size(); ++i)
                validate_node(schema["items"], value[i], path + "[" + std::to_string(i) + "]",
                              errors);
    }
}

std::string config_dir() { return CSC_CONFIG_DIR; }

// ---- config loading --------------------------------------------------------

struct CliCommon {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    int threads = 0;    // 0 = take the config's value
    double rtol = 0.0;  // 0 = take the config's value
};

void add_common_flags(CLI::App* cmd, CliCommon& common) {
    cmd->add_option("--config", common.config_path, "Run config JSON file");
    cmd->add_option("--preset", common.preset,
                    "Named config shipped with the tool (see configs/)");
    cmd->add_option("--out", common.out_dir, "Output directory (default: config or 'out')");
    cmd->add_option("--threads", common.threads, "Worker threads for the quadrature passes")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--rtol", common.rtol, "Quadrature tolerance override")
        ->check(CLI::PositiveNumber);
}

/// Parsed, schema-checked config.  Throws std::runtime_error with the full
/// list of diagnostics on any failure; the caller maps that to exit code 2.
nlohmann::json load_config(const CliCommon& common) {
    if (!common.config_path.empty() && !common.preset.empty())
        throw std::runtime_error("give either --config or --preset, not both");
    std::string path;
    if (!common.preset.empty()) {
        for (const char ch : common.preset)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-'))
                throw std::runtime_error("preset names use letters, digits and '-' only");
        path = config_dir() + "/" + common.preset + ".json";
        if (!fs::exists(path))
            throw std::runtime_error("no preset '" + common.preset + "' in " + config_dir());
    } else if (!common.config_path.empty()) {
        path = common.config_path;
    }
    nlohmann::json config = nlohmann::json::object();
    if (!path.empty()) {
        try {
            config = nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(path + ": " + e.what());
        }
    }
    const nlohmann::json schema = nlohmann::json::parse(read_text_file(config_dir() +
                                                                       "/schema.json"));
    std::vector<std::string> errors;
    validate_node(schema, config, "$", errors);
    if (!errors.empty()) {
        std::string msg = "config does not match the schema:";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }
    return config;
}

/// The config as it enters reports and hashes: overrides applied, thread
/// count removed (thread count must never change an output byte).
nlohmann::json effective_config(nlohmann::json config, const CliCommon& common) {
    if (common.rtol > 0.0) config["quadrature"]["rtol"] = common.rtol;
    if (config.contains("quadrature")) config["quadrature"].erase("threads");
    return config;
}

int thread_count(const nlohmann::json& config, const CliCommon& common) {
    if (common.threads > 0) return common.threads;
    if (config.contains("quadrature") && config["quadrature"].contains("threads"))
        return config["quadrature"]["threads"].get<int>();
    return 1;
}

std::string output_dir(const nlohmann::json& config, const CliCommon& common) {
    if (!common.out_dir.empty()) return common.out_dir;
    if (config.contains("output_dir")) return config["output_dir"].get<std::string>();
    return "out";
}

double chosen(const nlohmann::json& config, const char* section, const char* key,
              double fallback, const CliCommon& common, bool rtol_override) {
    if (rtol_override && common.rtol > 0.0) return common.rtol;
    if (config.contains(section) && config[section].contains(key))
        return config[section][key].get<double>();
    return fallback;
}

std::vector<double> grid_from(const nlohmann::json& config, const char* key,
                              std::vector<double> fallback) {
    if (config.contains("grids") && config["grids"].contains(key))
        return config["grids"][key].get<std::vector<double>>();
    return fallback;
}

std::function<double(double)> growth_target_from(const nlohmann::json& config) {
    if (!config.contains("growth_target")) return {};
    const auto& t = config["growth_target"];
    const std::string kind = t["kind"].get<std::string>();
    const double scale = t.contains("scale") ? t["scale"].get<double>() : 1.0;
    if (kind == "power") {
        const double e = t.contains("exponent") ? t["exponent"].get<double>() : 1.0;
        return [scale, e](double r) { return scale * std::pow(r, e); };
    }
    if (kind == "exp") return [scale](double r) { return scale * std::exp(r); };
    return [scale](double r) { return r > 1.0 ? scale * std::log(r) : 0.0; };
}

SuiteOptions suite_options_from(const nlohmann::json& config, const CliCommon& common) {
    SuiteOptions opt;
    opt.radii = grid_from(config, "r_list", opt.radii);
    opt.s_grid = grid_from(config, "s_grid", opt.s_grid);
    opt.rtol = chosen(config, "quadrature", "rtol", opt.rtol, common, true);
    opt.threads = thread_count(config, common);
    if (config.contains("sample_points"))
        opt.sample_points = config["sample_points"].get<int>();
    opt.growth_target = growth_target_from(config);
    return opt;
}

// ---- construction params ---------------------------------------------------

ConstructionAParams a_params_from(const nlohmann::json& c) {
    ConstructionAParams p;
    if (c.contains("n")) p.n = c["n"].get<int>();
    if (c.contains("k_max")) p.k_max = c["k_max"].get<int>();
    if (c.contains("eps_ratio")) p.eps.ratio = c["eps_ratio"].get<double>();
    if (c.contains("radius")) {
        const auto& r = c["radius"];
        if (r.contains("exponential")) p.radius.exponential = r["exponential"].get<bool>();
        if (r.contains("start")) p.radius.start = r["start"].get<double>();
        if (r.contains("step")) p.radius.step = r["step"].get<double>();
    }
    if (c.contains("growth_scale")) p.growth.scale = c["growth_scale"].get<double>();
    if (c.contains("flat_b")) p.flat_b = c["flat_b"].get<double>();
    return p;
}

ConstructionBParams b_params_from(const nlohmann::json& c) {
    ConstructionBParams p;
    if (c.contains("n")) p.n = c["n"].get<int>();
    if (c.contains("k_max")) p.k_max = c["k_max"].get<int>();
    if (c.contains("eps_ratio")) p.eps_ratio = c["eps_ratio"].get<double>();
    if (c.contains("flat_b")) p.flat_b = c["flat_b"].get<double>();
    if (c.contains("phi")) {
        p.phi.radius = c["phi"]["radius"].get<std::vector<double>>();
        p.phi.value = c["phi"]["value"].get<std::vector<double>>();
    }
    return p;
}

void write_report(const std::string& path, const nlohmann::ordered_json& report) {
    write_text_file(path, report.dump(2) + "\n");
    std::printf("wrote %s\n", path.c_str());
}

// ---- subcommands -----------------------------------------------------------

int cmd_construct(const CliCommon& common) {
    const nlohmann::json config = load_config(common);
    if (!config.contains("construction")) {
        std::fprintf(stderr, "error: config has no construction section\n");
        return kExitConfigError;
    }
    const auto& c = config["construction"];
    const std::string kind = c["kind"].get<std::string>();
    Construction built;
    if (kind == "unbounded")
        built = build_unbounded(a_params_from(c));
    else
        built = build_prescribed_growth(b_params_from(c));

    const std::string out = output_dir(config, common);
    fs::create_directories(out);
    save_field(built.field, out + "/field.json");
    std::printf("wrote %s/field.json (%zu bubble terms)\n", out.c_str(),
                built.field.bubbles.size());

    nlohmann::ordered_json rep = report_header(effective_config(config, common));
    rep["construction"] = kind;
    rep["report"] = report_to_json(built.report);
    write_report(out + "/construct_report.json", rep);

    int failed = 0;
    for (const ConstructionCheck& check : built.report.checks)
        if (!check.ok) {
            ++failed;
            std::fprintf(stderr, "failed: %s (margin %.6g)\n", check.name.c_str(),
                         check.margin);
        }
    std::printf("construction checks: %zu, failed: %d\n", built.report.checks.size(),
                failed);
    return built.report.all_ok() ? kExitPass : kExitCheckFailure;
}

int cmd_verify(const CliCommon& common, const std::string& field_file,
               const std::string& suite) {
    const nlohmann::json config = load_config(common);
    SolutionField f;
    try {
        f = load_field(field_file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: cannot load field '%s': %s\n", field_file.c_str(),
                     e.what());
        return kExitConfigError;
    }
    const SuiteOptions opt = suite_options_from(config, common);
    std::vector<std::string> which;
    if (suite == "all")
        which = {"curvature", "pohozaev", "growth", "cylinder"};
    else
        which = {suite};

    std::vector<SuiteReport> reports;
    for (const std::string& name : which) {
        try {
            std::vector<SuiteReport> one = run_suites(f, name, opt);
            reports.insert(reports.end(), one.begin(), one.end());
        } catch (const std::exception& e) {
            // Keep going: partial results are still worth writing.
            SuiteReport aborted;
            aborted.suite = name;
            CheckResult c;
            c.name = "suite completed";
            c.pass = false;
            c.note = e.what();
            aborted.checks.push_back(c);
            reports.push_back(aborted);
        }
    }

    const std::string out = output_dir(config, common);
    fs::create_directories(out);
    nlohmann::ordered_json rep = report_header(effective_config(config, common));
    rep["field"] = field_file;
    rep["suite"] = suite;
    const nlohmann::ordered_json body = suites_to_json(reports);
    rep["all_pass"] = body["all_pass"];
    rep["suites"] = body["suites"];
    write_report(out + "/verify_report.json", rep);
    for (const SuiteReport& r : reports)
        write_text_file(out + "/verify_" + r.suite + ".csv",
                        suites_csv(std::vector<SuiteReport>{r}));

    bool all = true;
    for (const SuiteReport& r : reports) {
        std::printf("%-10s %s\n", r.suite.c_str(), r.all_pass() ? "pass" : "FAIL");
        all = all && r.all_pass();
    }
    return all ? kExitPass : kExitCheckFailure;
}

int cmd_fowler(const CliCommon& common, int n, bool fixed_pt, bool homoclinic, bool check,
               const std::string& eps_csv) {
    const nlohmann::json config = load_config(common);
    const DimensionContext ctx = make_context(n);
    if (fixed_pt) {
        std::printf("%.6f\n", fixed_point(ctx));
        return kExitPass;
    }
    FowlerOptions fopt;
    if (common.rtol > 0.0) fopt.rtol = common.rtol;
    fopt.threads = thread_count(config, common);
    const std::string out = output_dir(config, common);

    if (homoclinic) {
        const double m = ctx.bubble_exp();
        const FowlerOrbit orbit = integrate_orbit(ctx, 1.0, 0.0, 10.0, fopt);
        double residual = 0.0;
        for (const FowlerSample& smp : orbit.samples)
            residual = std::max(residual,
                                std::abs(smp.v - std::pow(std::cosh(smp.s), -m)));
        fs::create_directories(out);
        write_text_file(out + "/fowler_homoclinic.csv", orbit_csv(orbit));
        std::printf("wrote %s/fowler_homoclinic.csv\n", out.c_str());
        std::printf("closed-form residual: %.3g\n", residual);
        if (check) return residual <= 1e-8 ? kExitPass : kExitCheckFailure;
        return kExitPass;
    }

    std::vector<double> grid;
    if (!eps_csv.empty()) {
        std::size_t pos = 0;
        while (pos < eps_csv.size()) {
            std::size_t next = eps_csv.find(',', pos);
            if (next == std::string::npos) next = eps_csv.size();
            try {
                grid.push_back(std::stod(eps_csv.substr(pos, next - pos)));
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: bad --eps entry '%s'\n",
                             eps_csv.substr(pos, next - pos).c_str());
                return kExitConfigError;
            }
            pos = next + 1;
        }
    } else {
        grid = grid_from(config, "eps_grid", {});
    }
    if (grid.empty()) {
        std::fprintf(stderr,
                     "error: choose --fixed-point, --homoclinic, or an eps grid "
                     "(--eps or config grids.eps_grid)\n");
        return kExitConfigError;
    }
    try {
        const std::vector<FamilyRow> rows = necksize_family(ctx, grid, fopt);
        const std::string table = family_csv(rows);
        fs::create_directories(out);
        write_text_file(out + "/fowler_family.csv", table);
        std::printf("wrote %s/fowler_family.csv\n", out.c_str());
        std::fputs(table.c_str(), stdout);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    }
    return kExitPass;
}

int cmd_diagnose(const CliCommon& common, const std::string& field_file) {
    const nlohmann::json config = load_config(common);
    SolutionField f;
    try {
        f = load_field(field_file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: cannot load field '%s': %s\n", field_file.c_str(),
                     e.what());
        return kExitConfigError;
    }
    DiagnosticsConfig cfg;
    cfg.threads = thread_count(config, common);
    if (common.rtol > 0.0) cfg.pohozaev_rtol = common.rtol;
    const std::vector<double> s_grid = grid_from(config, "s_grid", SuiteOptions{}.s_grid);
    const DiagnosticsReport diag = diagnostics(f, s_grid, cfg);

    const std::string out = output_dir(config, common);
    fs::create_directories(out);
    nlohmann::ordered_json rep = report_header(effective_config(config, common));
    rep["field"] = field_file;
    const nlohmann::ordered_json body = diagnostics_to_json(diag);
    rep["rows"] = body["rows"];
    rep["p_inf"] = body["p_inf"];
    write_report(out + "/diagnose_report.json", rep);
    write_text_file(out + "/diagnose_rows.csv", diagnostics_csv(diag));
    std::printf("functional lower bound over the grid: %.6g\n", diag.p_inf);
    return kExitPass;
}

int cmd_report(const CliCommon& common) {
    const nlohmann::json config = load_config(common);
    const std::string out = output_dir(config, common);
    nlohmann::ordered_json summary = report_header(effective_config(config, common));
    bool any = false;
    bool all_pass = true;
    for (const char* name : {"construct_report", "verify_report", "diagnose_report"}) {
        const std::string path = out + "/" + name + ".json";
        if (!fs::exists(path)) continue;
        nlohmann::ordered_json part;
        try {
            part = nlohmann::ordered_json::parse(read_text_file(path));
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s: %s\n", path.c_str(), e.what());
            return kExitConfigError;
        }
        if (part.contains("all_pass")) all_pass = all_pass && part["all_pass"].get<bool>();
        if (part.contains("report") && part["report"].contains("all_ok"))
            all_pass = all_pass && part["report"]["all_ok"].get<bool>();
        summary["reports"][name] = std::move(part);
        any = true;
    }
    std::vector<std::string> tables;
    if (fs::exists(out))
        for (const auto& entry : fs::directory_iterator(out))
            if (entry.path().extension() == ".csv")
                tables.push_back(entry.path().filename().string());
    std::sort(tables.begin(), tables.end());
    summary["tables"] = tables;
    if (!any) {
        std::fprintf(stderr, "error: nothing to merge in '%s'\n", out.c_str());
        return kExitConfigError;
    }
    summary["all_pass"] = all_pass;
    write_report(out + "/summary.json", summary);
    return all_pass ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructs explicit conformal-scalar-curvature fields and verifies "
                 "their quantitative properties"};
    app.require_subcommand(1);

    CliCommon construct_common;
    CLI::App* construct = app.add_subcommand(
        "construct", "Build a field from config and verify the construction inequalities");
    add_common_flags(construct, construct_common);

    CliCommon verify_common;
    std::string verify_field, verify_suite = "all";
    CLI::App* verify =
        app.add_subcommand("verify", "Run verification suites on a saved field");
    verify->add_option("field", verify_field, "Field JSON file")->required();
    verify->add_option("--suite", verify_suite, "curvature, pohozaev, growth, cylinder, all")
        ->check(CLI::IsMember({"curvature", "pohozaev", "growth", "cylinder", "all"}));
    add_common_flags(verify, verify_common);

    CliCommon fowler_common;
    int fowler_n = 3;
    bool fowler_fixed = false, fowler_homoclinic = false, fowler_check = false;
    std::string fowler_eps;
    CLI::App* fowler =
        app.add_subcommand("fowler", "Radial cylinder ODE: fixed point, homoclinic, families");
    fowler->add_option("--n", fowler_n, "Dimension")->check(CLI::Range(3, 16));
    fowler->add_flag("--fixed-point", fowler_fixed, "Print the rest value of the profile");
    fowler->add_flag("--homoclinic", fowler_homoclinic,
                     "Integrate the decaying orbit and compare to the closed form");
    fowler->add_flag("--check", fowler_check, "Exit nonzero if the comparison fails");
    fowler->add_option("--eps", fowler_eps, "Comma-separated necksize grid");
    add_common_flags(fowler, fowler_common);

    CliCommon diagnose_common;
    std::string diagnose_field;
    CLI::App* diagnose =
        app.add_subcommand("diagnose", "Tabulate the growth-hypothesis measurements");
    diagnose->add_option("field", diagnose_field, "Field JSON file")->required();
    add_common_flags(diagnose, diagnose_common);

    CliCommon report_common;
    CLI::App* report =
        app.add_subcommand("report", "Merge reports in the output directory into one summary");
    add_common_flags(report, report_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (construct->parsed()) return cmd_construct(construct_common);
        if (verify->parsed()) return cmd_verify(verify_common, verify_field, verify_suite);
        if (fowler->parsed())
            return cmd_fowler(fowler_common, fowler_n, fowler_fixed, fowler_homoclinic,
                              fowler_check, fowler_eps);
        if (diagnose->parsed()) return cmd_diagnose(diagnose_common, diagnose_field);
        if (report->parsed()) return cmd_report(report_common);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    }
    return kExitConfigError;
}
