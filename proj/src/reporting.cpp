#include "csc/reporting.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csc {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string config_hash(const nlohmann::json& config) {
    // nlohmann::json keeps keys sorted, so dump() is canonical.
    return fnv1a_hex(config.dump());
}

nlohmann::ordered_json report_header(const nlohmann::json& config) {
    nlohmann::ordered_json h;
    h["tool_version"] = kToolVersion;
    h["config_hash"] = config_hash(config);
    return h;
}

nlohmann::ordered_json suites_to_json(const std::vector<SuiteReport>& reports) {
    nlohmann::ordered_json out;
    bool all = true;
    auto arr = nlohmann::ordered_json::array();
    for (const SuiteReport& rep : reports) {
        nlohmann::ordered_json jr;
        jr["suite"] = rep.suite;
        jr["all_pass"] = rep.all_pass();
        auto checks = nlohmann::ordered_json::array();
        for (const CheckResult& c : rep.checks) {
            nlohmann::ordered_json jc;
            jc["name"] = c.name;
            jc["status"] = c.pass ? "pass" : "fail";
            jc["measured"] = c.measured;
            jc["limit"] = c.limit;
            jc["err_est"] = c.err_est;
            jc["note"] = c.note;
            checks.push_back(std::move(jc));
        }
        jr["checks"] = std::move(checks);
        all = all && rep.all_pass();
        arr.push_back(std::move(jr));
    }
    out["all_pass"] = all;
    out["suites"] = std::move(arr);
    return out;
}

nlohmann::ordered_json growth_to_json(const std::vector<GrowthRow>& rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const GrowthRow& row : rows) {
        nlohmann::ordered_json jr;
        jr["r"] = row.r;
        jr["value"] = row.value;
        jr["err_est"] = row.err_est;
        jr["per_log"] = row.per_log;
        jr["per_target"] = row.per_target;
        jr["converged"] = row.converged;
        arr.push_back(std::move(jr));
    }
    nlohmann::ordered_json out;
    out["rows"] = std::move(arr);
    return out;
}

nlohmann::ordered_json diagnostics_to_json(const DiagnosticsReport& rep) {
    auto arr = nlohmann::ordered_json::array();
    for (const DiagnosticsRow& row : rep.rows) {
        nlohmann::ordered_json jr;
        jr["s"] = row.s;
        jr["r"] = row.r;
        jr["ds_ratio"] = row.ds_ratio;
        jr["ratio_max"] = row.ratio_max;
        jr["c12_required"] = row.c12_required;
        jr["young_decay"] = row.young_decay;
        jr["radial_floor"] = row.radial_floor;
        jr["log_floor"] = row.log_floor;
        jr["p_value"] = row.p_value;
        arr.push_back(std::move(jr));
    }
    nlohmann::ordered_json out;
    out["rows"] = std::move(arr);
    out["p_inf"] = rep.p_inf;
    return out;
}

namespace {

// A field that may hold commas or quotes gets wrapped and inner quotes doubled.
std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void append_g17(std::string& out, double x, char tail) {
    out += format_g17(x);
    out += tail;
}

}  // namespace

std::string suites_csv(const std::vector<SuiteReport>& reports) {
    std::string out = "suite,check,status,measured,limit,err_est,note\n";
    for (const SuiteReport& rep : reports) {
        for (const CheckResult& c : rep.checks) {
            out += rep.suite;
            out += ',';
            out += csv_quote(c.name);
            out += ',';
            out += c.pass ? "pass" : "fail";
            out += ',';
            append_g17(out, c.measured, ',');
            append_g17(out, c.limit, ',');
            append_g17(out, c.err_est, ',');
            out += csv_quote(c.note);
            out += '\n';
        }
    }
    return out;
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
    std::string out = "r,value,err_est,per_log,per_target,converged\n";
    for (const GrowthRow& row : rows) {
        append_g17(out, row.r, ',');
        append_g17(out, row.value, ',');
        append_g17(out, row.err_est, ',');
        append_g17(out, row.per_log, ',');
        append_g17(out, row.per_target, ',');
        out += row.converged ? "1" : "0";
        out += '\n';
    }
    return out;
}

std::string diagnostics_csv(const DiagnosticsReport& rep) {
    std::string out =
        "s,r,ds_ratio,ratio_max,c12_required,young_decay,radial_floor,log_floor,p_value\n";
    for (const DiagnosticsRow& row : rep.rows) {
        append_g17(out, row.s, ',');
        append_g17(out, row.r, ',');
        append_g17(out, row.ds_ratio, ',');
        append_g17(out, row.ratio_max, ',');
        append_g17(out, row.c12_required, ',');
        append_g17(out, row.young_decay, ',');
        append_g17(out, row.radial_floor, ',');
        append_g17(out, row.log_floor, ',');
        append_g17(out, row.p_value, '\n');
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace csc
