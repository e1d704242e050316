#pragma once

#include <string>
#include <vector>

#include "csc/analysis.hpp"
#include "csc/suites.hpp"
#include "json.hpp"

namespace csc {

inline constexpr const char* kToolVersion = "0.1.0";

/// 17 significant digits with a '.' decimal point (the process stays in the
/// C locale); round trips bit-exactly through strtod.
std::string format_g17(double x);

/// FNV-1a 64-bit over the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Fingerprint of a config: FNV-1a of the canonical (sorted-key, compact)
/// dump, so formatting and key order in the source file do not matter.
std::string config_hash(const nlohmann::json& config);

/// Common report preamble: tool version + config fingerprint. Nothing
/// time- or machine-dependent goes in, so rerunning a config reproduces
/// the report byte for byte.
nlohmann::ordered_json report_header(const nlohmann::json& config);

nlohmann::ordered_json suites_to_json(const std::vector<SuiteReport>& reports);
nlohmann::ordered_json growth_to_json(const std::vector<GrowthRow>& rows);
nlohmann::ordered_json diagnostics_to_json(const DiagnosticsReport& rep);

std::string suites_csv(const std::vector<SuiteReport>& reports);
std::string growth_csv(const std::vector<GrowthRow>& rows);
std::string diagnostics_csv(const DiagnosticsReport& rep);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace csc
