#ifndef CMI_IO_HPP_
#define CMI_IO_HPP_

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "cmi/inference.hpp"
#include "cmi/simulation.hpp"

namespace cmi {

inline constexpr const char* kToolVersion = "1.0.0";

/// One Sample per y column, all sharing the x column.
struct CsvData {
  std::vector<std::string> y_names;
  std::vector<Sample> samples;
};

/// Header must name exactly one `x` column and at least one column whose
/// name starts with `y`. Throws MalformedCsv with the 1-based line number.
CsvData parse_csv(std::istream& in);
CsvData ingest_csv(const std::filesystem::path& path);

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const McSummary& summary);
nlohmann::json to_json(const LimitSummary& summary);
nlohmann::json to_json(const TestConfig& config);

TestReport test_report_from_json(const nlohmann::json& doc);
McSummary mc_summary_from_json(const nlohmann::json& doc);

/// Wraps a report body with `kind`, `tool_version` and, optionally, a
/// `generated_at` UTC timestamp. Everything else is a pure function of the
/// report.
nlohmann::json make_document(const std::string& kind, nlohmann::json body, bool timestamp = true);

std::string serialize(const nlohmann::json& doc);

/// Writes to `path`, or to stdout when the path is empty or "-".
void emit_report(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace cmi

#endif  // CMI_IO_HPP_
