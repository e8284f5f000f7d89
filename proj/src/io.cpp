#include "cmi/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "cmi/error.hpp"

namespace cmi {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream row(line);
  while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": " + what);
}

double parse_cell(const std::string& cell, std::size_t line) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) malformed(line, "non-numeric cell '" + cell + "'");
  return value;
}

// Non-finite doubles serialize as null; `missing` is what null reads back as.
double number_or(const json& j, double missing) { return j.is_null() ? missing : j.get<double>(); }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* truncation_mode(TruncationRule::Mode m) {
  return m == TruncationRule::Mode::Explicit ? "explicit" : "schedule";
}

const char* contact_mode(ContactSetSpec::Mode m) {
  switch (m) {
    case ContactSetSpec::Mode::FullSupport: return "full";
    case ContactSetSpec::Mode::Explicit: return "explicit";
    case ContactSetSpec::Mode::Estimated: return "estimate";
  }
  return "full";
}

TestConfig config_from_json(const json& j) {
  TestConfig c;
  const auto& t = j.at("truncation");
  c.truncation.mode = t.at("mode") == "explicit" ? TruncationRule::Mode::Explicit : TruncationRule::Mode::Schedule;
  c.truncation.value = t.at("value");
  c.truncation.kappa = t.at("kappa");
  c.truncation.delta = t.at("delta");
  const auto& s = j.at("contact");
  const std::string mode = s.at("mode");
  c.contact.mode = mode == "explicit"   ? ContactSetSpec::Mode::Explicit
                   : mode == "estimate" ? ContactSetSpec::Mode::Estimated
                                        : ContactSetSpec::Mode::FullSupport;
  c.contact.lo = s.at("lo");
  c.contact.hi = s.at("hi");
  c.contact.bandwidth = s.at("bandwidth");
  c.contact.multiplier = s.at("multiplier");
  c.alpha = j.at("alpha");
  c.c_exponent = j.at("c_exponent");
  return c;
}

}  // namespace

CsvData parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_row(line);
      break;
    }
  }
  if (header.empty()) malformed(line_no == 0 ? 1 : line_no, "missing header");

  std::ptrdiff_t x_col = -1;
  std::vector<std::size_t> y_cols;
  CsvData out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "x") {
      if (x_col >= 0) malformed(line_no, "duplicate x column");
      x_col = static_cast<std::ptrdiff_t>(c);
    } else if (!header[c].empty() && header[c].front() == 'y') {
      y_cols.push_back(c);
      out.y_names.push_back(header[c]);
    }
  }
  if (x_col < 0) malformed(line_no, "header has no 'x' column");
  if (y_cols.empty()) malformed(line_no, "header has no 'y' column");

  std::vector<double> xs;
  std::vector<std::vector<double>> ys(y_cols.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      malformed(line_no, "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
    }
    xs.push_back(parse_cell(cells[static_cast<std::size_t>(x_col)], line_no));
    for (std::size_t k = 0; k < y_cols.size(); ++k) ys[k].push_back(parse_cell(cells[y_cols[k]], line_no));
  }

  const Eigen::Map<const VectorX<double>> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  for (const auto& col : ys) {
    const Eigen::Map<const VectorX<double>> y(col.data(), static_cast<Eigen::Index>(col.size()));
    out.samples.push_back(build_sample<double>(VectorX<double>(x), VectorX<double>(y)));
  }
  return out;
}

CsvData ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return parse_csv(in);
}

json to_json(const TestConfig& config) {
  return {
      {"truncation",
       {{"mode", truncation_mode(config.truncation.mode)},
        {"value", config.truncation.value},
        {"kappa", config.truncation.kappa},
        {"delta", config.truncation.delta}}},
      {"contact",
       {{"mode", contact_mode(config.contact.mode)},
        {"lo", config.contact.lo},
        {"hi", config.contact.hi},
        {"bandwidth", config.contact.bandwidth},
        {"multiplier", config.contact.multiplier}}},
      {"alpha", config.alpha},
      {"c_exponent", config.c_exponent},
  };
}

json to_json(const TestReport& report) {
  json j;
  j["n"] = report.n;
  j["sigma_min"] = number(report.sigma_min);
  j["contact"] = {{"lo", report.contact_lo}, {"hi", report.contact_hi}};
  j["c_hat"] = number(report.c_hat);
  j["r"] = report.r;
  j["alpha"] = report.alpha;
  j["inf_value"] = number(report.inf_value);
  j["t_n"] = report.t_n;
  j["statistic"] = report.statistic;
  j["cv"] = report.cv ? number(*report.cv) : json(nullptr);
  j["first_order"] = number(report.first_order);
  j["reject"] = report.reject;
  if (report.argmin_groups && report.argmin_x) {
    j["argmin"] = {{"group_lo", report.argmin_groups->lo},
                   {"group_hi", report.argmin_groups->hi},
                   {"x_lo", report.argmin_x->first},
                   {"x_hi", report.argmin_x->second}};
  } else {
    j["argmin"] = nullptr;
  }
  j["feasible_count"] = report.feasible_count;
  j["flags"] = {{"no_feasible_interval", report.flags.no_feasible_interval},
                {"scale_too_small", report.flags.scale_too_small},
                {"empty_contact_set", report.flags.empty_contact_set}};
  j["config"] = to_json(report.config);
  j["coordinates"] = json::array();
  for (const auto& c : report.coordinates) j["coordinates"].push_back(to_json(c));
  j["driving_coordinate"] = report.driving_coordinate ? json(*report.driving_coordinate) : json(nullptr);
  return j;
}

TestReport test_report_from_json(const json& doc) {
  const json& j = doc.contains("report") ? doc.at("report") : doc;
  TestReport r;
  r.n = j.at("n");
  r.sigma_min = number_or(j.at("sigma_min"), std::numeric_limits<double>::quiet_NaN());
  r.contact_lo = j.at("contact").at("lo");
  r.contact_hi = j.at("contact").at("hi");
  r.c_hat = number_or(j.at("c_hat"), std::numeric_limits<double>::quiet_NaN());
  r.r = j.at("r");
  r.alpha = j.at("alpha");
  r.inf_value = number_or(j.at("inf_value"), std::numeric_limits<double>::infinity());
  r.t_n = j.at("t_n");
  r.statistic = j.at("statistic");
  if (!j.at("cv").is_null()) r.cv = j.at("cv").get<double>();
  r.first_order = number_or(j.at("first_order"), std::numeric_limits<double>::quiet_NaN());
  r.reject = j.at("reject");
  if (const auto& a = j.at("argmin"); !a.is_null()) {
    r.argmin_groups = GroupRange{a.at("group_lo"), a.at("group_hi")};
    r.argmin_x = std::make_pair(a.at("x_lo").get<double>(), a.at("x_hi").get<double>());
  }
  r.feasible_count = j.at("feasible_count");
  r.flags.no_feasible_interval = j.at("flags").at("no_feasible_interval");
  r.flags.scale_too_small = j.at("flags").at("scale_too_small");
  r.flags.empty_contact_set = j.at("flags").at("empty_contact_set");
  r.config = config_from_json(j.at("config"));
  for (const auto& c : j.at("coordinates")) r.coordinates.push_back(test_report_from_json(c));
  if (!j.at("driving_coordinate").is_null()) r.driving_coordinate = j.at("driving_coordinate").get<std::size_t>();
  return r;
}

json to_json(const McSummary& s) {
  return {
      {"label", s.label},
      {"n", s.n},
      {"reps", s.reps},
      {"rejections", s.rejections},
      {"flagged", s.flagged},
      {"rate", s.rate},
      {"interval", {{"lo", s.interval.lo}, {"hi", s.interval.hi}, {"level", 0.95}}},
  };
}

McSummary mc_summary_from_json(const json& j) {
  McSummary s;
  s.label = j.at("label");
  s.n = j.at("n");
  s.reps = j.at("reps");
  s.rejections = j.at("rejections");
  s.flagged = j.at("flagged");
  s.rate = j.at("rate");
  s.interval.lo = j.at("interval").at("lo");
  s.interval.hi = j.at("interval").at("hi");
  return s;
}

json to_json(const LimitSummary& s) {
  json j;
  j["horizon"] = s.config.horizon;
  j["step"] = s.config.step;
  j["reps"] = s.config.reps;
  j["seed"] = s.config.seed;
  j["ks_distance"] = number(s.ks_distance);
  j["minima"] = s.minima;
  j["normalized"] = s.normalized;
  return j;
}

json make_document(const std::string& kind, json body, bool timestamp) {
  json doc;
  doc["kind"] = kind;
  doc["tool_version"] = kToolVersion;
  if (timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    doc["generated_at"] = buf;
  }
  doc["report"] = std::move(body);
  return doc;
}

std::string serialize(const json& doc) { return doc.dump(2) + "\n"; }

void emit_report(const json& doc, const std::filesystem::path& path) {
  const std::string text = serialize(doc);
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!std::cout) throw Error(ErrorCode::IoFailure, "failed writing to stdout");
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

}  // namespace cmi
