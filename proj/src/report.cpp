#include "ecofusion/report.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "ecofusion/core.hpp"

namespace ecofusion {

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "text") return OutputFormat::text;
  return std::nullopt;
}

std::string_view extension(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return ".csv";
    case OutputFormat::json: return ".json";
    case OutputFormat::text: return ".txt";
  }
  return "";
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw Error("table row width does not match its columns");
  rows.push_back(std::move(row));
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (const auto& n : notes) out += "# " + n + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_cell(columns[i]);
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
    out += "\n";
  }
  return out;
}

std::string Table::to_json() const {
  nlohmann::ordered_json j;
  j["notes"] = notes;
  j["columns"] = columns;
  auto rows_json = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < r.size(); ++i) obj[columns[i]] = r[i];
    rows_json.push_back(std::move(obj));
  }
  j["rows"] = std::move(rows_json);
  return j.dump(2) + "\n";
}

std::string Table::to_text() const {
  std::vector<std::size_t> width(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) width[i] = columns[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += "  ";
      out += cells[i];
      if (i + 1 < cells.size()) out += std::string(width[i] - cells[i].size(), ' ');
    }
    return out + "\n";
  };
  std::string out;
  for (const auto& n : notes) out += "# " + n + "\n";
  out += line(columns);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string Table::render(OutputFormat f) const {
  switch (f) {
    case OutputFormat::csv: return to_csv();
    case OutputFormat::json: return to_json();
    case OutputFormat::text: return to_text();
  }
  return to_csv();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (!s.empty() && s.front() == '-') s.erase(0, 1);
  }
  return s;
}

std::string fixed(std::optional<double> v, int digits) { return v ? fixed(*v, digits) : "nan"; }

}  // namespace ecofusion
