#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecofusion {

enum class OutputFormat { csv, json, text };

std::optional<OutputFormat> parse_output_format(std::string_view name);
std::string_view extension(OutputFormat f);

/// A column-named table of pre-formatted cells. Notes become '#' header lines in CSV and
/// text output and a "notes" array in JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;

  void add_row(std::vector<std::string> row);

  std::string to_csv() const;
  std::string to_json() const;
  std::string to_text() const;
  std::string render(OutputFormat f) const;
};

/// Fixed-point text with `digits` decimals; "nan" for missing values.
std::string fixed(double v, int digits = 6);
std::string fixed(std::optional<double> v, int digits = 6);

}  // namespace ecofusion
