#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecofusion {

/// Sectioned key-value text file.
///
///     # comment
///     top_level_key = value
///     [section]
///     key = value with spaces
///
/// Keys before the first section header live in section "". Whitespace around keys and
/// values is trimmed; '#' starts a comment anywhere on a line. Duplicate keys within a
/// section are an error. Sections keep file order.
class KvFile {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
    int line = 0;
  };

  static KvFile parse(std::string_view text, std::string origin = "<memory>");
  static KvFile load(const std::filesystem::path& path);

  const std::string& origin() const { return origin_; }
  const std::vector<Section>& sections() const { return sections_; }

  const Section* find(std::string_view section) const;
  std::optional<std::string> get(std::string_view section, std::string_view key) const;

  /// Throws ConfigError naming "section.key" when absent.
  std::string require(std::string_view section, std::string_view key) const;
  double require_double(std::string_view section, std::string_view key) const;
  double get_double(std::string_view section, std::string_view key, double fallback) const;
  long long get_int(std::string_view section, std::string_view key, long long fallback) const;
  bool get_bool(std::string_view section, std::string_view key, bool fallback) const;

 private:
  std::string origin_;
  std::vector<Section> sections_;
};

double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
std::vector<std::string> split_words(std::string_view text);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// Whole file contents; throws ConfigError when unreadable.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace ecofusion
