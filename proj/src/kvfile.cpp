#include "ecofusion/kvfile.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ecofusion/core.hpp"

namespace ecofusion {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& origin, int line) {
  return origin + ":" + std::to_string(line) + ": ";
}

}  // namespace

KvFile KvFile::parse(std::string_view text, std::string origin) {
  KvFile f;
  f.origin_ = std::move(origin);
  f.sections_.push_back(Section{"", {}, 0});
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where(f.origin_, lineno) + "unterminated section header");
      auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(where(f.origin_, lineno) + "empty section name");
      for (const auto& s : f.sections_) {
        if (s.name == name) {
          throw ConfigError(where(f.origin_, lineno) + "duplicate section [" + std::string(name) + "]");
        }
      }
      f.sections_.push_back(Section{std::string(name), {}, lineno});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where(f.origin_, lineno) + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where(f.origin_, lineno) + "empty key");
    auto& sec = f.sections_.back();
    for (const auto& [k, v] : sec.entries) {
      if (k == key) throw ConfigError(where(f.origin_, lineno) + "duplicate key '" + std::string(key) + "'");
    }
    sec.entries.emplace_back(std::string(key), std::string(value));
  }
  return f;
}

KvFile KvFile::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const KvFile::Section* KvFile::find(std::string_view section) const {
  for (const auto& s : sections_) {
    if (s.name == section) return &s;
  }
  return nullptr;
}

std::optional<std::string> KvFile::get(std::string_view section, std::string_view key) const {
  const auto* s = find(section);
  if (!s) return std::nullopt;
  for (const auto& [k, v] : s->entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KvFile::require(std::string_view section, std::string_view key) const {
  auto v = get(section, key);
  if (!v) {
    throw ConfigError(origin_ + ": missing " +
                      (section.empty() ? std::string(key) : std::string(section) + "." + std::string(key)));
  }
  return *v;
}

double KvFile::require_double(std::string_view section, std::string_view key) const {
  return parse_double(require(section, key), std::string(section) + "." + std::string(key));
}

double KvFile::get_double(std::string_view section, std::string_view key, double fallback) const {
  auto v = get(section, key);
  return v ? parse_double(*v, std::string(section) + "." + std::string(key)) : fallback;
}

long long KvFile::get_int(std::string_view section, std::string_view key, long long fallback) const {
  auto v = get(section, key);
  return v ? parse_int(*v, std::string(section) + "." + std::string(key)) : fallback;
}

bool KvFile::get_bool(std::string_view section, std::string_view key, bool fallback) const {
  auto v = get(section, key);
  return v ? parse_bool(*v, std::string(section) + "." + std::string(key)) : fallback;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": expected a finite number, got '" + std::string(text) + "'");
  }
  return v;
}

long long parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError(std::string(what) + ": expected a boolean, got '" + std::string(text) + "'");
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != ',') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ecofusion
