#include <gtest/gtest.h>

#include <filesystem>

#include "ecofusion/core.hpp"
#include "ecofusion/kvfile.hpp"
#include "ecofusion/report.hpp"

using namespace ecofusion;

TEST(KvFile, SectionsKeysAndComments) {
  const auto f = KvFile::parse("top = 1\n# c\n[a]\nx = hello world  # trailing\n\n[b]\ny=2.5\n");
  EXPECT_EQ(f.get("", "top"), "1");
  EXPECT_EQ(f.get("a", "x"), "hello world");
  EXPECT_DOUBLE_EQ(f.require_double("b", "y"), 2.5);
  EXPECT_FALSE(f.get("a", "y"));
  EXPECT_EQ(f.get_int("a", "missing", 7), 7);
  EXPECT_THROW(f.require("a", "missing"), ConfigError);
}

TEST(KvFile, Errors) {
  EXPECT_THROW(KvFile::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  EXPECT_THROW(KvFile::parse("[a]\n[a]\n"), ConfigError);
  EXPECT_THROW(KvFile::parse("[a\n"), ConfigError);
  EXPECT_THROW(KvFile::parse("novalue\n"), ConfigError);
  EXPECT_THROW(KvFile::parse("= 3\n"), ConfigError);
  EXPECT_THROW(KvFile::load("/nonexistent/file.cfg"), ConfigError);
}

TEST(KvFile, ScalarParsers) {
  EXPECT_DOUBLE_EQ(parse_double("1e-3", "v"), 1e-3);
  EXPECT_THROW(parse_double("abc", "v"), ConfigError);
  EXPECT_THROW(parse_double("1.0x", "v"), ConfigError);
  EXPECT_THROW(parse_double("nan", "v"), ConfigError);
  EXPECT_EQ(parse_int("-12", "v"), -12);
  EXPECT_THROW(parse_int("1.5", "v"), ConfigError);
  EXPECT_TRUE(parse_bool("true", "v"));
  EXPECT_FALSE(parse_bool("false", "v"));
  EXPECT_THROW(parse_bool("maybe", "v"), ConfigError);
  EXPECT_EQ(split_words(" a, b\tc "), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(KvFile, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 12345.678e-9, -2.5, 0.0}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
}

TEST(KvFile, AtomicWriteLeavesNoTemp) {
  const auto dir = std::filesystem::temp_directory_path() / "ecofusion_kv_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / "out.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(read_text_file(p), "two");
  EXPECT_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Report, CsvJsonText) {
  Table t;
  t.columns = {"a", "b"};
  t.notes = {"note"};
  t.add_row({"1", "x,y"});
  EXPECT_EQ(t.to_csv(), "# note\na,b\n1,\"x,y\"\n");
  const auto j = t.to_json();
  EXPECT_NE(j.find("\"notes\""), std::string::npos);
  EXPECT_NE(j.find("\"x,y\""), std::string::npos);
  EXPECT_NE(t.to_text().find("a  b"), std::string::npos);
  EXPECT_THROW(t.add_row({"only one"}), Error);
}

TEST(Report, FixedFormatting) {
  EXPECT_EQ(fixed(1.23456789, 4), "1.2346");
  EXPECT_EQ(fixed(-0.0000001, 3), "0.000");
  EXPECT_EQ(fixed(std::optional<double>{}), "nan");
  EXPECT_EQ(parse_output_format("json"), OutputFormat::json);
  EXPECT_FALSE(parse_output_format("xml"));
}
