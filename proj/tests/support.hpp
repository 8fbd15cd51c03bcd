#pragma once

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sadf/classifiers.hpp"
#include "sadf/error.hpp"
#include "sadf/flow_schema.hpp"

namespace sadf {
inline void PrintTo(const FlowRecord& r, std::ostream* os) {
  *os << format_record(r) << " [stime=" << (r.stime ? std::to_string(*r.stime) : "none") << "]";
}
}  // namespace sadf

namespace sadf::test {

#define EXPECT_ERRC(stmt, errc)                                                   \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << ::sadf::errc_name(errc) << " from " #stmt; \
    } catch (const ::sadf::Error& e) {                                            \
      EXPECT_EQ(e.code(), errc) << e.what();                                      \
    }                                                                             \
  } while (0)

/// Fresh directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sadf_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (const char c : text) n += c == '\n';
  return n;
}

/// Labeled dataset from dense rows.
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  Dataset d{FeatureMatrix(rows.empty() ? 0 : rows.front().size()), {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.x.add_dense_row(rows[i]);
    d.y.push_back(static_cast<std::uint8_t>(labels[i]));
  }
  return d;
}

/// A UNSW record with every categorical set to `text` and numerics to 0.
inline FlowRecord blank_record(const DatasetSchema& schema, const std::string& text = "x") {
  FlowRecord r;
  for (const auto& f : schema.features()) {
    if (f.kind == FeatureKind::categorical)
      r.values.emplace_back(text);
    else
      r.values.emplace_back(0.0);
  }
  if (const auto t = schema.time_index()) r.stime = 0.0;
  return r;
}

}  // namespace sadf::test
