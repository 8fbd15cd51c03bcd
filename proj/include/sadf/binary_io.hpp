#pragma once

// Little-endian byte serialization shared by the encoder and model files.
//
// File layout: 4-byte magic, 1 version byte, then a sequence of sections.
// Each section is a 4-byte ASCII tag followed by a u64 payload length and the
// payload. Readers skip sections they do not know.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sadf/error.hpp"

namespace sadf {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  void section(std::string_view tag, const ByteWriter& payload) {
    raw(tag.substr(0, 4));
    u64(payload.bytes_.size());
    bytes_.insert(bytes_.end(), payload.bytes_.begin(), payload.bytes_.end());
  }

  const std::vector<char>& bytes() const noexcept { return bytes_; }

 private:
  template <class T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string str() {
    const auto n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (n > data_.size() - pos_) throw Error(Errc::bad_format, "truncated data");
    const auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const noexcept { return pos_ == data_.size(); }

 private:
  template <class T>
  T get() {
    const auto b = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

/// Parsed container: version byte plus section payloads by tag.
struct SectionFile {
  std::uint8_t version = 0;
  std::map<std::string, std::string> sections;

  const std::string& at(const std::string& tag) const {
    const auto it = sections.find(tag);
    if (it == sections.end()) throw Error(Errc::bad_format, "missing section " + tag);
    return it->second;
  }
};

std::vector<char> build_section_file(std::string_view magic, std::uint8_t version,
                                     const std::vector<std::pair<std::string, ByteWriter>>& sections);
SectionFile parse_section_file(std::string_view data, std::string_view magic);

/// Whole-file helpers; failures throw Error(io_failure).
void write_file_bytes(const std::filesystem::path& path, const std::vector<char>& bytes);
std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace sadf
