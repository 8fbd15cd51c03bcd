#include "sadf/binary_io.hpp"

#include <fstream>
#include <iterator>

namespace sadf {

std::vector<char> build_section_file(std::string_view magic, std::uint8_t version,
                                     const std::vector<std::pair<std::string, ByteWriter>>& sections) {
  ByteWriter out;
  out.raw(magic);
  out.u8(version);
  for (const auto& [tag, payload] : sections) out.section(tag, payload);
  return out.bytes();
}

SectionFile parse_section_file(std::string_view data, std::string_view magic) {
  ByteReader in(data);
  if (data.size() < magic.size() + 1 || in.take(magic.size()) != magic)
    throw Error(Errc::bad_format, "bad magic, expected " + std::string(magic));
  SectionFile file;
  file.version = in.u8();
  while (!in.done()) {
    std::string tag(in.take(4));
    const auto len = in.u64();
    file.sections[tag] = std::string(in.take(len));
  }
  return file;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_failure, "short write to " + path.string());
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace sadf
