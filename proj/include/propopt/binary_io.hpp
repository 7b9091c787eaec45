#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace propopt {

/// Append-only little-endian encoder.
class ByteWriter {
 public:
  void put_bytes(std::span<const std::uint8_t> bytes);
  void put_magic(std::string_view magic);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f64(double v);
  void put_f64s(std::span<const double> v);
  void put_string(std::string_view s);  // u32 length + bytes

  /// Append the CRC32 of everything written so far.
  void put_crc32();

  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked little-endian decoder; every overrun is a FormatError.
class ByteReader {
 public:
  explicit ByteReader(std::vector<std::uint8_t> bytes) : buf_(std::move(bytes)) {}
  static ByteReader from_file(const std::filesystem::path& path);

  /// Check the trailing CRC32 and drop it from the readable range.
  void verify_and_strip_crc32();

  void expect_magic(std::string_view magic);
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  double get_f64();
  std::vector<double> get_f64s(std::size_t n);
  std::string get_string();

  std::size_t remaining() const { return end_ - pos_; }
  bool at_end() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const;

  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = buf_.size();
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace propopt
