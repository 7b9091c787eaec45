#include "propopt/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "propopt/errors.hpp"

namespace propopt {

namespace {

template <typename U>
void append_le(std::vector<std::uint8_t>& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename U>
U read_le(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large buffers
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(chunk));
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void ByteWriter::put_bytes(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::put_magic(std::string_view magic) {
  buf_.insert(buf_.end(), magic.begin(), magic.end());
}

void ByteWriter::put_u32(std::uint32_t v) { append_le(buf_, v); }
void ByteWriter::put_u64(std::uint64_t v) { append_le(buf_, v); }
void ByteWriter::put_f64(double v) { append_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_f64s(std::span<const double> v) {
  buf_.reserve(buf_.size() + 8 * v.size());
  for (double x : v) put_f64(x);
}

void ByteWriter::put_string(std::string_view s) {
  put_u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::put_crc32() { put_u32(crc32_of(buf_)); }

void ByteWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw InvalidInput("failed writing " + path.string());
}

ByteReader ByteReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ByteReader(std::move(bytes));
}

void ByteReader::need(std::size_t n) const {
  if (end_ - pos_ < n) throw FormatError("unexpected end of data (truncated file?)");
}

void ByteReader::verify_and_strip_crc32() {
  if (end_ < pos_ + 4) throw FormatError("file too short for a checksum");
  const std::uint32_t stored = read_le<std::uint32_t>(buf_.data() + end_ - 4);
  const std::uint32_t actual = crc32_of(std::span<const std::uint8_t>(buf_.data(), end_ - 4));
  if (stored != actual) throw FormatError("checksum mismatch");
  end_ -= 4;
}

void ByteReader::expect_magic(std::string_view magic) {
  need(magic.size());
  if (std::memcmp(buf_.data() + pos_, magic.data(), magic.size()) != 0) {
    throw FormatError("bad magic, expected " + std::string(magic));
  }
  pos_ += magic.size();
}

std::uint32_t ByteReader::get_u32() {
  need(4);
  const auto v = read_le<std::uint32_t>(buf_.data() + pos_);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64() {
  need(8);
  const auto v = read_le<std::uint64_t>(buf_.data() + pos_);
  pos_ += 8;
  return v;
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::vector<double> ByteReader::get_f64s(std::size_t n) {
  if (n > remaining() / 8) throw FormatError("unexpected end of data (truncated file?)");
  std::vector<double> v(n);
  for (auto& x : v) x = get_f64();
  return v;
}

std::string ByteReader::get_string() {
  const std::uint32_t n = get_u32();
  need(n);
  std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
  pos_ += n;
  return s;
}

}  // namespace propopt
