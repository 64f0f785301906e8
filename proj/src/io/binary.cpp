// Copyright 2026 The MKA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mka/io/binary.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mka/error.hpp"

namespace mka::io {

void ByteWriter::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  buf_.insert(buf_.end(), p, p + n);
}

void ByteWriter::u16(std::uint16_t v) {
  const std::uint8_t b[2] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)};
  bytes(b, 2);
}

void ByteWriter::u32(std::uint32_t v) {
  const std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
  bytes(b, 4);
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::short_string(std::string_view s) {
  if (s.size() > 0xFFFF) throw InvalidArgument("string too long for a u16 length prefix");
  u16(static_cast<std::uint16_t>(s.size()));
  bytes(s.data(), s.size());
}

void ByteReader::require(std::size_t n) const {
  if (size_ - pos_ < n) {
    throw FormatError(FormatErrorCode::kTruncated, context_ + ": truncated at byte " + std::to_string(pos_));
  }
}

void ByteReader::read(void* out, std::size_t n) {
  require(n);
  std::memcpy(out, data_ + pos_, n);
  pos_ += n;
}

void ByteReader::expect_magic(std::string_view tag) {
  const std::size_t avail = std::min(size_ - pos_, tag.size());
  if (avail > 0 && avail < tag.size() && std::memcmp(data_ + pos_, tag.data(), avail) == 0) {
    throw FormatError(FormatErrorCode::kTruncated, context_ + ": file ends inside the magic tag");
  }
  if (avail < tag.size() || std::memcmp(data_ + pos_, tag.data(), tag.size()) != 0) {
    throw FormatError(FormatErrorCode::kBadMagic, context_ + ": expected magic \"" + std::string(tag) + "\"");
  }
  pos_ += tag.size();
}

std::uint16_t ByteReader::expect_version(std::uint16_t version) {
  const std::uint16_t v = u16();
  if (v != version) {
    throw FormatError(FormatErrorCode::kBadVersion,
                      context_ + ": unsupported version " + std::to_string(v) + " (expected " +
                          std::to_string(version) + ")");
  }
  return v;
}

std::uint8_t ByteReader::u8() {
  require(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  require(2);
  const std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  require(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
  pos_ += 4;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

std::string ByteReader::short_string() {
  const std::uint16_t n = u16();
  std::string s(n, '\0');
  read(s.data(), n);
  return s;
}

void ByteReader::expect_end() {
  if (!at_end()) {
    throw FormatError(FormatErrorCode::kBadShape,
                      context_ + ": " + std::to_string(remaining()) + " trailing bytes after payload");
  }
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path, "read failed");
  return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open file for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path, "write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open file for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path, "write failed");
}

}  // namespace mka::io
