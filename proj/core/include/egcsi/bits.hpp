/*
 Copyright 2026 The egcsi Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace egcsi {

/// Growable bit sequence. Multi-bit fields are written most-significant
/// bit first.
class BitString {
public:
  BitString() = default;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool operator[](std::size_t i) const { return ((words_[i / 64] >> (63 - i % 64)) & 1U) != 0; }

  void push_back(bool b) { append(b ? 1U : 0U, 1); }
  /// Appends the low `width` bits of value, MSB first. width <= 64.
  void append(std::uint64_t value, int width);
  void append(const BitString& other);

  /// Reads `width` bits starting at `pos`. Throws MalformedBitstreamError
  /// when the read would run past the end.
  std::uint64_t read(std::size_t pos, int width) const;
  BitString slice(std::size_t pos, std::size_t count) const;

  /// Packs into bytes MSB first; the final byte is zero-padded.
  std::vector<std::uint8_t> to_bytes() const;
  /// Unpacks the first `bit_count` bits of `bytes`.
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);

  /// "0101..." rendering, for test vectors and diagnostics.
  std::string to_string() const;
  static BitString from_string(const std::string& s);

  bool operator==(const BitString&) const = default;

private:
  // MSB-first within each word; bits past size_ are always zero.
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Bits needed to index `count` distinct values, ceil(log2(count)); 0 for count <= 1.
int bits_for(std::uint64_t count);

}  // namespace egcsi
