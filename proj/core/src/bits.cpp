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
#include "egcsi/bits.hpp"

#include "egcsi/errors.hpp"

namespace egcsi {

void BitString::append(std::uint64_t value, int width) {
  if (width < 0 || width > 64) throw ConfigError("BitString::append: width must be in [0, 64]");
  if (width == 0) return;
  if (width < 64) value &= (std::uint64_t{1} << width) - 1;
  const std::size_t offset = size_ % 64;
  if (offset == 0) words_.push_back(0);
  const auto free_bits = static_cast<int>(64 - offset);
  if (width <= free_bits) {
    words_.back() |= value << (free_bits - width);
  } else {
    const int spill = width - free_bits;
    words_.back() |= value >> spill;
    words_.push_back(value << (64 - spill));
  }
  size_ += static_cast<std::size_t>(width);
}

void BitString::append(const BitString& other) {
  if (size_ % 64 == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return;
  }
  words_.reserve(words_.size() + other.words_.size() + 1);
  const std::size_t full = other.size_ / 64;
  for (std::size_t w = 0; w < full; ++w) append(other.words_[w], 64);
  const auto rest = static_cast<int>(other.size_ % 64);
  if (rest > 0) append(other.words_[full] >> (64 - rest), rest);
}

std::uint64_t BitString::read(std::size_t pos, int width) const {
  if (width < 0 || width > 64) throw ConfigError("BitString::read: width must be in [0, 64]");
  if (pos + static_cast<std::size_t>(width) > size_) throw MalformedBitstreamError("read past end of bit string");
  if (width == 0) return 0;
  const std::size_t w = pos / 64;
  const auto offset = static_cast<int>(pos % 64);
  std::uint64_t v = words_[w] << offset;
  if (offset + width > 64) v |= words_[w + 1] >> (64 - offset);
  return v >> (64 - width);
}

BitString BitString::slice(std::size_t pos, std::size_t count) const {
  if (pos + count > size_) throw MalformedBitstreamError("slice past end of bit string");
  BitString out;
  out.words_.reserve((count + 63) / 64);
  std::size_t done = 0;
  for (; done + 64 <= count; done += 64) out.append(read(pos + done, 64), 64);
  if (done < count) {
    const auto rest = static_cast<int>(count - done);
    out.append(read(pos + done, rest), rest);
  }
  return out;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (56 - 8 * (i % 8)));
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) throw MalformedBitstreamError("byte buffer shorter than bit count");
  BitString out;
  const std::size_t whole = bit_count / 8;
  out.words_.reserve((bit_count + 63) / 64);
  for (std::size_t i = 0; i < whole; ++i) out.append(bytes[i], 8);
  const auto rest = static_cast<int>(bit_count % 8);
  if (rest > 0) out.append(static_cast<std::uint64_t>(bytes[whole]) >> (8 - rest), rest);
  return out;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

BitString BitString::from_string(const std::string& s) {
  BitString out;
  for (char c : s) {
    if (c == '0' || c == '1')
      out.push_back(c == '1');
    else if (c != ' ' && c != '_')
      throw ConfigError("BitString::from_string: unexpected character");
  }
  return out;
}

int bits_for(std::uint64_t count) {
  int bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < count) ++bits;
  return bits;
}

}  // namespace egcsi
