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
#include <stdexcept>
#include <string>

namespace egcsi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument outside its documented domain.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Matrix or vector shape does not match the system configuration.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Input has zero (or non-finite) norm where a nonzero one is required.
class ZeroNormError : public Error {
public:
  using Error::Error;
};

class NonFiniteError : public Error {
public:
  using Error::Error;
};

/// A learned codec was used before training.
class UntrainedCodecError : public Error {
public:
  using Error::Error;
};

/// A bitstream does not match the layout implied by the shared configuration.
class MalformedBitstreamError : public Error {
public:
  MalformedBitstreamError(const std::string& what, std::ptrdiff_t record = -1)
      : Error(record >= 0 ? "record " + std::to_string(record) + ": " + what : what),
        record_(record) {}

  /// Index of the offending record, or -1 for message-level problems.
  std::ptrdiff_t record() const noexcept { return record_; }

private:
  std::ptrdiff_t record_;
};

/// File-system or stream failure while persisting or loading.
class IoError : public Error {
public:
  using Error::Error;
};

/// A file was read successfully but its contents are not a valid container.
class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace egcsi
