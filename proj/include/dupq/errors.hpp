#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dupq {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input stream (XML, JSONL, CSV). Carries the position that
// made the parse fail: a byte offset for binary/XML streams, a line
// number for line-oriented formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Semantically invalid data: schema violations, insufficient negatives,
// missing masters, empty candidate pools.
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: unknown feature names, schema mismatches, missing
// auth variables, invalid manifests.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// External provider (OCR / captioning service) failure.
class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace dupq
