#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treerules {

// Malformed or inconsistent input data: CSV files, node tables, rule tables.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Condition text that does not follow the grammar. offset is a byte offset
// into the parsed string.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : DataError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace treerules
