#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace boxer::csv {

/// Streaming RFC 4180 reader over an in-memory buffer. Quoted fields may
/// contain separators, doubled quotes and newlines; CRLF line ends are accepted.
class Reader {
 public:
  explicit Reader(std::string_view buffer) : buffer_(buffer) {}

  /// Fills `fields` with the next record; returns false at end of input.
  /// Blank lines are skipped. `line()` is the 1-based line the record started on.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::string_view buffer_;
  std::size_t pos_ = 0;
  std::size_t current_line_ = 1;
  std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a separator, quote or line break.
std::string escape(std::string_view field);

}  // namespace boxer::csv
