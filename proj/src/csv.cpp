#include "csv.hpp"

#include "boxer/error.hpp"

namespace boxer::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  while (pos_ < buffer_.size() && (buffer_[pos_] == '\n' || buffer_[pos_] == '\r')) {
    if (buffer_[pos_] == '\n') ++current_line_;
    ++pos_;
  }
  if (pos_ >= buffer_.size()) return false;
  record_line_ = current_line_;

  std::string field;
  while (true) {
    field.clear();
    if (pos_ < buffer_.size() && buffer_[pos_] == '"') {
      ++pos_;
      while (true) {
        if (pos_ >= buffer_.size()) {
          throw Error(ErrorCode::SchemaViolation, "unterminated quoted CSV field",
                      "csv:" + std::to_string(record_line_));
        }
        const char c = buffer_[pos_++];
        if (c == '"') {
          if (pos_ < buffer_.size() && buffer_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            break;
          }
        } else {
          if (c == '\n') ++current_line_;
          field.push_back(c);
        }
      }
    } else {
      const auto start = pos_;
      while (pos_ < buffer_.size() && buffer_[pos_] != ',' && buffer_[pos_] != '\n' && buffer_[pos_] != '\r') {
        ++pos_;
      }
      field.assign(buffer_.substr(start, pos_ - start));
    }
    fields.push_back(field);

    if (pos_ >= buffer_.size()) return true;
    const char sep = buffer_[pos_];
    if (sep == ',') {
      ++pos_;
      continue;
    }
    if (sep == '\r') ++pos_;
    if (pos_ < buffer_.size() && buffer_[pos_] == '\n') {
      ++pos_;
      ++current_line_;
    }
    return true;
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace boxer::csv
