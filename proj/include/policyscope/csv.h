// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLICYSCOPE_CSV_H_
#define POLICYSCOPE_CSV_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace policyscope::csv {

struct Record {
  std::size_t line = 0;  // physical line where the record starts (1-based)
  std::vector<std::string> fields;
};

// RFC-4180 reader: comma separator, double-quote quoting with "" escapes,
// CRLF or LF line ends, quoted fields may span lines. Blank lines are
// skipped. Throws SchemaError on an unterminated quote.
std::vector<Record> parse(std::string_view text);

// Maps header names to column positions.
class Header {
 public:
  explicit Header(const Record& header_row);
  std::optional<std::size_t> find(std::string_view name) const;
  // Throws SchemaError naming every missing column.
  void require(std::initializer_list<std::string_view> names) const;
  std::size_t at(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace policyscope::csv

#endif  // POLICYSCOPE_CSV_H_
