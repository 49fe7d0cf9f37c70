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

#ifndef POLICYSCOPE_FORMAT_H_
#define POLICYSCOPE_FORMAT_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace policyscope {

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
// Fixed notation with `digits` decimals.
std::string format_fixed(double value, int digits);

// Strict full-string numeric parses; throw DataError on failure.
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

std::string_view trim(std::string_view text);

// ISO-8601 timestamp to seconds since the Unix epoch (UTC). Accepts
// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with an optional "Z" or
// "+HH:MM"/"+HHMM" offset. Fractional seconds are truncated. Throws
// DataError.
std::int64_t parse_timestamp(std::string_view text);
// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(std::int64_t epoch_seconds);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace policyscope

#endif  // POLICYSCOPE_FORMAT_H_
