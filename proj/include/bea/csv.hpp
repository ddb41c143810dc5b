// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bea::csv {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Writes `fields` joined by commas and a trailing newline. Fields are written verbatim.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one line on commas (no quoting support; none of our files need it).
std::vector<std::string> split_row(std::string_view line);

/// Reads a whole CSV file into header + rows. Throws std::runtime_error on IO failure.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Table read_file(const std::string& path);

}  // namespace bea::csv
