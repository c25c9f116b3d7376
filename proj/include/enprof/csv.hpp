#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace enprof::csv {

/// A parsed comma-separated document: one header row plus data rows, every
/// row carrying exactly as many fields as the header. Fields are kept as raw
/// strings; empty fields stand for absent values.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or nullopt.
  std::optional<std::size_t> column(const std::string& name) const;
};

Table read(const std::string& text);

/// Strict numeric field parsers. `where` names the field in error messages
/// (e.g. "line 4, column t_s").
double to_double(const std::string& field, const std::string& where);
std::uint64_t to_u64(const std::string& field, const std::string& where);

std::string join(const std::vector<std::string>& fields);

}  // namespace enprof::csv
