#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace roofsim::csv {

/// Fixed notation with `decimals` digits after the point, "C" locale, no
/// exponent. Negative zero prints as zero.
std::string format_fixed(double value, int decimals);

/// Shortest representation that round-trips to the same double.
std::string format_shortest(double value);

double parse_double(std::string_view field, std::string_view context);
long long parse_int(std::string_view field, std::string_view context);

/// A parsed comma-separated table. Fields never contain commas or quotes in
/// the formats this library writes, so no quoting is supported.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws ValidationError if absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

Table read_table(std::istream& in, std::string_view source);
Table read_table_file(const std::filesystem::path& path);

std::string join(const std::vector<std::string>& fields);

/// Writes `contents` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace roofsim::csv
