#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rddg::text {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Fixed-point formatting, e.g. format_fixed(0.3, 2) == "0.30".
std::string format_fixed(double v, int decimals);

/// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(const std::string& s);

std::string trim(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);

/// Splits one CSV record honoring double-quote escaping.
std::vector<std::string> split_csv_record(const std::string& line);

/// Quotes a CSV field only when it contains a separator, quote or newline.
std::string csv_escape(const std::string& field);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

bool starts_with(const std::string& s, const std::string& prefix);

std::string lowercase(const std::string& s);

/// Replaces every "{name}" placeholder; unknown placeholders are an error.
std::string render_template(const std::string& tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace rddg::text
