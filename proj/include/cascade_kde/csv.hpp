#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cascade_kde/series.hpp"

namespace cascade_kde {

/// Series as read from disk. `mask` is present when the file carries a
/// third `mask` column.
struct SeriesFile {
    TimeSeries series;
    std::optional<std::vector<bool>> mask;
};

/// Reads the `t,y[,mask]` format. LF and CRLF line endings are accepted.
/// Throws InvalidInput on malformed content.
[[nodiscard]] SeriesFile read_series_csv(std::istream& in);
/// Throws IoError when the file cannot be opened.
[[nodiscard]] SeriesFile read_series_csv(const std::filesystem::path& path);

/// Writes `t,y` (or `t,y,mask`) with LF endings and round-trip precision.
void write_series_csv(std::ostream& out, const TimeSeries& series,
                      const std::vector<bool>* mask = nullptr);
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const std::vector<bool>* mask = nullptr);

/// Shortest decimal text that parses back to the same double; "nan",
/// "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_number(double value);

/// Strict decimal parse of the whole field; throws InvalidInput.
[[nodiscard]] double parse_number(std::string_view field);

}  // namespace cascade_kde
