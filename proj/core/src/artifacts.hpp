// Artifact plumbing shared by the experiment runners. Not installed.
#ifndef OTFSPRONY_SRC_ARTIFACTS_HPP
#define OTFSPRONY_SRC_ARTIFACTS_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace otfsprony::detail
{

/// Shortest representation that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

using Cell = std::variant<double, long long, std::string>;

/// Row-oriented table rendered as CSV (header row, full precision) or as a
/// JSON array of objects keyed by column name (non-finite numbers -> null).
struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    /// \throws InvalidArgument when the row width differs from the header.
    void add(std::vector<Cell> row);

    std::string to_csv() const;
    std::string to_json() const;
};

/// Writes `content` to `dir / relative`, creating parent directories.
/// \throws IoError naming the path on failure.
void write_file(const std::filesystem::path& dir,
                const std::filesystem::path& relative,
                std::string_view content);

///
/// Runs fn(0) .. fn(count - 1) on up to `threads` workers and joins. The
/// first exception thrown by any task is rethrown after the join.
///
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

} // namespace otfsprony::detail

#endif
