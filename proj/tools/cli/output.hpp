#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace natanzon::cli {

/// Shortest text for a double with 17 significant digits ("%.17g"), locale
/// independent. Non-finite values become "nan", "inf" or "-inf".
std::string format_number(double x);

/// Comma-separated table with a header row and LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    /// Starts a new row; cells are appended with add().
    CsvTable& row();
    CsvTable& add(double x);
    CsvTable& add(long long x);
    CsvTable& add(int x) { return add(static_cast<long long>(x)); }
    CsvTable& add(std::string_view text);
    CsvTable& empty();

    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to `path` through a temporary sibling and a rename, so
/// readers never observe a partial file. Creates parent directories.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace natanzon::cli
