#include "output.hpp"

#include <natanzon/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace natanzon::cli {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    return *this;
}

CsvTable& CsvTable::add(double x) {
    rows_.back().push_back(format_number(x));
    return *this;
}

CsvTable& CsvTable::add(long long x) {
    rows_.back().push_back(std::to_string(x));
    return *this;
}

CsvTable& CsvTable::add(std::string_view text) {
    std::string cell(text);
    if (cell.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : cell) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        cell = quoted + "\"";
    }
    rows_.back().push_back(std::move(cell));
    return *this;
}

CsvTable& CsvTable::empty() {
    rows_.back().emplace_back();
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place: '" + path.string() + "'");
    }
}

}  // namespace natanzon::cli
