#include <nlskam/csv.hpp>
#include <nlskam/errors.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nlskam
{

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace
{

void check_cell(const std::string &c)
{
    if (c.find_first_of(",\n\r") != std::string::npos) {
        throw std::invalid_argument("csv cell contains a separator: " + c);
    }
}

constexpr std::string_view checksum_prefix = "# checksum fnv1a64=";

} // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size())
{
    if (header.empty()) {
        throw std::invalid_argument("csv header is empty");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        check_cell(header[i]);
        body_ += (i ? "," : "") + header[i];
    }
    body_ += '\n';
}

void CsvWriter::row(const std::vector<std::string> &cells)
{
    if (cells.size() != width_) {
        throw std::invalid_argument(fmt::format("csv row has {} cells, header has {}", cells.size(), width_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        check_cell(cells[i]);
        body_ += (i ? "," : "") + cells[i];
    }
    body_ += '\n';
    ++rows_;
}

std::string CsvWriter::str() const
{
    return body_ + fmt::format("{}{:016x}\n", checksum_prefix, fnv1a64(body_));
}

void CsvWriter::write(const std::filesystem::path &path) const
{
    write_text_file(path, str());
}

bool verify_checksum(std::string_view text)
{
    if (text.empty() || text.back() != '\n') {
        return false;
    }
    const auto start = text.rfind('\n', text.size() - 2);
    const std::size_t line_begin = start == std::string_view::npos ? 0 : start + 1;
    const std::string_view last = text.substr(line_begin, text.size() - 1 - line_begin);
    if (last.substr(0, checksum_prefix.size()) != checksum_prefix) {
        return false;
    }
    return fmt::format("{:016x}", fnv1a64(text.substr(0, line_begin))) == last.substr(checksum_prefix.size());
}

void write_text_file(const std::filesystem::path &path, std::string_view text)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
        }
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError(fmt::format("cannot rename {} to {}: {}", tmp.string(), path.string(), ec.message()));
    }
}

std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace nlskam
