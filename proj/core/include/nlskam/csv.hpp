#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nlskam
{

std::uint64_t fnv1a64(std::string_view bytes);

// Comma separated table with a header row. The rendered text ends with
// "# checksum fnv1a64=<16 hex digits>", the hash of every byte before it.
class CsvWriter
{
public:
    explicit CsvWriter(std::vector<std::string> header);

    // Cells are written verbatim; they must not contain commas or newlines.
    void row(const std::vector<std::string> &cells);
    std::size_t rows() const noexcept { return rows_; }

    std::string str() const;
    // Throws IoError.
    void write(const std::filesystem::path &path) const;

private:
    std::size_t width_;
    std::size_t rows_ = 0;
    std::string body_;
};

// True when text ends with a checksum line matching the bytes before it.
bool verify_checksum(std::string_view text);

// Atomically enough for our purposes: write to a sibling temp file, then rename.
void write_text_file(const std::filesystem::path &path, std::string_view text);
std::string read_text_file(const std::filesystem::path &path);

} // namespace nlskam
