#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlskam::cli
{

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, numerical_error = 3, io_error = 4 };

struct Streams {
    std::ostream &out;
    std::ostream &err;
};

int cmd_validate(const std::string &config, Streams io);
int cmd_kam_run(const std::string &config, const std::optional<std::string> &out_dir, Streams io);
int cmd_measure(const std::string &config, const std::optional<std::string> &out_dir, Streams io);

struct SynthArgs {
    std::string run_dir;
    std::optional<double> t0, t1;
    std::optional<int> nt, nx;
    std::optional<std::string> out_dir;
};
int cmd_synthesize(const SynthArgs &args, Streams io);

int cmd_report(const std::vector<std::string> &inputs, const std::optional<std::string> &out_dir, Streams io);

// Parsed CSV body (header plus rows); the checksum line is verified and dropped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string &name) const;
};
CsvTable read_csv(const std::string &path);

} // namespace nlskam::cli
