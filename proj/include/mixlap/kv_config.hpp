#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace mixlap::config {

/// One `key = value` line. `#` starts a comment; blank lines are skipped.
struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Throws DomainError naming `source` and the line for a line without `=`, an empty key
/// or a repeated key.
std::vector<Entry> parse_kv(std::istream& in, const std::string& source = "<config>");
std::vector<Entry> read_kv_file(const std::filesystem::path& path);

/// Config entries as `--key=value` tokens, skipping keys that `cli_args` already sets
/// (as `--key` or `--key=...`), followed by `cli_args` unchanged.
std::vector<std::string> merge_config_args(const std::vector<Entry>& entries,
                                           const std::vector<std::string>& cli_args);

} // namespace mixlap::config
