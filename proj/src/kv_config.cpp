#include "mixlap/kv_config.hpp"

#include "mixlap/errors.hpp"

#include <fstream>
#include <set>

namespace mixlap::config {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::vector<Entry> parse_kv(std::istream& in, const std::string& source) {
    std::vector<Entry> out;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw.substr(0, raw.find('#')));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        const std::string where = source + ":" + std::to_string(line);
        if (eq == std::string::npos) {
            throw DomainError(where + ": expected 'key = value'");
        }
        Entry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
        if (e.key.empty()) throw DomainError(where + ": empty key");
        if (!seen.insert(e.key).second) throw DomainError(where + ": repeated key '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Entry> read_kv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file " + path.string());
    return parse_kv(in, path.string());
}

std::vector<std::string> merge_config_args(const std::vector<Entry>& entries,
                                           const std::vector<std::string>& cli_args) {
    std::set<std::string> given;
    for (const auto& arg : cli_args) {
        if (arg.rfind("--", 0) != 0) continue;
        given.insert(arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos
                                                                       : arg.find('=') - 2));
    }
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (!given.count(e.key)) out.push_back("--" + e.key + "=" + e.value);
    }
    out.insert(out.end(), cli_args.begin(), cli_args.end());
    return out;
}

} // namespace mixlap::config
