#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memsim {

// Thrown for malformed or semantically invalid configuration. The message
// always names the offending key or section.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Sectioned key-value configuration:
//
//   [section]
//   key = value        # comment
//
// Section and key names are case-sensitive. Keys are unique per section.
class Config {
public:
    using Section = std::map<std::string, std::string>;

    static Config parse_file(const std::string& path);
    static Config parse_string(std::string_view text, const std::string& origin = "<string>");

    bool has_section(const std::string& name) const { return sections_.count(name) != 0; }
    const Section* find_section(const std::string& name) const;

    // Typed getters with defaults; throw ConfigError naming the key on a
    // malformed value.
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    bool has_key(const std::string& section, const std::string& key) const;

    // Rejects keys in `section` that are not in `allowed`; the error names
    // the first offending key.
    void require_known_keys(const std::string& section, const std::vector<std::string>& allowed) const;

    // Overrides a single key ("section.key" = value), creating the section
    // if needed. Used for CLI --set flags.
    void set(const std::string& section, const std::string& key, const std::string& value);

    std::vector<std::string> section_names() const;

private:
    std::map<std::string, Section> sections_;
};

// Splits "a,b,c" into trimmed tokens; empty tokens are dropped.
std::vector<std::string> split_list(std::string_view text, char sep = ',');

} // namespace memsim
