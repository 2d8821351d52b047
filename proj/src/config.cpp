#include "memsim/config.hpp"
#include "memsim/numfmt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace memsim {

namespace {

std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(std::string_view text, const std::string& origin) {
    Config cfg;
    std::string current;
    size_t lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++lineno;

        size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + fmt_int((long long)lineno) + ": malformed section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (current.empty())
                throw ConfigError(origin + ":" + fmt_int((long long)lineno) + ": empty section name");
            cfg.sections_[current];
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + fmt_int((long long)lineno) + ": expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError(origin + ":" + fmt_int((long long)lineno) + ": empty key");
        if (current.empty())
            throw ConfigError(origin + ":" + fmt_int((long long)lineno) + ": key '" + key + "' outside any section");
        auto& sec = cfg.sections_[current];
        if (sec.count(key))
            throw ConfigError(origin + ":" + fmt_int((long long)lineno) + ": duplicate key '" + key + "' in [" + current + "]");
        sec[key] = value;
    }
    return cfg;
}

const Config::Section* Config::find_section(const std::string& name) const {
    auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
}

bool Config::has_key(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    return s && s->count(key);
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    const Section* s = find_section(section);
    if (!s) return fallback;
    auto it = s->find(key);
    if (it == s->end()) return fallback;
    double v;
    if (!parse_double(it->second, v))
        throw ConfigError("key '" + key + "' in [" + section + "]: not a number: '" + it->second + "'");
    return v;
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
    const Section* s = find_section(section);
    if (!s) return fallback;
    auto it = s->find(key);
    if (it == s->end()) return fallback;
    long long v;
    if (!parse_int(it->second, v))
        throw ConfigError("key '" + key + "' in [" + section + "]: not an integer: '" + it->second + "'");
    return v;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    const Section* s = find_section(section);
    if (!s) return fallback;
    auto it = s->find(key);
    return it == s->end() ? fallback : it->second;
}

void Config::require_known_keys(const std::string& section, const std::vector<std::string>& allowed) const {
    const Section* s = find_section(section);
    if (!s) return;
    for (const auto& [key, value] : *s) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

std::vector<std::string> Config::section_names() const {
    std::vector<std::string> names;
    names.reserve(sections_.size());
    for (const auto& [name, sec] : sections_) names.push_back(name);
    return names;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t next = text.find(sep, pos);
        std::string_view tok = text.substr(pos, next == std::string_view::npos ? text.size() - pos : next - pos);
        tok = trim(tok);
        if (!tok.empty()) out.emplace_back(tok);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

} // namespace memsim
