// Plain-text run configuration: one "key = value" per line, '#' comments.
// Reserved keys: command, seed, output, format; everything else is a
// subcommand parameter kept as its decimal string.
#pragma once

#include "s2s/core.hpp"

#include <cstdint>
#include <map>
#include <sstream>
#include <string>

namespace s2s {

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> parameters;
    uint64_t seed = 0;
    std::string output;
    std::string format = "json";

    bool operator==(const RunConfig&) const = default;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string to_text(const RunConfig& c) {
    std::ostringstream out;
    out << "command = " << c.command << '\n';
    out << "seed = " << c.seed << '\n';
    out << "format = " << c.format << '\n';
    if (!c.output.empty()) out << "output = " << c.output << '\n';
    for (auto& [k, v] : c.parameters) out << k << " = " << v << '\n';
    return out.str();
}

inline RunConfig from_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    unsigned lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        if (key == "command") c.command = value;
        else if (key == "seed") {
            try {
                std::size_t used = 0;
                c.seed = std::stoull(value, &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ValidationError("config line " + std::to_string(lineno) + ": seed must be an integer");
            }
        } else if (key == "output") c.output = value;
        else if (key == "format") c.format = value;
        else c.parameters[key] = value;
    }
    return c;
}

}  // namespace s2s
