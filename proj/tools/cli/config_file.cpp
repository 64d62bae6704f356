#include "cli/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ratiomarket::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": no value given for '" + key + "'");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

KeyValues load_config(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    if (path.extension() != ".json") return parse_key_values(text, path.string());

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!manifest.contains("config") || !manifest["config"].is_object()) {
        throw ConfigError("manifest '" + path.string() + "' has no \"config\" object");
    }
    KeyValues out;
    for (const auto& [key, value] : manifest["config"].items()) {
        out.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return out;
}

std::vector<std::string> to_arguments(const KeyValues& entries, const std::vector<std::string>& flag_keys) {
    std::vector<std::string> args;
    for (const auto& [key, value] : entries) {
        if (std::find(flag_keys.begin(), flag_keys.end(), key) != flag_keys.end()) {
            if (value == "true" || value == "1" || value == "yes") args.push_back("--" + key);
            continue;
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

std::string find_config_argument(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

}  // namespace ratiomarket::cli
