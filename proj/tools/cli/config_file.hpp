#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ratiomarket::cli {

/// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Read `key = value` lines; `#` starts a comment. A `.json` path is read as
/// a run manifest and its "config" object is returned instead, so a run can
/// be repeated from its manifest alone.
[[nodiscard]] KeyValues load_config(const std::filesystem::path& path);

/// Parse the text of a key-value file. `origin` names the source in errors.
[[nodiscard]] KeyValues parse_key_values(const std::string& text, const std::string& origin);

/// Turn config entries into command-line tokens. Entries whose key is in
/// `flag_keys` become a bare `--key` when true and are dropped when false.
[[nodiscard]] std::vector<std::string> to_arguments(const KeyValues& entries, const std::vector<std::string>& flag_keys);

/// Value of `--config PATH` or `--config=PATH` in raw arguments, if present.
[[nodiscard]] std::string find_config_argument(const std::vector<std::string>& args);

}  // namespace ratiomarket::cli
