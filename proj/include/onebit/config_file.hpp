// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_CONFIG_FILE_HPP
#define ONEBIT_CONFIG_FILE_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onebit/config.hpp"
#include "onebit/errors.hpp"
#include "onebit/experiments.hpp"

namespace onebit {

/// A rejected key or value, with where it came from.
class ConfigError : public InvalidArgument {
public:
  ConfigError(const std::string& source, int line, const std::string& key, const std::string& message);

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

private:
  std::string key_;
  int line_;
};

/// The config file could not be read.
class ConfigIoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ParsedConfig {
  SystemConfig cfg;
  SweepSpec sweep;  ///< sweep.base_cfg == cfg
};

/// Keys accepted in config files and overrides.
const std::vector<std::string>& config_keys();

/// Flat `key = value` text; `#` starts a comment; list values are comma separated.
/// Overrides (`key=value`) are applied after the text, in order.
ParsedConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                               const std::string& source = "<config>");

/// Reads `path` when given, otherwise starts from the defaults.
ParsedConfig parse_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides);

}  // namespace onebit

#endif
