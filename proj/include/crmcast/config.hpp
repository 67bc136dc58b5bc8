#pragma once

// Flat `key = value` configuration for the command-line tool. Lines starting
// with '#' are comments. List values are comma or space separated.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "crmcast/experiment.hpp"

namespace crmcast {

struct Config {
  ScenarioParams scenario;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<TreeKind> trees{TreeKind::Spt};
  SweepVariable variable = SweepVariable::PIdle;
  std::vector<double> values{0.1, 0.5, 0.9};
  int trials = 1000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 1;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one key. Throws ConfigError naming the key when it is unknown or its
/// value does not parse.
void apply_setting(Config& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines into `config`. Throws ConfigError (with the
/// line number in the message) on unknown keys or malformed lines.
void read_config(std::istream& in, Config& config, const std::string& source = "config");

/// Writes every key with its current value; reading the output back yields
/// the same Config.
void write_config(std::ostream& out, const Config& config);

SweepSpec to_sweep_spec(const Config& config);

std::vector<std::string> split_list(const std::string& text);

}  // namespace crmcast
