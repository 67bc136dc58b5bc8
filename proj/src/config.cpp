#include "crmcast/config.hpp"

#include <functional>
#include <istream>
#include <map>
#include <ostream>

#include "crmcast/csv.hpp"

namespace crmcast {

namespace {

using Setter = std::function<void(Config&, const std::string&)>;
using Getter = std::function<std::string(const Config&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;
};

template <typename F>
std::string join(const std::vector<F>& items, auto fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + fmt(items[i]);
  return out;
}

Key real(std::string name, double ScenarioParams::*field) {
  return {std::move(name),
          [field](Config& c, const std::string& v) { c.scenario.*field = parse_double(v); },
          [field](const Config& c) { return format_double(c.scenario.*field); }};
}

Key count(std::string name, int ScenarioParams::*field) {
  return {std::move(name),
          [field](Config& c, const std::string& v) { c.scenario.*field = static_cast<int>(parse_int(v)); },
          [field](const Config& c) { return std::to_string(c.scenario.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      count("n_nodes", &ScenarioParams::n_nodes),
      count("n_dest", &ScenarioParams::n_dest),
      count("M", &ScenarioParams::channels),
      real("bw", &ScenarioParams::bw),
      real("packet_bits", &ScenarioParams::packet_bits),
      real("pt", &ScenarioParams::pt),
      real("p_idle", &ScenarioParams::p_idle),
      real("mu_min", &ScenarioParams::mu_min),
      real("mu_max", &ScenarioParams::mu_max),
      real("area_side", &ScenarioParams::area_side),
      real("comm_range", &ScenarioParams::comm_range),
      real("carrier_freq", &ScenarioParams::carrier_freq),
      real("path_loss_exp", &ScenarioParams::path_loss_exp),
      real("noise_psd", &ScenarioParams::noise_psd),
      {"schemes",
       [](Config& c, const std::string& v) {
         c.schemes.clear();
         for (const auto& s : split_list(v)) c.schemes.push_back(parse_scheme(s));
       },
       [](const Config& c) { return join(c.schemes, [](Scheme s) { return to_string(s); }); }},
      {"trees",
       [](Config& c, const std::string& v) {
         c.trees.clear();
         for (const auto& s : split_list(v)) c.trees.push_back(parse_tree_kind(s));
       },
       [](const Config& c) { return join(c.trees, [](TreeKind t) { return to_string(t); }); }},
      {"variable", [](Config& c, const std::string& v) { c.variable = parse_sweep_variable(v); },
       [](const Config& c) { return to_string(c.variable); }},
      {"values",
       [](Config& c, const std::string& v) {
         c.values.clear();
         for (const auto& s : split_list(v)) c.values.push_back(parse_double(s));
       },
       [](const Config& c) { return join(c.values, [](double x) { return format_double(x); }); }},
      {"trials", [](Config& c, const std::string& v) { c.trials = static_cast<int>(parse_int(v)); },
       [](const Config& c) { return std::to_string(c.trials); }},
      {"seed",
       [](Config& c, const std::string& v) {
         const auto s = parse_int(v);
         if (s < 0) throw std::invalid_argument("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       },
       [](const Config& c) { return std::to_string(c.seed); }},
      {"out", [](Config& c, const std::string& v) { c.out_dir = v; },
       [](const Config& c) { return c.out_dir; }},
      {"threads", [](Config& c, const std::string& v) { c.threads = static_cast<int>(parse_int(v)); },
       [](const Config& c) { return std::to_string(c.threads); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void apply_setting(Config& config, const std::string& key, const std::string& value) {
  const std::string name = key == "channels" ? "M" : key;
  for (const auto& k : keys()) {
    if (k.name != name) continue;
    try {
      k.set(config, std::string(trim(value)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, "invalid value for '" + key + "': " + e.what());
    }
    return;
  }
  throw ConfigError(key, "unknown config key '" + key + "'");
}

void read_config(std::istream& in, Config& config, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError("", where + "expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    try {
      apply_setting(config, key, std::string(text.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), where + e.what());
    }
  }
}

void write_config(std::ostream& out, const Config& config) {
  for (const auto& k : keys()) out << k.name << " = " << k.get(config) << '\n';
}

SweepSpec to_sweep_spec(const Config& config) {
  SweepSpec spec;
  spec.base = config.scenario;
  spec.variable = config.variable;
  spec.values = config.values;
  spec.trials = config.trials;
  spec.seed = config.seed;
  spec.schemes = config.schemes;
  spec.trees = config.trees;
  spec.threads = config.threads;
  return spec;
}

}  // namespace crmcast
