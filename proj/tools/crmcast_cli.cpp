// crmcast: multicast routing over multi-hop cognitive radio networks.
//
//   crmcast example [--fixture PATH] [--json]
//   crmcast run     [--config PATH] [--seed N] [--out DIR] [--scheme S]... [--tree T]... [--json]
//   crmcast sweep   [--config PATH] [--seed N] [--out DIR] [--trials N] [--scheme S]... [--tree T]...
//   crmcast plot    AGGREGATE_CSV [--out DIR]
//
// Exit codes: 0 success, 1 worked-example mismatch, 2 usage or config error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "crmcast/config.hpp"
#include "crmcast/csv.hpp"
#include "crmcast/experiment.hpp"
#include "crmcast/plot.hpp"
#include "crmcast/worked_example.hpp"

namespace fs = std::filesystem;
using namespace crmcast;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config_path;
  std::string fixture_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> trials;
  std::vector<std::string> schemes;
  std::vector<std::string> trees;
  std::vector<std::string> settings;
  bool json = false;
};

Config load_config(const Options& opt) {
  Config config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("--config", "cannot open config file " + opt.config_path);
    read_config(in, config, opt.config_path);
  }
  for (const auto& s : opt.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, "--set expects KEY=VALUE, got '" + s + "'");
    apply_setting(config, std::string(trim(s.substr(0, eq))), s.substr(eq + 1));
  }
  if (opt.seed) config.seed = *opt.seed;
  if (opt.out_dir) config.out_dir = *opt.out_dir;
  if (opt.trials) config.trials = *opt.trials;
  if (!opt.schemes.empty()) {
    config.schemes.clear();
    for (const auto& s : opt.schemes) config.schemes.push_back(parse_scheme(s));
  }
  if (!opt.trees.empty()) {
    config.trees.clear();
    for (const auto& t : opt.trees) config.trees.push_back(parse_tree_kind(t));
  }
  return config;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

int cmd_example(const Options& opt) {
  std::string text = builtin_worked_example();
  if (!opt.fixture_path.empty()) {
    std::ifstream in(opt.fixture_path);
    if (!in) {
      std::cerr << "error: cannot open fixture " << opt.fixture_path << '\n';
      return kUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  ExampleReport report;
  try {
    report = run_worked_example(parse_worked_example(nlohmann::json::parse(text)));
  } catch (const std::exception& e) {
    // A fixture that no longer describes a runnable session is a mismatch too.
    std::cerr << "worked example failed: " << e.what() << '\n';
    return kMismatch;
  }
  if (opt.json) std::cout << to_json(report).dump(2) << '\n';
  else print_report(std::cout, report);
  return report.ok() ? kOk : kMismatch;
}

int cmd_run(const Options& opt) {
  const auto config = load_config(opt);
  config.scenario.validate();
  const auto trial = prepare_trial(config.scenario, config.trees, config.seed);
  const auto runs = run_prepared_sessions(trial, config.scenario, config.schemes);

  fs::create_directories(config.out_dir);
  nlohmann::json doc;
  doc["seed"] = config.seed;
  doc["destinations"] = trial.destinations;
  for (const auto& run : runs) {
    const auto name = to_string(run.tree) + "_" + to_string(run.scheme);
    std::ofstream csv(fs::path(config.out_dir) / ("session_" + name + ".csv"));
    write_session_csv(csv, run.result);

    if (opt.json) {
      nlohmann::json s;
      s["tree"] = to_string(run.tree);
      s["scheme"] = to_string(run.scheme);
      s["avg_throughput_bps"] = run.result.avg_throughput;
      s["total_throughput_bps"] = run.result.total_throughput;
      s["pdr"] = run.result.pdr;
      for (const auto& [d, ok] : run.result.delivered)
        s["destinations"].push_back({{"node", d}, {"delivered", ok}, {"throughput_bps", run.result.throughput.at(d)}});
      for (const auto& hop : run.result.hops)
        s["hops"].push_back({{"transmitter", hop.transmitter},
                             {"receivers", hop.receivers},
                             {"channel", hop.chosen_channel ? *hop.chosen_channel + 1 : 0},
                             {"success", hop.success},
                             {"skipped", hop.skipped}});
      doc["sessions"].push_back(std::move(s));
      continue;
    }

    std::cout << upper(to_string(run.tree)) << " / " << upper(to_string(run.scheme)) << '\n';
    for (const auto& hop : run.result.hops) {
      std::cout << "  node " << std::setw(3) << hop.transmitter << " -> ";
      if (hop.skipped) std::cout << "skipped (did not receive)";
      else if (!hop.chosen_channel) std::cout << "no idle channel";
      else std::cout << "CH" << *hop.chosen_channel + 1;
      std::cout << "  [";
      for (std::size_t i = 0; i < hop.receivers.size(); ++i)
        std::cout << (i ? " " : "") << hop.receivers[i] << (hop.success[i] ? "" : "x");
      std::cout << "]\n";
    }
    std::cout << std::fixed << std::setprecision(4) << "  avg throughput " << run.result.avg_throughput / 1e6
              << " Mbps, PDR " << run.result.pdr << std::defaultfloat << "\n\n";
  }
  if (opt.json) std::cout << doc.dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const auto config = load_config(opt);
  const auto result = run_sweep(to_sweep_spec(config));

  fs::create_directories(config.out_dir);
  const auto trials_path = fs::path(config.out_dir) / "trials.csv";
  const auto aggregate_path = fs::path(config.out_dir) / "aggregate.csv";
  {
    std::ofstream out(trials_path);
    write_trials_csv(out, result);
    std::ofstream agg(aggregate_path);
    write_aggregate_csv(agg, result);
  }

  std::cout << "tree scheme " << to_string(result.variable) << "  throughput(Mbps) +-ci95   pdr +-ci95\n";
  for (const auto& a : result.aggregate)
    std::cout << std::left << std::setw(5) << to_string(a.tree) << std::setw(7) << to_string(a.scheme)
              << std::setw(10) << a.value << std::right << std::fixed << std::setprecision(4) << std::setw(10)
              << a.mean_throughput / 1e6 << " " << std::setw(8) << a.ci95_throughput / 1e6 << std::setw(9)
              << a.mean_pdr << " " << std::setw(7) << a.ci95_pdr << std::defaultfloat << '\n';
  std::cout << "wrote " << trials_path.string() << " and " << aggregate_path.string() << '\n';
  return kOk;
}

int cmd_plot(const Options& opt) {
  std::ifstream in(opt.csv_path);
  if (!in) throw ConfigError("csv", "cannot open " + opt.csv_path);
  const auto [variable, rows] = read_aggregate_csv(in);
  const auto out_dir = opt.out_dir.value_or(fs::path(opt.csv_path).parent_path().string());
  for (const auto& path : plot_aggregate(rows, variable, out_dir.empty() ? "." : out_dir))
    std::cout << "wrote " << path.string() << '\n';
  return kOk;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "base seed");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--scheme", opt.schemes, "pos|masa|mdr|rs (repeatable)");
  cmd->add_option("--tree", opt.trees, "spt|mst (repeatable)");
  cmd->add_option("--set", opt.settings, "KEY=VALUE config override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicast routing over multi-hop cognitive radio networks"};
  app.require_subcommand(1);
  Options opt;

  auto* example = app.add_subcommand("example", "replay the 15-node worked example and check it");
  example->add_option("--fixture", opt.fixture_path, "JSON fixture replacing the built-in tables");
  example->add_flag("--json", opt.json, "machine-readable output");

  auto* run = app.add_subcommand("run", "run one scenario and report every session");
  add_common(run, opt);
  run->add_flag("--json", opt.json, "machine-readable output");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep; writes trials.csv and aggregate.csv");
  add_common(sweep, opt);
  sweep->add_option("--trials", opt.trials, "paired trials per swept value");

  auto* plot = app.add_subcommand("plot", "render aggregate.csv as SVG charts");
  plot->add_option("csv", opt.csv_path, "aggregate CSV written by sweep")->required();
  plot->add_option("--out", opt.out_dir, "output directory (default: next to the CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*example) return cmd_example(opt);
    if (*run) return cmd_run(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*plot) return cmd_plot(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
