#include "crmcast/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "crmcast/csv.hpp"

namespace crmcast {

void ScenarioParams::validate() const {
  if (n_nodes < 2) throw std::invalid_argument("n_nodes must be at least 2");
  if (n_dest < 1 || n_dest >= n_nodes) throw std::invalid_argument("n_dest must satisfy 1 <= n_dest < n_nodes");
  if (channels < 1) throw std::invalid_argument("channels must be at least 1");
  if (!(p_idle > 0.0) || !(p_idle < 1.0)) throw std::invalid_argument("p_idle must lie in (0, 1)");
  if (!(mu_min > 0.0) || !(mu_max >= mu_min)) throw std::invalid_argument("need 0 < mu_min <= mu_max");
  if (!(area_side > 0.0) || !(comm_range > 0.0))
    throw std::invalid_argument("area_side and comm_range must be positive");
  if (!(carrier_freq > 0.0)) throw std::invalid_argument("carrier_freq must be positive");
  if (forced_idle && static_cast<int>(forced_idle->size()) != channels)
    throw std::invalid_argument("forced idle mask must have one flag per channel");
  phy().validate();
}

PhyParams ScenarioParams::phy() const {
  PhyParams p;
  p.pt = pt;
  p.path_loss_exp = path_loss_exp;
  p.wavelength = wavelength_for(carrier_freq);
  p.noise_psd = noise_psd;
  p.bandwidth = bw;
  p.packet_bits = packet_bits;
  return p;
}

ChannelModel ScenarioParams::channel_model() const {
  auto model = make_channels(channels, mu_min, mu_max, p_idle);
  model.forced_idle = forced_idle;
  return model;
}

namespace {

// Independent stream per (trial seed, purpose).
Rng stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
  return Rng(seq);
}

constexpr std::uint32_t kTopologyStream = 0;
constexpr std::uint32_t kDrawStream = 1;        // + tree kind
constexpr std::uint32_t kSelectionStream = 16;  // + tree kind

std::uint32_t kind_index(TreeKind kind) { return kind == TreeKind::Spt ? 0 : 1; }

}  // namespace

PreparedTrial prepare_trial(const ScenarioParams& params, const std::vector<TreeKind>& trees,
                            std::uint64_t seed) {
  PreparedTrial trial;
  trial.seed = seed;
  auto rng = stream(seed, kTopologyStream);
  trial.topology = generate_topology(params.n_nodes, params.area_side, params.comm_range, rng);
  constexpr NodeId source = 0;
  trial.destinations = sample_destinations(params.n_nodes, params.n_dest, source, rng);

  const auto model = params.channel_model();
  for (TreeKind kind : trees) {
    PreparedTree prepared;
    prepared.kind = kind;
    prepared.tree = prune_tree(build_tree(kind, trial.topology, source), trial.destinations);
    prepared.schedule = layerize(prepared.tree);
    auto draw_rng = stream(seed, kDrawStream + kind_index(kind));
    prepared.draws = sample_event_draws(prepared.schedule, model, draw_rng);
    trial.trees.push_back(std::move(prepared));
  }
  return trial;
}

std::vector<SessionRun> run_prepared_sessions(const PreparedTrial& trial, const ScenarioParams& params,
                                              const std::vector<Scheme>& schemes) {
  const auto model = params.channel_model();
  std::vector<SessionRun> out;
  for (const auto& prepared : trial.trees) {
    SessionConfig cfg;
    cfg.phy = params.phy();
    cfg.tree_kind = prepared.kind;
    cfg.destinations = trial.destinations;
    for (Scheme scheme : schemes) {
      cfg.scheme = scheme;
      auto selection_rng = stream(trial.seed, kSelectionStream + kind_index(prepared.kind));
      out.push_back({prepared.kind, scheme,
                     run_session(prepared.tree, prepared.schedule, cfg, model, prepared.draws, selection_rng)});
    }
  }
  return out;
}

std::vector<TrialOutcome> run_prepared(const PreparedTrial& trial, const ScenarioParams& params,
                                       const std::vector<Scheme>& schemes) {
  std::vector<TrialOutcome> out;
  for (const auto& run : run_prepared_sessions(trial, params, schemes))
    out.push_back({run.tree, run.scheme, run.result.avg_throughput, run.result.pdr});
  return out;
}

std::vector<TrialOutcome> run_trial(const ScenarioParams& params, const std::vector<Scheme>& schemes,
                                    const std::vector<TreeKind>& trees, std::uint64_t seed) {
  params.validate();
  return run_prepared(prepare_trial(params, trees, seed), params, schemes);
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

struct VariableName {
  SweepVariable variable;
  const char* name;
};

constexpr VariableName kVariableNames[] = {
    {SweepVariable::Bw, "bw"},          {SweepVariable::PacketBits, "packet_bits"},
    {SweepVariable::Channels, "M"},     {SweepVariable::Pt, "pt"},
    {SweepVariable::PIdle, "p_idle"},   {SweepVariable::NDest, "n_dest"},
    {SweepVariable::NNodes, "n_nodes"},
};

int as_count(double value, const char* name) {
  if (value != std::floor(value) || value < 1 || value > 1e6)
    throw std::invalid_argument(std::string(name) + " values must be positive integers");
  return static_cast<int>(value);
}

}  // namespace

std::string to_string(SweepVariable variable) {
  for (const auto& v : kVariableNames)
    if (v.variable == variable) return v.name;
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  for (const auto& v : kVariableNames)
    if (name == v.name) return v.variable;
  if (name == "channels") return SweepVariable::Channels;
  throw std::invalid_argument("unknown sweep variable '" + name + "'");
}

ScenarioParams with_value(const ScenarioParams& base, SweepVariable variable, double value) {
  ScenarioParams p = base;
  switch (variable) {
    case SweepVariable::Bw: p.bw = value; break;
    case SweepVariable::PacketBits: p.packet_bits = value; break;
    case SweepVariable::Channels:
      p.channels = as_count(value, "M");
      if (p.forced_idle) p.forced_idle->resize(p.channels, false);
      break;
    case SweepVariable::Pt: p.pt = value; break;
    case SweepVariable::PIdle: p.p_idle = value; break;
    case SweepVariable::NDest: p.n_dest = as_count(value, "n_dest"); break;
    case SweepVariable::NNodes: p.n_nodes = as_count(value, "n_nodes"); break;
  }
  return p;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
  if (trees.empty()) throw std::invalid_argument("sweep needs at least one tree kind");
  for (double v : values) with_value(base, variable, v).validate();
}

const AggregateRow& SweepResult::at(TreeKind tree, Scheme scheme, double value) const {
  for (const auto& row : aggregate)
    if (row.tree == tree && row.scheme == scheme && row.value == value) return row;
  throw std::out_of_range("no aggregate row for " + to_string(tree) + "/" + to_string(scheme) + " at " +
                          format_double(value));
}

std::pair<double, double> mean_ci95(const std::vector<double>& samples) {
  if (samples.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  if (samples.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, 1.96 * std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<AggregateRow> aggregate_rows(const std::vector<TrialRow>& rows) {
  // Group keys keep the order in which each tree, scheme and value first appear.
  std::vector<TreeKind> trees;
  std::vector<Scheme> schemes;
  std::vector<double> values;
  auto note = [](auto& list, auto item) {
    if (std::find(list.begin(), list.end(), item) == list.end()) list.push_back(item);
  };
  std::map<std::tuple<int, int, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : rows) {
    note(trees, r.tree);
    note(schemes, r.scheme);
    note(values, r.value);
    auto& g = groups[{static_cast<int>(r.tree), static_cast<int>(r.scheme), r.value}];
    g.first.push_back(r.avg_throughput);
    g.second.push_back(r.pdr);
  }

  std::vector<AggregateRow> out;
  for (TreeKind t : trees)
    for (Scheme s : schemes)
      for (double v : values) {
        const auto it = groups.find({static_cast<int>(t), static_cast<int>(s), v});
        if (it == groups.end()) continue;
        const auto [mt, ct] = mean_ci95(it->second.first);
        const auto [mp, cp] = mean_ci95(it->second.second);
        out.push_back({t, s, v, mt, ct, mp, cp, static_cast<int>(it->second.first.size())});
      }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.variable = spec.variable;

  const auto per_trial = spec.schemes.size() * spec.trees.size();
  for (double value : spec.values) {
    const auto params = with_value(spec.base, spec.variable, value);
    std::vector<std::vector<TrialOutcome>> outcomes(spec.trials);

    auto work = [&](int begin, int end) {
      for (int i = begin; i < end; ++i)
        outcomes[i] = run_prepared(prepare_trial(params, spec.trees, spec.seed + i), params, spec.schemes);
    };
    const int threads = std::clamp(spec.threads, 1, spec.trials);
    if (threads == 1) {
      work(0, spec.trials);
    } else {
      std::vector<std::jthread> pool;
      const int chunk = (spec.trials + threads - 1) / threads;
      for (int t = 0; t < threads; ++t)
        pool.emplace_back(work, t * chunk, std::min(spec.trials, (t + 1) * chunk));
    }

    for (int i = 0; i < spec.trials; ++i) {
      if (outcomes[i].size() != per_trial) throw std::logic_error("trial produced wrong outcome count");
      for (const auto& o : outcomes[i])
        result.rows.push_back({o.tree, o.scheme, value, i, o.avg_throughput, o.pdr});
    }
  }
  result.aggregate = aggregate_rows(result.rows);
  return result;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr const char* kTrialsHeader = "tree,scheme,variable,value,trial,avg_throughput_bps,pdr";
constexpr const char* kAggregateHeader =
    "tree,scheme,variable,value,mean_throughput_bps,ci95_throughput,mean_pdr,ci95_pdr,trials";

template <typename Row, typename ParseRow>
std::pair<SweepVariable, std::vector<Row>> read_rows(std::istream& in, const char* header, std::size_t width,
                                                     const char* source, ParseRow parse_row) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
  ++lineno;
  if (trim(line) != header) throw ParseError(source, lineno, "unexpected header");

  std::optional<SweepVariable> variable;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != width)
      throw ParseError(source, lineno, "expected " + std::to_string(width) + " fields, got " +
                                           std::to_string(f.size()));
    try {
      const auto var = parse_sweep_variable(f[2]);
      if (variable && *variable != var) throw std::invalid_argument("mixed sweep variables");
      variable = var;
      rows.push_back(parse_row(f));
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  if (!variable) throw ParseError(source, lineno, "no data rows");
  return {*variable, std::move(rows)};
}

}  // namespace

void write_trials_csv(std::ostream& out, const SweepResult& result) {
  out << kTrialsHeader << '\n';
  const auto var = to_string(result.variable);
  for (const auto& r : result.rows)
    out << to_string(r.tree) << ',' << to_string(r.scheme) << ',' << var << ',' << format_double(r.value) << ','
        << r.trial << ',' << format_double(r.avg_throughput) << ',' << format_double(r.pdr) << '\n';
}

void write_aggregate_csv(std::ostream& out, const SweepResult& result) {
  out << kAggregateHeader << '\n';
  const auto var = to_string(result.variable);
  for (const auto& a : result.aggregate)
    out << to_string(a.tree) << ',' << to_string(a.scheme) << ',' << var << ',' << format_double(a.value) << ','
        << format_double(a.mean_throughput) << ',' << format_double(a.ci95_throughput) << ','
        << format_double(a.mean_pdr) << ',' << format_double(a.ci95_pdr) << ',' << a.trials << '\n';
}

std::pair<SweepVariable, std::vector<TrialRow>> read_trials_csv(std::istream& in) {
  return read_rows<TrialRow>(in, kTrialsHeader, 7, "trials csv", [](const std::vector<std::string>& f) {
    return TrialRow{parse_tree_kind(f[0]), parse_scheme(f[1]), parse_double(f[3]),
                    static_cast<int>(parse_int(f[4])), parse_double(f[5]), parse_double(f[6])};
  });
}

std::pair<SweepVariable, std::vector<AggregateRow>> read_aggregate_csv(std::istream& in) {
  return read_rows<AggregateRow>(in, kAggregateHeader, 9, "aggregate csv", [](const std::vector<std::string>& f) {
    return AggregateRow{parse_tree_kind(f[0]), parse_scheme(f[1]), parse_double(f[3]), parse_double(f[4]),
                        parse_double(f[5]),    parse_double(f[6]), parse_double(f[7]),
                        static_cast<int>(parse_int(f[8]))};
  });
}

}  // namespace crmcast
