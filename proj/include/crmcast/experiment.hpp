#pragma once

// Monte Carlo harness. One trial draws a topology and destination set, builds
// each requested tree once, pre-samples every transmitter event, then replays
// the session once per scheme against those same draws (common random
// numbers). Trial i of a sweep uses seed + i at every swept value.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crmcast/assignment.hpp"
#include "crmcast/channel.hpp"
#include "crmcast/phy.hpp"
#include "crmcast/session.hpp"
#include "crmcast/topology.hpp"

namespace crmcast {

struct ScenarioParams {
  int n_nodes = 40;
  int n_dest = 16;
  int channels = 20;
  double bw = 1e6;                           // Hz
  double packet_bits = 4 * kBitsPerKilobyte;
  double pt = 0.1;                           // W
  double p_idle = 0.9;
  double mu_min = 0.002;                     // s
  double mu_max = 0.070;                     // s
  double area_side = 200.0;                  // m
  double comm_range = 60.0;                  // m
  double carrier_freq = 600e6;               // Hz
  double path_loss_exp = 4.0;
  double noise_psd = 1e-18;                  // W/Hz
  /// Test override for the channel idle flags (see ChannelModel).
  std::optional<std::vector<bool>> forced_idle;

  void validate() const;
  PhyParams phy() const;
  ChannelModel channel_model() const;
};

struct PreparedTree {
  TreeKind kind = TreeKind::Spt;
  Tree tree;  // pruned to the destinations
  LayerSchedule schedule;
  std::vector<EventDraws> draws;
};

/// Everything random about a trial except RS's channel picks.
struct PreparedTrial {
  std::uint64_t seed = 0;
  Topology topology;
  std::set<NodeId> destinations;
  std::vector<PreparedTree> trees;
};

PreparedTrial prepare_trial(const ScenarioParams& params, const std::vector<TreeKind>& trees,
                            std::uint64_t seed);

struct TrialOutcome {
  TreeKind tree = TreeKind::Spt;
  Scheme scheme = Scheme::Pos;
  double avg_throughput = 0.0;
  double pdr = 0.0;
};

struct SessionRun {
  TreeKind tree = TreeKind::Spt;
  Scheme scheme = Scheme::Pos;
  SessionResult result;
};

/// Full session results per (tree, scheme), trees outermost.
std::vector<SessionRun> run_prepared_sessions(const PreparedTrial& trial, const ScenarioParams& params,
                                              const std::vector<Scheme>& schemes);

/// One outcome per (tree, scheme), trees outermost, in the order given.
std::vector<TrialOutcome> run_prepared(const PreparedTrial& trial, const ScenarioParams& params,
                                       const std::vector<Scheme>& schemes);

std::vector<TrialOutcome> run_trial(const ScenarioParams& params, const std::vector<Scheme>& schemes,
                                    const std::vector<TreeKind>& trees, std::uint64_t seed);

enum class SweepVariable { Bw, PacketBits, Channels, Pt, PIdle, NDest, NNodes };

std::string to_string(SweepVariable variable);
/// Throws std::invalid_argument for an unknown name.
SweepVariable parse_sweep_variable(const std::string& name);

/// Copy of `base` with `variable` set to `value`. Count variables must be
/// integral.
ScenarioParams with_value(const ScenarioParams& base, SweepVariable variable, double value);

struct SweepSpec {
  ScenarioParams base;
  SweepVariable variable = SweepVariable::PIdle;
  std::vector<double> values;
  int trials = 1000;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<TreeKind> trees{TreeKind::Spt};
  int threads = 1;

  void validate() const;
};

struct TrialRow {
  TreeKind tree;
  Scheme scheme;
  double value;
  int trial;
  double avg_throughput;
  double pdr;
};

struct AggregateRow {
  TreeKind tree;
  Scheme scheme;
  double value;
  double mean_throughput;
  double ci95_throughput;
  double mean_pdr;
  double ci95_pdr;
  int trials;
};

struct SweepResult {
  SweepVariable variable;
  std::vector<TrialRow> rows;         // ordered by value, trial, tree, scheme
  std::vector<AggregateRow> aggregate;  // ordered by tree, scheme, value

  const AggregateRow& at(TreeKind tree, Scheme scheme, double value) const;
};

SweepResult run_sweep(const SweepSpec& spec);

/// Mean and normal-approximation 95% half-width; 0 half-width for one sample.
std::pair<double, double> mean_ci95(const std::vector<double>& samples);

/// Aggregates per-trial rows, grouping by (tree, scheme, value).
std::vector<AggregateRow> aggregate_rows(const std::vector<TrialRow>& rows);

void write_trials_csv(std::ostream& out, const SweepResult& result);
void write_aggregate_csv(std::ostream& out, const SweepResult& result);

/// Parses a file written by write_trials_csv. Throws ParseError.
std::pair<SweepVariable, std::vector<TrialRow>> read_trials_csv(std::istream& in);
/// Parses a file written by write_aggregate_csv. Throws ParseError.
std::pair<SweepVariable, std::vector<AggregateRow>> read_aggregate_csv(std::istream& in);

}  // namespace crmcast
