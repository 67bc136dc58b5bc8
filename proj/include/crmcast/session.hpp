#pragma once

// One multicast session over a pruned, layered tree.
//
// Each schedule entry is a transmitter event: the transmitter announces to
// its children (MA), collects per-channel POS (ACK), picks one unified
// channel and sends once. A receiver gets the packet when the chosen
// channel stays idle for its airtime on that channel. A destination is
// delivered when every hop on its root path succeeded, and its throughput
// is D over the summed airtime of those hops.

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "crmcast/assignment.hpp"
#include "crmcast/channel.hpp"
#include "crmcast/phy.hpp"
#include "crmcast/topology.hpp"

namespace crmcast {

struct SessionConfig {
  PhyParams phy;
  Scheme scheme = Scheme::Pos;
  TreeKind tree_kind = TreeKind::Spt;
  std::set<NodeId> destinations;
};

struct HopRecord {
  NodeId transmitter = 0;
  std::vector<NodeId> receivers;
  std::optional<int> chosen_channel;
  std::vector<double> tx_time;         // per receiver, on the chosen channel
  std::vector<bool> success;           // per receiver
  std::vector<double> available_time;  // per receiver, residual idle time of the chosen channel
  bool skipped = false;                // transmitter never received the packet
};

enum class ControlKind { Ma, Ack };

struct ControlMessage {
  ControlKind kind = ControlKind::Ma;
  NodeId from = 0;
  NodeId to = 0;

  bool operator==(const ControlMessage&) const = default;
};

struct SessionResult {
  std::map<NodeId, bool> delivered;
  std::map<NodeId, double> throughput;  // bits/s, 0 when not delivered
  double total_throughput = 0.0;
  double avg_throughput = 0.0;  // total / |destinations|
  double pdr = 0.0;
  std::vector<HopRecord> hops;
  std::vector<ControlMessage> control_trace;

  int delivered_count() const;
};

/// `dest,delivered,throughput_bps` rows followed by `summary,<pdr>,<total_bps>`.
void write_session_csv(std::ostream& out, const SessionResult& result);

/// Random quantities of one transmitter event: the channel state and one
/// Rayleigh gain per (receiver, channel). Every cell is drawn; busy cells
/// are stored as 0.
struct EventDraws {
  EventState state;
  Eigen::MatrixXd gain;
};

/// Draws every schedule entry up front, in schedule order. Entries whose
/// transmitter is later skipped simply leave their draws unused, so
/// sessions that differ only in channel choice see identical randomness.
std::vector<EventDraws> sample_event_draws(const LayerSchedule& schedule, const ChannelModel& model,
                                           Rng& rng);

LinkMetrics compute_link_metrics(const Tree& tree, const LayerEntry& entry, const PhyParams& phy,
                                 const ChannelModel& model, const EventDraws& draws);

/// Replays a session against pre-sampled draws. `selection_rng` is only
/// consumed by the RS scheme. Throws std::invalid_argument when the tree is
/// not pruned to cfg.destinations or draws do not match the schedule.
SessionResult run_session(const Tree& tree, const LayerSchedule& schedule, const SessionConfig& cfg,
                          const ChannelModel& model, const std::vector<EventDraws>& draws,
                          Rng& selection_rng);

/// Samples draws from `rng` and then runs the session with the same rng.
SessionResult run_session(const Tree& tree, const SessionConfig& cfg, const ChannelModel& model,
                          Rng& rng);

/// Hand-supplied metrics for one schedule entry. Rows follow `receivers`,
/// columns are channels. `available_time` is per receiver.
struct InjectedLayer {
  NodeId transmitter = 0;
  std::vector<NodeId> receivers;
  std::vector<bool> idle;
  Eigen::MatrixXd pos;
  Eigen::MatrixXd tx_time;
  std::vector<double> available_time;
};

struct InjectedSession {
  Tree tree;  // may be unpruned; it is pruned to `destinations` first
  std::set<NodeId> destinations;
  std::vector<double> mu_idle;
  double packet_bits = 0.0;
  std::vector<InjectedLayer> layers;  // one per schedule entry, matched by transmitter
};

/// Test seam: bypasses sampling and applies selection, success judgement
/// and accounting to the supplied tables. Channel selection is made for
/// every layer, including transmitters that did not receive the packet;
/// their receivers still count as undelivered. Throws
/// std::invalid_argument on empty or inconsistent tables.
SessionResult inject_metrics_session(const InjectedSession& session, Scheme scheme, Rng& rng);
SessionResult inject_metrics_session(const InjectedSession& session);

}  // namespace crmcast
