#include "crmcast/session.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "crmcast/csv.hpp"

namespace crmcast {

int SessionResult::delivered_count() const {
  int count = 0;
  for (const auto& [_, ok] : delivered) count += ok ? 1 : 0;
  return count;
}

void write_session_csv(std::ostream& out, const SessionResult& result) {
  out << "dest,delivered,throughput_bps\n";
  for (const auto& [dest, ok] : result.delivered)
    out << dest << ',' << (ok ? 1 : 0) << ',' << format_double(result.throughput.at(dest)) << '\n';
  out << "summary," << format_double(result.pdr) << ',' << format_double(result.total_throughput)
      << '\n';
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pruned(const Tree& tree, const std::set<NodeId>& destinations) {
  if (destinations.empty()) throw std::invalid_argument("session: empty destination set");
  if (destinations.count(tree.root())) throw std::invalid_argument("session: root is a destination");
  for (NodeId d : destinations)
    if (!tree.contains(d))
      throw std::invalid_argument("session: destination " + std::to_string(d) + " not in tree");
  for (NodeId v : tree.nodes())
    if (v != tree.root() && tree.is_leaf(v) && !destinations.count(v))
      throw std::invalid_argument("session: tree is not pruned (leaf " + std::to_string(v) +
                                  " is not a destination)");
}

// Tracks which nodes hold the packet and the accumulated airtime to reach them.
class Accumulator {
 public:
  Accumulator(const Tree& tree, const std::set<NodeId>& destinations, double packet_bits)
      : destinations_(destinations), packet_bits_(packet_bits) {
    received_[tree.root()] = true;
    airtime_[tree.root()] = 0.0;
  }

  bool has_packet(NodeId v) const {
    const auto it = received_.find(v);
    return it != received_.end() && it->second;
  }

  void announce(const LayerEntry& entry) {
    for (NodeId r : entry.receivers) trace_.push_back({ControlKind::Ma, entry.transmitter, r});
    for (NodeId r : entry.receivers) trace_.push_back({ControlKind::Ack, r, entry.transmitter});
  }

  void record(HopRecord hop) {
    const bool upstream = has_packet(hop.transmitter);
    for (std::size_t i = 0; i < hop.receivers.size(); ++i) {
      const NodeId r = hop.receivers[i];
      received_[r] = upstream && hop.success[i];
      airtime_[r] = hop.success[i] ? airtime_[hop.transmitter] + hop.tx_time[i] : kInf;
    }
    hops_.push_back(std::move(hop));
  }

  SessionResult finish() {
    SessionResult result;
    for (NodeId d : destinations_) {
      const bool ok = has_packet(d);
      result.delivered[d] = ok;
      result.throughput[d] = ok ? packet_bits_ / airtime_.at(d) : 0.0;
      result.total_throughput += result.throughput[d];
    }
    const double count = static_cast<double>(destinations_.size());
    result.avg_throughput = result.total_throughput / count;
    result.pdr = result.delivered_count() / count;
    result.hops = std::move(hops_);
    result.control_trace = std::move(trace_);
    return result;
  }

 private:
  const std::set<NodeId>& destinations_;
  double packet_bits_;
  std::map<NodeId, bool> received_;
  std::map<NodeId, double> airtime_;
  std::vector<HopRecord> hops_;
  std::vector<ControlMessage> trace_;
};

HopRecord judge(const LayerEntry& entry, const Decision& decision, const Eigen::MatrixXd& tx_time,
                const std::vector<double>& available) {
  HopRecord hop;
  hop.transmitter = entry.transmitter;
  hop.receivers = entry.receivers;
  hop.chosen_channel = decision.channel;
  const auto r_count = entry.receivers.size();
  hop.tx_time.assign(r_count, kInf);
  hop.success.assign(r_count, false);
  hop.available_time.assign(r_count, 0.0);
  if (!decision.channel) return hop;
  const int c = *decision.channel;
  for (std::size_t i = 0; i < r_count; ++i) {
    hop.tx_time[i] = tx_time(static_cast<Eigen::Index>(i), c);
    hop.available_time[i] = available[i];
    hop.success[i] = hop.tx_time[i] <= hop.available_time[i];
  }
  return hop;
}

}  // namespace

std::vector<EventDraws> sample_event_draws(const LayerSchedule& schedule, const ChannelModel& model,
                                           Rng& rng) {
  std::vector<EventDraws> draws;
  draws.reserve(schedule.entries.size());
  const int m = model.size();
  for (const auto& entry : schedule.entries) {
    EventDraws ev;
    ev.state = sample_event_state(model, rng);
    const auto r_count = static_cast<Eigen::Index>(entry.receivers.size());
    ev.gain = Eigen::MatrixXd::Zero(r_count, m);
    for (Eigen::Index i = 0; i < r_count; ++i)
      for (int j = 0; j < m; ++j) {
        const double g = sample_gain(rng);
        if (ev.state.idle[j]) ev.gain(i, j) = g;
      }
    draws.push_back(std::move(ev));
  }
  return draws;
}

LinkMetrics compute_link_metrics(const Tree& tree, const LayerEntry& entry, const PhyParams& phy,
                                 const ChannelModel& model, const EventDraws& draws) {
  const auto r_count = static_cast<Eigen::Index>(entry.receivers.size());
  const int m = model.size();
  LinkMetrics metrics;
  metrics.receivers = entry.receivers;
  metrics.idle = draws.state.idle;
  metrics.pos = Eigen::MatrixXd::Zero(r_count, m);
  metrics.rate = Eigen::MatrixXd::Zero(r_count, m);
  metrics.tx_time = Eigen::MatrixXd::Constant(r_count, m, kInf);
  metrics.mu_idle.resize(m);
  for (int j = 0; j < m; ++j) metrics.mu_idle(j) = model.channels[j].mu_idle;

  for (Eigen::Index i = 0; i < r_count; ++i) {
    const double d = tree.edge_dist(entry.receivers[i]);
    for (int j = 0; j < m; ++j) {
      if (!draws.state.idle[j]) continue;
      const double rate = data_rate(phy, received_power(phy, d, draws.gain(i, j)));
      metrics.rate(i, j) = rate;
      metrics.tx_time(i, j) = tx_time(phy, rate);
      metrics.pos(i, j) = pos(metrics.tx_time(i, j), metrics.mu_idle(j));
    }
  }
  return metrics;
}

SessionResult run_session(const Tree& tree, const LayerSchedule& schedule, const SessionConfig& cfg,
                          const ChannelModel& model, const std::vector<EventDraws>& draws,
                          Rng& selection_rng) {
  check_pruned(tree, cfg.destinations);
  if (draws.size() != schedule.entries.size())
    throw std::invalid_argument("session: draws do not match the layer schedule");

  Accumulator acc(tree, cfg.destinations, cfg.phy.packet_bits);
  for (std::size_t k = 0; k < schedule.entries.size(); ++k) {
    const auto& entry = schedule.entries[k];
    if (!acc.has_packet(entry.transmitter)) {
      HopRecord hop = judge(entry, Decision{}, Eigen::MatrixXd{}, {});
      hop.skipped = true;
      acc.record(std::move(hop));
      continue;
    }
    acc.announce(entry);
    const auto metrics = compute_link_metrics(tree, entry, cfg.phy, model, draws[k]);
    const auto decision = select_channel(cfg.scheme, metrics, selection_rng);
    std::vector<double> available(entry.receivers.size(), 0.0);
    if (decision.channel) available.assign(entry.receivers.size(), draws[k].state.available_time[*decision.channel]);
    acc.record(judge(entry, decision, metrics.tx_time, available));
  }
  return acc.finish();
}

SessionResult run_session(const Tree& tree, const SessionConfig& cfg, const ChannelModel& model,
                          Rng& rng) {
  const auto schedule = layerize(tree);
  const auto draws = sample_event_draws(schedule, model, rng);
  return run_session(tree, schedule, cfg, model, draws, rng);
}

SessionResult inject_metrics_session(const InjectedSession& session, Scheme scheme, Rng& rng) {
  if (session.layers.empty()) throw std::invalid_argument("injected session: no layers supplied");
  if (session.mu_idle.empty()) throw std::invalid_argument("injected session: no channels supplied");
  const auto tree = prune_tree(session.tree, session.destinations);
  const auto schedule = layerize(tree);
  if (schedule.entries.size() != session.layers.size())
    throw std::invalid_argument("injected session: expected " +
                                std::to_string(schedule.entries.size()) + " layers, got " +
                                std::to_string(session.layers.size()));

  const int m = static_cast<int>(session.mu_idle.size());
  Accumulator acc(tree, session.destinations, session.packet_bits);
  for (const auto& entry : schedule.entries) {
    const InjectedLayer* layer = nullptr;
    for (const auto& l : session.layers)
      if (l.transmitter == entry.transmitter) layer = &l;
    if (!layer)
      throw std::invalid_argument("injected session: no layer for transmitter " +
                                  std::to_string(entry.transmitter));
    if (layer->receivers != entry.receivers)
      throw std::invalid_argument("injected session: receivers of transmitter " +
                                  std::to_string(entry.transmitter) + " do not match the tree");
    if (static_cast<int>(layer->idle.size()) != m ||
        layer->available_time.size() != layer->receivers.size())
      throw std::invalid_argument("injected session: table dimensions do not match");

    LinkMetrics metrics;
    metrics.receivers = layer->receivers;
    metrics.idle = layer->idle;
    metrics.pos = layer->pos;
    metrics.tx_time = layer->tx_time;
    metrics.rate = (session.packet_bits / layer->tx_time.array()).matrix();
    metrics.mu_idle = Eigen::Map<const Eigen::VectorXd>(session.mu_idle.data(), m);
    metrics.check();

    acc.announce(entry);
    const auto decision = select_channel(scheme, metrics, rng);
    acc.record(judge(entry, decision, metrics.tx_time, layer->available_time));
  }
  return acc.finish();
}

SessionResult inject_metrics_session(const InjectedSession& session) {
  Rng unused(0);
  return inject_metrics_session(session, Scheme::Pos, unused);
}

}  // namespace crmcast
