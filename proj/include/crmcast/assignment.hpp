#pragma once

// Unified-channel selection for one transmitter event. Every scheme picks
// among idle channels only; ties go to the lowest channel index.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "crmcast/topology.hpp"

namespace crmcast {

enum class Scheme { Pos, Masa, Mdr, Rs };

inline constexpr Scheme kAllSchemes[] = {Scheme::Pos, Scheme::Masa, Scheme::Mdr, Scheme::Rs};

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

/// Per-(receiver, channel) link quantities for one transmitter event.
/// Rows are receivers, columns are channels. Busy channels carry pos 0,
/// rate 0 and an infinite tx_time.
struct LinkMetrics {
  std::vector<NodeId> receivers;
  Eigen::MatrixXd pos;
  Eigen::MatrixXd rate;
  Eigen::MatrixXd tx_time;
  Eigen::VectorXd mu_idle;
  std::vector<bool> idle;

  int receiver_count() const { return static_cast<int>(receivers.size()); }
  int channel_count() const { return static_cast<int>(idle.size()); }

  /// Throws std::invalid_argument if the shapes disagree.
  void check() const;
};

struct Decision {
  std::optional<int> channel;
  double min_pos_at_choice = 0.0;
};

/// POS: argmax over idle j of min_r pos(r, j).
/// MASA: argmax over idle j of mu_idle(j).
/// MDR: argmax over idle j of min_r rate(r, j).
/// RS: uniform over idle channels (the only scheme that consumes `rng`).
/// No idle channel yields a Decision without a channel.
Decision select_channel(Scheme scheme, const LinkMetrics& metrics, Rng& rng);

/// Unicast is the one-receiver case of the max-min rule.
Decision select_unicast(Scheme scheme, const LinkMetrics& metrics, Rng& rng);

}  // namespace crmcast
