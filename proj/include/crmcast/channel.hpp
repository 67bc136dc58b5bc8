#pragma once

// Primary-user channel occupancy: each channel alternates idle/busy. A
// transmitter event sees a fresh idle mask and, for idle channels, the
// residual idle time, which is exponential with the channel's mean idle
// duration (memoryless sojourns).

#include <optional>
#include <vector>

#include "crmcast/topology.hpp"

namespace crmcast {

struct ChannelParams {
  double mu_idle = 0.0;  // mean idle duration, seconds
  double p_idle = 0.0;   // long-run idle probability

  /// Mean busy duration implied by P_I = mu / (mu + lambda).
  double mean_busy() const { return mu_idle * (1.0 - p_idle) / p_idle; }
};

struct ChannelModel {
  std::vector<ChannelParams> channels;
  /// Test override: when set, fixes each channel's idle flag instead of
  /// drawing it. Available times are still sampled for idle channels.
  std::optional<std::vector<bool>> forced_idle;

  int size() const { return static_cast<int>(channels.size()); }
};

struct EventState {
  std::vector<bool> idle;
  std::vector<double> available_time;  // meaningful only where idle

  int idle_count() const;
};

/// Mean idle durations evenly spaced over [mu_min, mu_max]; all channels
/// share p_idle. Throws std::invalid_argument on invalid ranges.
ChannelModel make_channels(int channel_count, double mu_min, double mu_max, double p_idle);

EventState sample_event_state(const ChannelModel& model, Rng& rng);

/// Rayleigh power gain, Exponential(1).
double sample_gain(Rng& rng);

}  // namespace crmcast
