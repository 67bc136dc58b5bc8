#include "crmcast/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace crmcast {

int EventState::idle_count() const {
  return static_cast<int>(std::count(idle.begin(), idle.end(), true));
}

ChannelModel make_channels(int channel_count, double mu_min, double mu_max, double p_idle) {
  if (channel_count < 1) throw std::invalid_argument("make_channels: need at least one channel");
  if (!(mu_min > 0.0) || !(mu_max >= mu_min))
    throw std::invalid_argument("make_channels: need 0 < mu_min <= mu_max");
  if (!(p_idle > 0.0) || !(p_idle < 1.0))
    throw std::invalid_argument("make_channels: need 0 < p_idle < 1");

  ChannelModel model;
  model.channels.reserve(channel_count);
  for (int j = 0; j < channel_count; ++j) {
    double mu = mu_min;
    if (channel_count > 1) mu = mu_min + (mu_max - mu_min) * j / (channel_count - 1);
    model.channels.push_back({mu, p_idle});
  }
  // Keep the upper endpoint exact.
  if (channel_count > 1) model.channels.back().mu_idle = mu_max;
  return model;
}

EventState sample_event_state(const ChannelModel& model, Rng& rng) {
  const int m = model.size();
  if (model.forced_idle && static_cast<int>(model.forced_idle->size()) != m)
    throw std::invalid_argument("forced idle mask size does not match channel count");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EventState state;
  state.idle.resize(m);
  state.available_time.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    const auto& ch = model.channels[j];
    const double u = unit(rng);
    state.idle[j] = model.forced_idle ? (*model.forced_idle)[j] : u < ch.p_idle;
    // The residual is drawn for busy channels too, so the stream stays
    // aligned when only p_idle changes between runs with the same seed.
    std::exponential_distribution<double> residual(1.0 / ch.mu_idle);
    double t = residual(rng);
    // Exponential draws can land on exactly 0 with probability ~2^-53.
    while (!(t > 0.0)) t = residual(rng);
    if (state.idle[j]) state.available_time[j] = t;
  }
  return state;
}

double sample_gain(Rng& rng) {
  std::exponential_distribution<double> gain(1.0);
  double g = gain(rng);
  while (!(g > 0.0)) g = gain(rng);
  return g;
}

}  // namespace crmcast
