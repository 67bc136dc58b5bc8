#include "crmcast/assignment.hpp"

#include <stdexcept>

namespace crmcast {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Pos: return "pos";
    case Scheme::Masa: return "masa";
    case Scheme::Mdr: return "mdr";
    case Scheme::Rs: return "rs";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "pos" || text == "POS") return Scheme::Pos;
  if (text == "masa" || text == "MASA") return Scheme::Masa;
  if (text == "mdr" || text == "MDR") return Scheme::Mdr;
  if (text == "rs" || text == "RS") return Scheme::Rs;
  throw std::invalid_argument("unknown scheme '" + text + "'");
}

void LinkMetrics::check() const {
  const auto r = receiver_count();
  const auto m = channel_count();
  if (r == 0 || m == 0) throw std::invalid_argument("link metrics: empty receiver or channel set");
  auto shape_ok = [&](const Eigen::MatrixXd& x) { return x.rows() == r && x.cols() == m; };
  if (!shape_ok(pos) || !shape_ok(rate) || !shape_ok(tx_time) || mu_idle.size() != m)
    throw std::invalid_argument("link metrics: matrix dimensions do not match receivers x channels");
}

namespace {

// First index with the largest score among idle channels.
std::optional<int> argmax_idle(const Eigen::VectorXd& score, const std::vector<bool>& idle) {
  std::optional<int> best;
  for (int j = 0; j < static_cast<int>(idle.size()); ++j)
    if (idle[j] && (!best || score(j) > score(*best))) best = j;
  return best;
}

}  // namespace

Decision select_channel(Scheme scheme, const LinkMetrics& metrics, Rng& rng) {
  metrics.check();
  const Eigen::VectorXd min_pos = metrics.pos.colwise().minCoeff().transpose();

  Decision decision;
  switch (scheme) {
    case Scheme::Pos:
      decision.channel = argmax_idle(min_pos, metrics.idle);
      break;
    case Scheme::Masa:
      decision.channel = argmax_idle(metrics.mu_idle, metrics.idle);
      break;
    case Scheme::Mdr:
      decision.channel = argmax_idle(metrics.rate.colwise().minCoeff().transpose(), metrics.idle);
      break;
    case Scheme::Rs: {
      std::vector<int> candidates;
      for (int j = 0; j < metrics.channel_count(); ++j)
        if (metrics.idle[j]) candidates.push_back(j);
      if (!candidates.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        decision.channel = candidates[pick(rng)];
      }
      break;
    }
  }
  if (decision.channel) decision.min_pos_at_choice = min_pos(*decision.channel);
  return decision;
}

Decision select_unicast(Scheme scheme, const LinkMetrics& metrics, Rng& rng) {
  if (metrics.receiver_count() != 1)
    throw std::invalid_argument("select_unicast: expected exactly one receiver");
  return select_channel(scheme, metrics, rng);
}

}  // namespace crmcast
