#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "crmcast/session.hpp"
#include "crmcast/worked_example.hpp"

using namespace crmcast;

namespace {

InjectedSession walkthrough() {
  return parse_worked_example(nlohmann::json::parse(builtin_worked_example()));
}

const InjectedLayer& layer_of(const InjectedSession& s, NodeId tx) {
  for (const auto& l : s.layers)
    if (l.transmitter == tx) return l;
  throw std::logic_error("no layer");
}

InjectedLayer& layer_of(InjectedSession& s, NodeId tx) {
  return const_cast<InjectedLayer&>(layer_of(std::as_const(s), tx));
}

const HopRecord& hop_of(const SessionResult& r, NodeId tx) {
  for (const auto& h : r.hops)
    if (h.transmitter == tx) return h;
  throw std::logic_error("no hop");
}

// root 0 -> 1 -> 2, plus 0 -> 3; all destinations.
Tree small_tree() {
  Tree t(0);
  t.attach(0, 1, 10.0);
  t.attach(1, 2, 10.0);
  t.attach(0, 3, 10.0);
  return t;
}

PhyParams hand_phy() {
  PhyParams p;
  p.wavelength = 0.5;
  return p;
}

ChannelModel always_idle(int m, double mu) {
  ChannelModel model;
  model.channels.assign(m, ChannelParams{mu, 0.5});
  model.forced_idle = std::vector<bool>(m, true);
  return model;
}

}  // namespace

TEST_SUITE("session") {
  TEST_CASE("walkthrough channel choices, throughputs and delivery") {
    const auto r = inject_metrics_session(walkthrough());
    CHECK(*hop_of(r, 1).chosen_channel == 4);
    CHECK(*hop_of(r, 2).chosen_channel == 5);
    CHECK(*hop_of(r, 8).chosen_channel == 3);

    CHECK(r.throughput.at(6) == doctest::Approx(5.5539e6).epsilon(0.005));
    CHECK(r.throughput.at(9) == doctest::Approx(6.4251e6).epsilon(0.005));
    CHECK(r.throughput.at(10) == doctest::Approx(2.8e6).epsilon(0.005));
    CHECK(r.throughput.at(7) == 0.0);
    CHECK(r.throughput.at(8) == 0.0);
    CHECK(r.total_throughput == doctest::Approx(14.779e6).epsilon(0.01));
    CHECK(r.avg_throughput == doctest::Approx(r.total_throughput / 5.0).epsilon(1e-12));
    CHECK(r.avg_throughput / 1e6 == doctest::Approx(2.9).epsilon(0.02));
    CHECK(r.pdr == 0.6);
    CHECK(r.delivered == std::map<NodeId, bool>{{6, true}, {7, false}, {8, false}, {9, true}, {10, true}});
  }

  TEST_CASE("walkthrough report passes every check") {
    const auto report = run_worked_example(walkthrough());
    CHECK(report.ok());
    CHECK(report.selections == std::vector<std::pair<NodeId, int>>{{1, 5}, {2, 6}, {8, 4}});
  }

  TEST_CASE("relay 14 is pruned away") {
    const auto r = inject_metrics_session(walkthrough());
    for (const auto& h : r.hops) CHECK(std::find(h.receivers.begin(), h.receivers.end(), 14) == h.receivers.end());
    CHECK(r.hops.size() == 3);
  }

  TEST_CASE("lowering the CH5 column moves the first layer to CH6") {
    auto s = walkthrough();
    layer_of(s, 1).pos.col(4).array() *= 0.5;
    const auto r = inject_metrics_session(s);
    CHECK(*hop_of(r, 1).chosen_channel == 5);
  }

  TEST_CASE("lowering CH5 and CH6 moves the first layer to CH4") {
    auto s = walkthrough();
    layer_of(s, 1).pos.col(4).array() *= 0.5;
    layer_of(s, 1).pos.col(5).array() *= 0.5;
    const auto r = inject_metrics_session(s);
    CHECK(*hop_of(r, 1).chosen_channel == 3);
  }

  TEST_CASE("empty or mismatched tables are rejected") {
    auto s = walkthrough();
    auto no_layers = s;
    no_layers.layers.clear();
    CHECK_THROWS_AS(inject_metrics_session(no_layers), std::invalid_argument);
    auto no_channels = s;
    no_channels.mu_idle.clear();
    CHECK_THROWS_AS(inject_metrics_session(no_channels), std::invalid_argument);
    auto short_pos = s;
    layer_of(short_pos, 1).pos.resize(3, 6);
    CHECK_THROWS_AS(inject_metrics_session(short_pos), std::invalid_argument);
    auto wrong_receivers = s;
    layer_of(wrong_receivers, 1).receivers = {6, 8, 2, 9};
    CHECK_THROWS_AS(inject_metrics_session(wrong_receivers), std::invalid_argument);
  }

  TEST_CASE("all channels busy delivers nothing") {
    auto s = walkthrough();
    for (auto& l : s.layers) {
      l.idle.assign(6, false);
      l.pos.setZero();
    }
    const auto r = inject_metrics_session(s);
    CHECK(r.pdr == 0.0);
    CHECK(r.total_throughput == 0.0);
    for (const auto& h : r.hops) CHECK_FALSE(h.chosen_channel);
  }

  TEST_CASE("single hop with hand-computed airtime") {
    Tree t(0);
    t.attach(0, 1, 10.0);
    const auto phy = hand_phy();
    SessionConfig cfg{phy, Scheme::Pos, TreeKind::Spt, {1}};
    const auto model = always_idle(1, 1e6);
    const auto schedule = layerize(t);
    EventDraws draws;
    draws.state.idle = {true};
    draws.state.available_time = {1e6};
    draws.gain = Eigen::MatrixXd::Constant(1, 1, 1.0);
    Rng rng(0);
    const auto r = run_session(t, schedule, cfg, model, {draws}, rng);
    // Pr = 1.58314e-8 W, SNR = 15831.4, R = 1e6 log2(1 + SNR)
    const double rate = 1e6 * std::log2(1.0 + 0.1 / 1e4 * std::pow(0.5 / (4 * M_PI), 2) / 1e-12);
    const double tr = 32768.0 / rate;
    REQUIRE(r.hops.size() == 1);
    CHECK(r.hops[0].tx_time[0] == doctest::Approx(tr).epsilon(1e-12));
    CHECK(tr == doctest::Approx(32768.0 / 13.9505e6).epsilon(1e-4));
    CHECK(r.throughput.at(1) == doctest::Approx(rate).epsilon(1e-12));
    CHECK(r.pdr == 1.0);
  }

  TEST_CASE("a failed hop fails every downstream destination") {
    const auto tree = small_tree();
    const auto schedule = layerize(tree);
    SessionConfig cfg{hand_phy(), Scheme::Pos, TreeKind::Spt, {1, 2, 3}};
    const auto model = always_idle(2, 1.0);
    std::vector<EventDraws> draws(schedule.entries.size());
    for (auto& d : draws) {
      d.state.idle = {true, true};
      d.state.available_time = {1e6, 1e6};
    }
    draws[0].gain = Eigen::MatrixXd::Constant(2, 2, 1.0);
    draws[0].state.available_time = {1e-9, 1e-9};  // source event fails for everyone
    draws[1].gain = Eigen::MatrixXd::Constant(1, 2, 1.0);
    Rng rng(0);
    const auto r = run_session(tree, schedule, cfg, model, draws, rng);
    CHECK(r.pdr == 0.0);
    REQUIRE(r.hops.size() == 2);
    CHECK(r.hops[1].transmitter == 1);
    CHECK(r.hops[1].skipped);
    CHECK_FALSE(r.hops[1].chosen_channel);
    // Skipped transmitters send no control traffic.
    for (const auto& m : r.control_trace) CHECK(m.from != 2);
    CHECK(r.control_trace.size() == 4);
  }

  TEST_CASE("throughput is D over the summed airtime along the root path") {
    const auto tree = small_tree();
    const auto schedule = layerize(tree);
    const auto phy = hand_phy();
    SessionConfig cfg{phy, Scheme::Pos, TreeKind::Spt, {1, 2, 3}};
    const auto model = always_idle(3, 1.0);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> g(0.1, 3.0);
    std::vector<EventDraws> draws;
    for (const auto& e : schedule.entries) {
      EventDraws d;
      d.state.idle = {true, true, true};
      d.state.available_time = {10.0, 10.0, 10.0};
      d.gain.resize(static_cast<Eigen::Index>(e.receivers.size()), 3);
      for (Eigen::Index i = 0; i < d.gain.size(); ++i) d.gain(i) = g(gen);
      draws.push_back(d);
    }
    Rng rng(0);
    const auto r = run_session(tree, schedule, cfg, model, draws, rng);
    CHECK(r.pdr == 1.0);
    const auto& h0 = r.hops[0];
    const auto& h1 = r.hops[1];
    REQUIRE(h0.receivers == std::vector<NodeId>{1, 3});
    CHECK(r.throughput.at(1) == doctest::Approx(phy.packet_bits / h0.tx_time[0]).epsilon(1e-12));
    CHECK(r.throughput.at(3) == doctest::Approx(phy.packet_bits / h0.tx_time[1]).epsilon(1e-12));
    CHECK(r.throughput.at(2) ==
          doctest::Approx(phy.packet_bits / (h0.tx_time[0] + h1.tx_time[0])).epsilon(1e-12));
    CHECK(r.avg_throughput == doctest::Approx(r.total_throughput / 3.0).epsilon(1e-12));
  }

  TEST_CASE("success means the airtime fits in the residual idle time") {
    Rng rng(11);
    const auto tree = small_tree();
    SessionConfig cfg{hand_phy(), Scheme::Pos, TreeKind::Spt, {1, 2, 3}};
    const auto model = make_channels(5, 0.0005, 0.003, 0.6);
    for (int k = 0; k < 300; ++k) {
      const auto r = run_session(tree, cfg, model, rng);
      for (const auto& h : r.hops) {
        if (!h.chosen_channel) continue;
        for (std::size_t i = 0; i < h.receivers.size(); ++i)
          CHECK(h.success[i] == (h.tx_time[i] <= h.available_time[i]));
      }
      const double n = r.pdr * 3.0;
      CHECK(std::abs(n - std::round(n)) < 1e-12);
      CHECK(r.pdr >= 0.0);
      CHECK(r.pdr <= 1.0);
    }
  }

  TEST_CASE("control trace: MA to every child, then an ACK from each") {
    const auto r = inject_metrics_session(walkthrough());
    const std::vector<ControlMessage> expected{
        {ControlKind::Ma, 1, 6},  {ControlKind::Ma, 1, 8},  {ControlKind::Ma, 1, 9},
        {ControlKind::Ma, 1, 2},  {ControlKind::Ack, 6, 1}, {ControlKind::Ack, 8, 1},
        {ControlKind::Ack, 9, 1}, {ControlKind::Ack, 2, 1}, {ControlKind::Ma, 2, 10},
        {ControlKind::Ack, 10, 2}, {ControlKind::Ma, 8, 7}, {ControlKind::Ack, 7, 8}};
    CHECK(r.control_trace == expected);
  }

  TEST_CASE("an unpruned tree is rejected") {
    const auto tree = small_tree();
    SessionConfig cfg{hand_phy(), Scheme::Pos, TreeKind::Spt, {1, 3}};
    Rng rng(0);
    CHECK_THROWS_AS(run_session(tree, cfg, always_idle(2, 1.0), rng), std::invalid_argument);
  }

  TEST_CASE("draws must match the schedule") {
    const auto tree = small_tree();
    SessionConfig cfg{hand_phy(), Scheme::Pos, TreeKind::Spt, {1, 2, 3}};
    Rng rng(0);
    CHECK_THROWS_AS(run_session(tree, layerize(tree), cfg, always_idle(2, 1.0), {}, rng),
                    std::invalid_argument);
  }

  TEST_CASE("busy cells carry zero POS and rate") {
    const auto tree = small_tree();
    const auto schedule = layerize(tree);
    ChannelModel model = make_channels(4, 0.01, 0.04, 0.5);
    model.forced_idle = std::vector<bool>{true, false, true, false};
    Rng rng(2);
    const auto draws = sample_event_draws(schedule, model, rng);
    const auto m = compute_link_metrics(tree, schedule.entries[0], hand_phy(), model, draws[0]);
    for (Eigen::Index i = 0; i < m.pos.rows(); ++i) {
      CHECK(m.pos(i, 1) == 0.0);
      CHECK(m.rate(i, 3) == 0.0);
      CHECK(std::isinf(m.tx_time(i, 1)));
      CHECK(m.pos(i, 0) > 0.0);
    }
  }

  TEST_CASE("session CSV lists destinations then a summary row") {
    const auto r = inject_metrics_session(walkthrough());
    std::ostringstream out;
    write_session_csv(out, r);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "dest,delivered,throughput_bps");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      if (rows == 6) CHECK(line.rfind("summary,0.6,", 0) == 0);
    }
    CHECK(rows == 6);
    CHECK(out.str().find("\n7,0,0\n") != std::string::npos);
  }
}
