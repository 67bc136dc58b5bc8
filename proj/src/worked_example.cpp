#include "crmcast/worked_example.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace crmcast {

namespace {

// Tree edges carry unit length: injected tables make distances irrelevant.
// tx_time cells not listed under tx_time_override are derived from the POS
// table as -mu ln(pos). Node 8's hop and node 7's hop are given less
// residual idle time than their airtime, the two failures in the walkthrough.
const std::string kBuiltin = R"json({
  "packet_bits": 32768,
  "mu_s": [0.010, 0.020, 0.030, 0.040, 0.050, 0.060],
  "root": 1,
  "destinations": [6, 7, 8, 9, 10],
  "tree": [[1, 6], [1, 8], [1, 9], [1, 2], [2, 10], [8, 7], [8, 14]],
  "layers": [
    {
      "transmitter": 1,
      "receivers": [6, 8, 9, 2],
      "busy": [2, 3],
      "pos": [
        [0.534,  0, 0, 0.7716, 0.8895, 0.9073],
        [0.2903, 0, 0, 0.8222, 0.89,   0.8691],
        [0.6563, 0, 0, 0.9207, 0.9037, 0.936],
        [0.6658, 0, 0, 0.9071, 0.8869, 0.796]
      ],
      "tx_time_override": [[6, 5, 0.0059], [9, 5, 0.0051], [2, 5, 0.0060]],
      "available_time": [0.0065, 0.0050, 0.0065, 0.0065]
    },
    {
      "transmitter": 2,
      "receivers": [10],
      "busy": [1, 2],
      "pos": [[0, 0, 0.842, 0.8048, 0.7958, 0.91]],
      "tx_time_override": [[10, 6, 0.0057]],
      "available_time": [0.0065]
    },
    {
      "transmitter": 8,
      "receivers": [7],
      "busy": [2, 5, 6],
      "pos": [[0.1939, 0, 0.768, 0.8093, 0, 0]],
      "available_time": [0.0050]
    }
  ]
}
)json";

constexpr double kPacketBits = 4 * 8 * 1024;

template <typename T>
T field(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw std::invalid_argument(std::string("worked example: missing '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("worked example: bad '") + key + "': " + e.what());
  }
}

}  // namespace

const std::string& builtin_worked_example() { return kBuiltin; }

InjectedSession parse_worked_example(const nlohmann::json& doc) {
  InjectedSession s;
  s.packet_bits = field<double>(doc, "packet_bits");
  s.mu_idle = field<std::vector<double>>(doc, "mu_s");
  const int m = static_cast<int>(s.mu_idle.size());
  for (NodeId d : field<std::vector<NodeId>>(doc, "destinations")) s.destinations.insert(d);

  s.tree = Tree(field<NodeId>(doc, "root"));
  for (const auto& edge : field<std::vector<std::pair<NodeId, NodeId>>>(doc, "tree"))
    s.tree.attach(edge.first, edge.second, 1.0);

  for (const auto& l : field<nlohmann::json>(doc, "layers")) {
    InjectedLayer layer;
    layer.transmitter = field<NodeId>(l, "transmitter");
    layer.receivers = field<std::vector<NodeId>>(l, "receivers");
    const auto r_count = static_cast<Eigen::Index>(layer.receivers.size());

    layer.idle.assign(m, true);
    for (int ch : field<std::vector<int>>(l, "busy")) {
      if (ch < 1 || ch > m) throw std::invalid_argument("worked example: busy channel out of range");
      layer.idle[ch - 1] = false;
    }

    const auto rows = field<std::vector<std::vector<double>>>(l, "pos");
    if (static_cast<Eigen::Index>(rows.size()) != r_count)
      throw std::invalid_argument("worked example: pos table needs one row per receiver");
    layer.pos.resize(r_count, m);
    layer.tx_time.resize(r_count, m);
    for (Eigen::Index i = 0; i < r_count; ++i) {
      if (static_cast<int>(rows[i].size()) != m)
        throw std::invalid_argument("worked example: pos row needs one value per channel");
      for (int j = 0; j < m; ++j) {
        const double p = layer.idle[j] ? rows[i][j] : 0.0;
        layer.pos(i, j) = p;
        layer.tx_time(i, j) = p > 0.0 ? -s.mu_idle[j] * std::log(p) : INFINITY;
      }
    }

    if (l.contains("tx_time_override")) {
      for (const auto& o : l.at("tx_time_override")) {
        const auto node = o.at(0).get<NodeId>();
        const auto ch = o.at(1).get<int>();
        const auto it = std::find(layer.receivers.begin(), layer.receivers.end(), node);
        if (it == layer.receivers.end() || ch < 1 || ch > m)
          throw std::invalid_argument("worked example: bad tx_time_override entry");
        layer.tx_time(it - layer.receivers.begin(), ch - 1) = o.at(2).get<double>();
      }
    }
    layer.available_time = field<std::vector<double>>(l, "available_time");
    s.layers.push_back(std::move(layer));
  }
  return s;
}

bool ExampleReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

ExampleReport run_worked_example(const InjectedSession& session) {
  ExampleReport report;
  report.result = inject_metrics_session(session);
  for (const auto& hop : report.result.hops)
    report.selections.emplace_back(hop.transmitter, hop.chosen_channel ? *hop.chosen_channel + 1 : 0);

  auto add = [&](std::string name, double expected, double actual, double tol) {
    const bool pass = tol == 0.0 ? actual == expected
                                 : std::abs(actual - expected) <= tol * std::abs(expected);
    report.checks.push_back({std::move(name), expected, actual, tol, pass});
  };
  auto selection = [&](NodeId tx) {
    for (auto [t, ch] : report.selections)
      if (t == tx) return ch;
    return -1;
  };
  auto throughput = [&](NodeId d) {
    const auto it = report.result.throughput.find(d);
    return it == report.result.throughput.end() ? -1.0 : it->second;
  };

  add("channel from node 1", 5, selection(1), 0.0);
  add("channel from node 2", 6, selection(2), 0.0);
  add("channel from node 8", 4, selection(8), 0.0);
  add("V6 bps", 5.5539e6, throughput(6), 0.005);
  add("V9 bps", 6.4251e6, throughput(9), 0.005);
  add("V10 bps", 2.8e6, throughput(10), 0.005);
  add("V7 bps", 0.0, throughput(7), 0.0);
  add("V8 bps", 0.0, throughput(8), 0.0);
  // 14.779 Mbps is the unrounded sum of the three delivered rates.
  const double total = kPacketBits / 0.0059 + kPacketBits / 0.0051 + kPacketBits / 0.0117;
  add("total throughput bps", 14.779e6, report.result.total_throughput, 0.01);
  add("average throughput bps", total / 5.0, report.result.avg_throughput, 0.01);
  add("pdr", 0.6, report.result.pdr, 0.0);
  return report;
}

void print_report(std::ostream& out, const ExampleReport& report) {
  out << "Worked example: SPT rooted at node 1, destinations 6..10\n\n";
  for (auto [tx, ch] : report.selections) {
    out << "  transmitter " << std::setw(2) << tx << " -> ";
    if (ch > 0) out << "CH" << ch << '\n';
    else out << "no idle channel\n";
  }
  out << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [dest, v] : report.result.throughput)
    out << "  V" << dest << " = " << v / 1e6 << " Mbps" << (report.result.delivered.at(dest) ? "" : "  (lost)")
        << '\n';
  out << "\n  total   = " << report.result.total_throughput / 1e6 << " Mbps\n";
  out << "  average = " << report.result.avg_throughput / 1e6 << " Mbps\n";
  out << "  PDR     = " << report.result.delivered_count() << '/' << report.result.delivered.size() << " = "
      << std::setprecision(0) << report.result.pdr * 100.0 << "%\n\n";
  out << std::setprecision(6) << std::defaultfloat;
  for (const auto& c : report.checks) {
    out << (c.pass ? "  ok    " : "  FAIL  ") << c.name;
    if (!c.pass) out << ": expected " << c.expected << ", got " << c.actual;
    out << '\n';
  }
  out << (report.ok() ? "\nall checks passed\n" : "\nMISMATCH against the reference example\n");
}

nlohmann::json to_json(const ExampleReport& report) {
  nlohmann::json doc;
  doc["ok"] = report.ok();
  for (auto [tx, ch] : report.selections) doc["selections"].push_back({{"transmitter", tx}, {"channel", ch}});
  for (const auto& [dest, v] : report.result.throughput)
    doc["destinations"].push_back(
        {{"node", dest}, {"delivered", report.result.delivered.at(dest)}, {"throughput_bps", v}});
  doc["total_throughput_bps"] = report.result.total_throughput;
  doc["avg_throughput_bps"] = report.result.avg_throughput;
  doc["pdr"] = report.result.pdr;
  for (const auto& c : report.checks)
    doc["checks"].push_back({{"name", c.name},
                             {"expected", c.expected},
                             {"actual", c.actual},
                             {"rel_tolerance", c.rel_tolerance},
                             {"pass", c.pass}});
  return doc;
}

}  // namespace crmcast
