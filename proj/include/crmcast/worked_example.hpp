#pragma once

// The 15-node SPT walkthrough with its reference POS tables: three
// transmitter events (source to {6,8,9,2}, 2 to 10, 8 to 7). Loaded from a
// JSON fixture so a modified table can be replayed and diffed.

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "crmcast/session.hpp"

namespace crmcast {

/// Built-in fixture text. Channels are numbered from 1 in the file.
const std::string& builtin_worked_example();

/// Throws std::invalid_argument on missing or malformed fields.
InjectedSession parse_worked_example(const nlohmann::json& doc);

struct ExampleCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double rel_tolerance = 0.0;  // 0 means exact
  bool pass = false;
};

struct ExampleReport {
  SessionResult result;
  std::vector<std::pair<NodeId, int>> selections;  // transmitter, 1-based channel (0 = none)
  std::vector<ExampleCheck> checks;

  bool ok() const;
};

/// Replays the session and checks it against the reference outcome.
ExampleReport run_worked_example(const InjectedSession& session);

void print_report(std::ostream& out, const ExampleReport& report);
nlohmann::json to_json(const ExampleReport& report);

}  // namespace crmcast
