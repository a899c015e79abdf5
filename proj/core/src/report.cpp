#include <json.hpp>

#include "eqsat/runner.hpp"
#include "eqsat/serialize.hpp"

namespace eqsat {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Saturated:
      return "saturated";
    case StopReason::IterLimit:
      return "iter_limit";
    case StopReason::NodeLimit:
      return "node_limit";
    case StopReason::TimeLimit:
      return "time_limit";
    case StopReason::HookStop:
      return "hook_stop";
    case StopReason::AnalysisContradiction:
      return "analysis_contradiction";
  }
  return "unknown";
}

std::unique_ptr<Scheduler> make_scheduler(const RunnerConfig &cfg) {
  if (cfg.scheduler == SchedulerKind::EveryRule) return std::make_unique<EveryRuleScheduler>();
  return std::make_unique<BackoffScheduler>(cfg.backoff);
}

std::string to_json_line(const IterationReport &r) {
  nlohmann::ordered_json j;
  j["iteration"] = r.index;
  j["enodes"] = r.enodes;
  j["eclasses"] = r.eclasses;
  j["applied"] = r.applied;
  j["repairs"] = r.repairs;
  j["rebuilds"] = r.rebuilds;
  j["search_ms"] = r.search_ms;
  j["apply_ms"] = r.apply_ms;
  j["rebuild_ms"] = r.rebuild_ms;
  auto rules = nlohmann::ordered_json::array();
  for (const auto &rule : r.rules) {
    rules.push_back({{"name", rule.name}, {"matches", rule.matches}, {"applied", rule.applied}, {"banned", rule.banned}});
  }
  j["rules"] = std::move(rules);
  if (r.stop_reason) j["stop_reason"] = to_string(*r.stop_reason);
  return j.dump();
}

std::string to_json(const EGraphSnapshot &s, int indent) {
  nlohmann::ordered_json j;
  j["clean"] = s.clean;
  auto classes = nlohmann::ordered_json::array();
  for (const auto &c : s.classes) classes.push_back({{"id", c.id}, {"nodes", c.nodes}, {"data", c.data}});
  j["classes"] = std::move(classes);
  j["unionfind"] = s.find;
  return j.dump(indent);
}

}  // namespace eqsat
