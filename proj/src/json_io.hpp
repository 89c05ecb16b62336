#pragma once

// JSON shapes shared by the CLI and the benchmark report.

#include <cmath>
#include <optional>
#include <string>

#include "json.hpp"
#include "kor/graph.hpp"

namespace kor::detail {

// JSON has no infinity; unbounded values are written as null.
inline nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json query_json(const Query& q) {
  return {{"source", q.source},
          {"target", q.target},
          {"keywords", q.keywords},
          {"delta", number(q.budget_limit)}};
}

/// One result line: query, algorithm, params, route, objective, budget,
/// feasible, runtime_ms, labels_generated. An absent result has a null route.
inline nlohmann::json result_json(const Query& query, const std::string& algorithm,
                                  const std::map<std::string, double>& params,
                                  const std::optional<RouteResult>& result, double runtime_ms,
                                  std::uint64_t labels_generated) {
  nlohmann::json j;
  j["query"] = query_json(query);
  j["algorithm"] = algorithm;
  j["params"] = nlohmann::json::object();
  for (const auto& [k, v] : params) j["params"][k] = number(v);
  if (result) {
    j["route"] = result->route.nodes;
    j["objective"] = result->objective;
    j["budget"] = result->budget;
    j["feasible"] = result->feasible;
  } else {
    j["route"] = nullptr;
    j["objective"] = nullptr;
    j["budget"] = nullptr;
    j["feasible"] = false;
  }
  j["runtime_ms"] = runtime_ms;
  j["labels_generated"] = labels_generated;
  return j;
}

}  // namespace kor::detail
