#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "evoml/session.hpp"
#include "evoml/wire.hpp"

namespace evoml {

inline constexpr std::string_view kReportSchema = "evoml.report/1";

struct RunOptions {
  std::filesystem::path data;
  std::string label;
  std::string metrics = "balanced";  // group name or comma-separated metric names
  int n = 100;
  int k = 10;
  int stages = 2;
  std::size_t auto_ensemble = 4;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::ostream* log = nullptr;
};

// "balanced", "imbalanced" or e.g. "accuracy,f1".
std::vector<MetricId> parse_metric_list(std::string_view text);

struct RunResult {
  Session session;
  GreedyResult ensemble;
  Json report;
};

// Random search, `stages` default evolution stages, then greedy composition.
RunResult run_pipeline(const RunOptions& options);

}  // namespace evoml
