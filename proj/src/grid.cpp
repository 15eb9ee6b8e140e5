#include <algorithm>
#include <numeric>

#include "evoml/analytics.hpp"
#include "evoml/error.hpp"
#include "evoml/learners.hpp"

namespace evoml {
namespace {

using PowerTable = std::map<std::string, std::vector<double>>;

// Per-instance power for every algorithm present, plus the pooled "all" row.
PowerTable power_table(std::span<const EvaluatedModel* const> models, const Dataset& d) {
  PowerTable table;
  if (models.empty()) return table;
  table[std::string(kAllAlgorithmsKey)] = predictive_power(models, d);
  for (auto a : kAllAlgorithms) {
    std::vector<const EvaluatedModel*> subset;
    for (const auto* m : models) {
      if (m->config.algorithm == a) subset.push_back(m);
    }
    if (!subset.empty()) table[std::string(to_string(a))] = predictive_power(subset, d);
  }
  return table;
}

std::optional<double> cell_mean(const std::vector<std::size_t>& members, const std::vector<double>& values) {
  if (members.empty()) return std::nullopt;
  double total = 0.0;
  for (auto i : members) total += values[i];
  return total / static_cast<double>(members.size());
}

}  // namespace

bool grid_needs_clustering(const Dataset& d) {
  const auto balance = class_balance(d);
  return balance.count_per_class[0] >= kGridClusterThreshold || balance.count_per_class[1] >= kGridClusterThreshold;
}

InstanceGrid build_grid(const Dataset& d, std::span<const EvaluatedModel* const> all_models,
                        std::span<const EvaluatedModel* const> selected_models, std::uint64_t seed) {
  if (all_models.empty()) throw Error(ErrorCode::NoModels, "grid needs evaluated models");
  const auto all_power = power_table(all_models, d);
  const auto sel_power = power_table(selected_models, d);
  const auto& overall = all_power.at(std::string(kAllAlgorithmsKey));

  InstanceGrid grid;
  grid.clustered = grid_needs_clustering(d);
  std::vector<std::vector<std::size_t>> groups;
  if (grid.clustered) {
    const Matrix scaled = MinMaxScaler::fit(d.features).transform(d.features);
    const auto km = kmeans(scaled, kGridCells, seed);
    groups.resize(kGridCells);
    for (std::size_t i = 0; i < d.size(); ++i) groups[static_cast<std::size_t>(km.assignment[i])].push_back(i);
    std::stable_sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
      const auto ma = cell_mean(a, overall), mb = cell_mean(b, overall);
      if (ma.has_value() != mb.has_value()) return ma.has_value();
      return ma && *ma > *mb;
    });
  } else {
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.labels[i] == cls) members.push_back(i);
      }
      std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return overall[a] > overall[b]; });
      for (auto i : members) groups.push_back({i});
    }
  }

  grid.assignment.assign(d.size(), -1);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    GridCell cell;
    cell.members = groups[c];
    for (auto i : cell.members) {
      ++cell.class_counts[static_cast<std::size_t>(d.labels[i])];
      grid.assignment[i] = static_cast<int>(c);
    }
    if (!grid.clustered) cell.class_label = d.labels[cell.members.front()];
    for (const auto& [key, values] : all_power) {
      cell.power[key] = cell_mean(cell.members, values);
      auto sel = sel_power.find(key);
      cell.selected_power[key] = sel == sel_power.end() ? std::nullopt : cell_mean(cell.members, sel->second);
      if (cell.power[key] && cell.selected_power[key]) {
        cell.difference[key] = *cell.selected_power[key] - *cell.power[key];
      } else {
        cell.difference[key] = std::nullopt;
      }
    }
    grid.cells.push_back(std::move(cell));
  }
  return grid;
}

Panels aggregate_panels(std::span<const EvaluatedModel* const> all_models,
                        std::span<const EvaluatedModel* const> selection, std::span<const MetricId> metrics) {
  Panels panels;
  for (const auto* m : all_models) panels.beeswarm[m->config.algorithm].emplace_back(m->id(), m->overall);
  for (auto& [algorithm, series] : panels.beeswarm) {
    std::stable_sort(series.begin(), series.end(), [](const auto& a, const auto& b) {
      return a.second > b.second || (a.second == b.second && a.first < b.first);
    });
  }
  for (auto metric : metrics) {
    BeanSeries bean;
    bean.metric = metric;
    for (const auto* m : all_models) bean.all_values.push_back(m->metric_scores.at(metric));
    for (const auto* m : selection) bean.selection_values.push_back(m->metric_scores.at(metric));
    if (!bean.all_values.empty()) {
      bean.all_mean = std::accumulate(bean.all_values.begin(), bean.all_values.end(), 0.0) /
                      static_cast<double>(bean.all_values.size());
    }
    if (!bean.selection_values.empty()) {
      bean.selection_mean = std::accumulate(bean.selection_values.begin(), bean.selection_values.end(), 0.0) /
                            static_cast<double>(bean.selection_values.size());
    }
    panels.beans.push_back(std::move(bean));
  }
  return panels;
}

}  // namespace evoml
