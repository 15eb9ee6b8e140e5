#include "evoml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "evoml/error.hpp"
#include "evoml/random.hpp"

namespace evoml {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == ',' && !quoted) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(line.substr(start)));
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature rows and labels differ in length");
  }
  std::array<std::size_t, 2> counts{};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::NotBinary, "labels must be 0 or 1");
    ++counts[static_cast<std::size_t>(y)];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw Error(ErrorCode::NotBinary, "both classes must be present");
  }
  if (!features.allFinite()) throw Error(ErrorCode::NonNumericFeature, "non-finite feature value");
  if (feature_names.size() != feature_count()) {
    throw Error(ErrorCode::ShapeMismatch, "feature name count differs from column count");
  }
}

Dataset parse_csv(std::string_view text, std::string_view label_column) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!trim(line).empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, "no header row");
  if (lines.size() == 1) throw Error(ErrorCode::EmptyFile, "no data rows");

  const auto header = split_fields(lines[0]);
  auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw Error(ErrorCode::MissingColumn, "label column '" + std::string(label_column) + "' not found");
  }
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  Dataset d;
  d.label_name = std::string(label_column);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) d.feature_names.emplace_back(header[c]);
  }

  const std::size_t rows = lines.size() - 1;
  d.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d.feature_names.size()));
  d.labels.reserve(rows);
  std::vector<std::string> seen;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(r + 2) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_idx) continue;
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw Error(ErrorCode::NonNumericFeature, "line " + std::to_string(r + 2) + ", column '" +
                                                      std::string(header[c]) + "': '" +
                                                      std::string(fields[c]) + "'");
      }
      d.features(static_cast<Eigen::Index>(r), col++) = v;
    }
    const std::string label(fields[label_idx]);
    auto it = std::find(seen.begin(), seen.end(), label);
    if (it == seen.end()) {
      seen.push_back(label);
      if (seen.size() > 2) throw Error(ErrorCode::NotBinary, "label column has more than two values");
      it = seen.end() - 1;
    }
    d.labels.push_back(static_cast<int>(it - seen.begin()));
  }
  if (seen.size() != 2) throw Error(ErrorCode::NotBinary, "label column has fewer than two values");
  d.class_names = {seen[0], seen[1]};
  return d;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), label_column);
}

std::string to_csv(const Dataset& d) {
  std::string out;
  for (const auto& name : d.feature_names) out += name + ",";
  out += d.label_name + "\n";
  for (Eigen::Index r = 0; r < d.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.features.cols(); ++c) out += format_double(d.features(r, c)) + ",";
    out += d.class_names[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(r)])] + "\n";
  }
  return out;
}

BalanceReport class_balance(std::size_t count0, std::size_t count1) {
  BalanceReport report;
  report.count_per_class = {count0, count1};
  const auto hi = std::max(count0, count1);
  const auto lo = std::min(count0, count1);
  report.minority_ratio = hi == 0 ? 0.0 : static_cast<double>(lo) / static_cast<double>(hi);
  report.recommended_group =
      report.minority_ratio >= kBalancedRatioThreshold ? MetricGroup::Balanced : MetricGroup::Imbalanced;
  return report;
}

BalanceReport class_balance(const Dataset& d) {
  std::size_t ones = static_cast<std::size_t>(std::count(d.labels.begin(), d.labels.end(), 1));
  return class_balance(d.size() - ones, ones);
}

bool is_allowed_fold_count(int k) {
  return std::find(kAllowedFoldCounts.begin(), kAllowedFoldCounts.end(), k) != kAllowedFoldCounts.end();
}

std::vector<std::size_t> Folds::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Folds::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

Folds stratified_kfold(const Dataset& d, int k, std::uint64_t seed) {
  if (!is_allowed_fold_count(k)) {
    throw Error(ErrorCode::InvalidArgument, "k must be one of 5, 10, 15; got " + std::to_string(k));
  }
  Folds folds;
  folds.k = k;
  folds.assignment.assign(d.size(), -1);
  Rng rng(derive_seed(seed, "folds"));
  // Round-robin within each shuffled class; the offset carries across classes
  // so fold sizes stay balanced overall.
  std::size_t offset = 0;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels[i] == cls) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::TooFewInstances, "class " + std::to_string(cls) + " has " +
                                                  std::to_string(members.size()) + " members, fewer than k=" +
                                                  std::to_string(k));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      folds.assignment[members[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    }
    offset = (offset + members.size()) % static_cast<std::size_t>(k);
  }
  return folds;
}

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> take(std::span<const int> v, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace evoml
