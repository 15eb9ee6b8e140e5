#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoml/evaluator.hpp"

namespace evoml {

inline constexpr std::string_view kAnalyticsSchema = "evoml.analytics/1";

// ---------------------------------------------------------------------------
// Projections of the model space

enum class ProjectionMethod { MDS, TSNE };

std::string_view to_string(ProjectionMethod m);
std::optional<ProjectionMethod> projection_from_string(std::string_view name);

// Rows are models, columns the selected metrics after normalize().
Matrix metric_vectors(std::span<const EvaluatedModel* const> models, std::span<const MetricId> selected);

struct MdsResult {
  Matrix coords;       // n x 2
  Vector eigenvalues;  // of the double-centred Gram matrix, descending
  bool degenerate = false;  // fewer than two positive eigenvalues; missing axes are zero
  double stress = 0.0;      // Kruskal stress-1 against the input distances
};

// Classical (Torgerson) MDS. Each axis is oriented so its first nonzero loading is positive.
MdsResult classical_mds_from_distances(const Matrix& distances);
MdsResult classical_mds(const Matrix& points);

struct PerplexityCalibration {
  std::vector<double> probabilities;  // conditional P(j|i), sums to 1
  double beta = 1.0;                  // precision 1 / (2 sigma^2)
  double entropy = 0.0;               // natural-log Shannon entropy
};

// Binary search on beta until entropy matches log(perplexity).
PerplexityCalibration calibrate_perplexity(std::span<const double> squared_distances, double perplexity);

struct TsneOptions {
  double perplexity = 30.0;
  int iterations = 1000;
  std::uint64_t seed = 0;
  double learning_rate = 0.0;  // <= 0 picks max(n / early_exaggeration / 4, 50)
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
};

struct TsneResult {
  Matrix coords;  // n x 2
  double kl_divergence = 0.0;
  double max_entropy_error = 0.0;
};

// Exact-gradient t-SNE. Throws TooFewPoints when n < 3 * perplexity.
TsneResult tsne(const Matrix& points, const TsneOptions& options);

struct Projection {
  ProjectionMethod method = ProjectionMethod::MDS;
  std::vector<std::string> model_ids;
  std::vector<std::array<double, 2>> coords;
  double diagnostic = 0.0;  // stress for MDS, KL divergence for t-SNE
  bool degenerate = false;
};

Projection project_mds(std::span<const EvaluatedModel* const> models, std::span<const MetricId> selected);
Projection project_tsne(std::span<const EvaluatedModel* const> models, std::span<const MetricId> selected,
                        double perplexity, int iterations, std::uint64_t seed);

// ---------------------------------------------------------------------------
// K-means

struct KMeansResult {
  Matrix centroids;                    // k x d
  std::vector<int> assignment;         // per point
  std::vector<double> objective_history;  // after every assignment step
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Empty clusters are reseeded from
// the points farthest from their centroids.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations = 300);

// ---------------------------------------------------------------------------
// Instance grid

inline constexpr std::size_t kGridClusterThreshold = 169;
inline constexpr int kGridCells = 100;
inline constexpr std::string_view kAllAlgorithmsKey = "all";

struct GridCell {
  std::vector<std::size_t> members;
  std::array<std::size_t, 2> class_counts{};
  int class_label = -1;  // set when unclustered (one instance per cell)
  // Keyed by algorithm name or "all". Empty cells and empty selections give nullopt.
  std::map<std::string, std::optional<double>> power;
  std::map<std::string, std::optional<double>> selected_power;
  std::map<std::string, std::optional<double>> difference;
};

struct InstanceGrid {
  bool clustered = false;
  std::vector<int> assignment;  // instance -> cell
  std::vector<GridCell> cells;

  std::size_t cell_count() const { return cells.size(); }
};

// Clusters iff some class has at least kGridClusterThreshold instances.
bool grid_needs_clustering(const Dataset& d);

InstanceGrid build_grid(const Dataset& d, std::span<const EvaluatedModel* const> all_models,
                        std::span<const EvaluatedModel* const> selected_models, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Beeswarm and bean series

struct BeanSeries {
  MetricId metric;
  std::vector<double> all_values;
  std::vector<double> selection_values;
  double all_mean = 0.0;
  std::optional<double> selection_mean;
};

struct Panels {
  std::map<Algorithm, std::vector<std::pair<std::string, double>>> beeswarm;  // descending overall
  std::vector<BeanSeries> beans;
};

Panels aggregate_panels(std::span<const EvaluatedModel* const> all_models,
                        std::span<const EvaluatedModel* const> selection, std::span<const MetricId> metrics);

}  // namespace evoml
