#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aqa::taxonomy {

using Matrix = std::vector<std::vector<double>>;  ///< one row per point

struct KMeansResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    double objective = 0.0;        ///< sum of squared distances to assigned centroids
    std::vector<double> history;   ///< objective after every Lloyd iteration
    std::size_t iterations = 0;
    bool converged = false;
};

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) noexcept;

/// k-means++ seeding followed by Lloyd iterations until assignments stop
/// changing or max_iter is reached. An emptied cluster keeps its centroid.
/// Runs `restarts` seeded initializations and keeps the lowest objective.
/// Throws InvalidArgument unless 1 <= k <= points and rows share a dimension.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::size_t max_iter = 100, std::uint64_t seed = 0,
                    std::size_t restarts = 10);

/// Sum of squared distances of each point to its centroid.
double kmeans_objective(const Matrix& points, const std::vector<std::size_t>& assignments, const Matrix& centroids);

/// Per-point silhouette with Euclidean distance; points in singleton
/// clusters score 0. Throws InvalidArgument with fewer than 2 clusters.
std::vector<double> silhouette_samples(const Matrix& points, const std::vector<std::size_t>& labels);
double silhouette_score(const Matrix& points, const std::vector<std::size_t>& labels);

/// Clusters every K and returns up to `top` Ks by mean silhouette,
/// best first (ties: smaller K). Throws InvalidArgument when a K is below 2
/// or not below the number of points.
std::vector<std::size_t> select_k_silhouette(const Matrix& points,
                                             const std::vector<std::size_t>& ks = {10, 15, 20, 25, 30, 35, 40},
                                             std::uint64_t seed = 0, std::size_t top = 3,
                                             std::size_t max_iter = 100);

/// Item indices per cluster, ascending.
std::vector<std::vector<std::size_t>> group_by_cluster(const std::vector<std::size_t>& assignments, std::size_t k);

/// Batches of at most batch_size items taking one item per cluster in
/// rotation, skipping exhausted clusters, until every cluster is drained.
std::vector<std::vector<std::size_t>> round_robin_batches(const std::vector<std::vector<std::size_t>>& clusters,
                                                          std::size_t batch_size);

}  // namespace aqa::taxonomy
