#include "aqa/taxonomy/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "aqa/error.hpp"
#include "aqa/hash.hpp"
#include "aqa/random.hpp"

namespace aqa::taxonomy {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

namespace {

void check_points(const Matrix& points) {
    if (points.empty()) throw InvalidArgument("no points");
    const auto dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) throw InvalidArgument("points have different dimensions");
    }
}

std::size_t nearest(const std::vector<double>& p, const Matrix& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

double kmeans_objective(const Matrix& points, const std::vector<std::size_t>& assignments, const Matrix& centroids) {
    double j = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) j += squared_distance(points[i], centroids[assignments[i]]);
    return j;
}

namespace {

KMeansResult kmeans_once(const Matrix& points, std::size_t k, std::size_t max_iter, std::uint64_t seed) {
    const std::size_t n = points.size();
    Rng rng(seed);

    KMeansResult r;
    r.centroids.push_back(points[rng.below(n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], r.centroids[0]);
    while (r.centroids.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        const std::size_t next = total > 0.0 ? rng.weighted(d2) : rng.below(n);
        r.centroids.push_back(points[next]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], r.centroids.back()));
    }

    r.assignments.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) r.assignments[i] = nearest(points[i], r.centroids);
    const std::size_t dim = points.front().size();
    for (r.iterations = 0; r.iterations < max_iter;) {
        Matrix sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[r.assignments[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
            ++sizes[r.assignments[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
        }
        ++r.iterations;
        r.history.push_back(kmeans_objective(points, r.assignments, r.centroids));
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Keep the current centroid unless another is strictly closer.
            const std::size_t cur = r.assignments[i];
            const std::size_t c = nearest(points[i], r.centroids);
            if (c != cur && squared_distance(points[i], r.centroids[c]) < squared_distance(points[i], r.centroids[cur])) {
                r.assignments[i] = c;
                changed = true;
            }
        }
        if (!changed) {
            r.converged = true;
            break;
        }
    }
    r.objective = kmeans_objective(points, r.assignments, r.centroids);
    return r;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, std::size_t max_iter, std::uint64_t seed,
                    std::size_t restarts) {
    if (k == 0) throw InvalidArgument("k must be positive");
    if (k > points.size()) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of points (" +
                              std::to_string(points.size()) + ")");
    }
    if (restarts == 0) throw InvalidArgument("restarts must be positive");
    check_points(points);
    KMeansResult best = kmeans_once(points, k, max_iter, seed);
    for (std::size_t r = 1; r < restarts; ++r) {
        KMeansResult next = kmeans_once(points, k, max_iter, mix64(seed + r));
        if (next.objective < best.objective) best = std::move(next);
    }
    return best;
}

std::vector<double> silhouette_samples(const Matrix& points, const std::vector<std::size_t>& labels) {
    check_points(points);
    if (labels.size() != points.size()) throw InvalidArgument("one label per point is required");
    const std::set<std::size_t> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw InvalidArgument("silhouette needs at least 2 clusters");
    const std::size_t k = *distinct.rbegin() + 1;
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];

    const std::size_t n = points.size();
    std::vector<double> out(n, 0.0);
    std::vector<double> sum(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] == 1) continue;
        std::fill(sum.begin(), sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sum[labels[j]] += std::sqrt(squared_distance(points[i], points[j]));
        }
        const double a = sum[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != labels[i] && sizes[c] > 0) b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
        }
        const double m = std::max(a, b);
        out[i] = m > 0.0 ? (b - a) / m : 0.0;
    }
    return out;
}

double silhouette_score(const Matrix& points, const std::vector<std::size_t>& labels) {
    const auto s = silhouette_samples(points, labels);
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<std::size_t> select_k_silhouette(const Matrix& points, const std::vector<std::size_t>& ks,
                                             std::uint64_t seed, std::size_t top, std::size_t max_iter) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (auto k : ks) {
        if (k < 2 || k >= points.size()) {
            throw InvalidArgument("K = " + std::to_string(k) + " must be in [2, " + std::to_string(points.size() - 1) +
                                  "]");
        }
        const auto r = kmeans(points, k, max_iter, seed);
        if (std::set<std::size_t>(r.assignments.begin(), r.assignments.end()).size() < 2) continue;
        scored.emplace_back(silhouette_score(points, r.assignments), k);
    }
    if (scored.empty()) throw InvalidArgument("no candidate K realizes at least 2 clusters");
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scored.size() && i < top; ++i) out.push_back(scored[i].second);
    return out;
}

std::vector<std::vector<std::size_t>> group_by_cluster(const std::vector<std::size_t>& assignments, std::size_t k) {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] >= k) throw InvalidArgument("cluster id out of range");
        out[assignments[i]].push_back(i);
    }
    return out;
}

std::vector<std::vector<std::size_t>> round_robin_batches(const std::vector<std::vector<std::size_t>>& clusters,
                                                          std::size_t batch_size) {
    if (batch_size == 0) throw InvalidArgument("batch size must be positive");
    std::vector<std::size_t> cursor(clusters.size(), 0);
    std::size_t remaining = 0;
    for (const auto& c : clusters) remaining += c.size();
    std::vector<std::vector<std::size_t>> batches;
    std::vector<std::size_t> batch;
    std::size_t next = 0;
    while (remaining > 0) {
        const std::size_t c = next;
        next = (next + 1) % clusters.size();
        if (cursor[c] == clusters[c].size()) continue;
        batch.push_back(clusters[c][cursor[c]++]);
        --remaining;
        if (batch.size() == batch_size) batches.push_back(std::exchange(batch, {}));
    }
    if (!batch.empty()) batches.push_back(std::move(batch));
    return batches;
}

}  // namespace aqa::taxonomy
