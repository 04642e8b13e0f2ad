#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqa::eval {

/// Linear gain uses the grade itself, exponential uses 2^grade - 1.
enum class Gain { Linear, Exponential };
Gain parse_gain(std::string_view name);
std::string_view gain_name(Gain g) noexcept;

/// NDCG@k of grades listed in predicted order, against the same grades
/// sorted descending. 1.0 when the ideal DCG is 0. Throws InvalidArgument
/// when k == 0.
double ndcg_from_grades(std::span<const std::uint64_t> grades_in_order, std::size_t k, Gain gain = Gain::Linear);

/// predicted_order must list every graded id exactly once. Throws
/// InvalidArgument otherwise or when k == 0.
double ndcg_at_k(const std::vector<std::string>& predicted_order, const std::map<std::string, std::uint64_t>& grades,
                 std::size_t k, Gain gain = Gain::Linear);

/// |top-k ∩ oracle| / |oracle|. Throws InvalidArgument on an empty oracle.
double recall_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& oracle, std::size_t k);

struct BaselineEstimate {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation over trials
};

/// NDCG@k of uniformly random orderings, estimated from `trials` seeded
/// permutations. Throws InvalidArgument when trials == 0 or grades are empty.
BaselineEstimate random_baseline(std::vector<std::uint64_t> grades, std::size_t k = 10, std::size_t trials = 10000,
                                 std::uint64_t seed = 0, Gain gain = Gain::Linear);

/// One-sided 90% normal quantile.
inline constexpr double kQcZ = 1.2816;

/// min(1, max(0, s_random + z * s_std)). Throws InvalidArgument on s_std < 0.
double qc_threshold(double s_random, double s_std);

struct QCDecision {
    double s_no_context = 0.0;
    double s_raw_context = 0.0;
    double s_summary_context = 0.0;
    double s_context = 0.0;
    double s_random = 0.0;
    double s_std = 0.0;
    double s_threshold = 0.0;
    double z = kQcZ;
    bool keep = true;
};

/// Drops a question only when context does not improve on no context and
/// stays below the random-baseline threshold.
QCDecision qc_filter(double s_no_context, double s_raw_context, double s_summary_context, double s_random,
                     double s_std);

/// Cohen's kappa of two binary labelings; nullopt when chance agreement is 1.
/// Throws InvalidArgument on a length mismatch or empty input.
std::optional<double> cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

struct KappaReport {
    std::map<std::string, std::optional<double>> per_category;
    std::optional<double> macro;  ///< mean over categories where kappa is defined
};

/// Per-category kappa. Both sides must have the same categories and the
/// same item count everywhere; throws InvalidArgument otherwise.
KappaReport cohen_kappa(const std::map<std::string, std::vector<bool>>& a,
                        const std::map<std::string, std::vector<bool>>& b);

}  // namespace aqa::eval
