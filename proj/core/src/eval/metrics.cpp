#include "aqa/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "aqa/error.hpp"
#include "aqa/random.hpp"

namespace aqa::eval {

Gain parse_gain(std::string_view name) {
    if (name == "linear") return Gain::Linear;
    if (name == "exponential") return Gain::Exponential;
    throw InvalidArgument("unknown gain '" + std::string(name) + "' (expected linear or exponential)");
}

std::string_view gain_name(Gain g) noexcept { return g == Gain::Linear ? "linear" : "exponential"; }

namespace {

double gain_of(std::uint64_t grade, Gain g) {
    const double x = static_cast<double>(grade);
    return g == Gain::Linear ? x : std::exp2(x) - 1.0;
}

double dcg(std::span<const std::uint64_t> grades, std::size_t k, Gain g) {
    double s = 0.0;
    const std::size_t n = std::min(k, grades.size());
    for (std::size_t i = 0; i < n; ++i) s += gain_of(grades[i], g) / std::log2(static_cast<double>(i) + 2.0);
    return s;
}

}  // namespace

double ndcg_from_grades(std::span<const std::uint64_t> grades_in_order, std::size_t k, Gain gain) {
    if (k == 0) throw InvalidArgument("k must be positive");
    std::vector<std::uint64_t> ideal(grades_in_order.begin(), grades_in_order.end());
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    const double idcg = dcg(ideal, k, gain);
    if (idcg == 0.0) return 1.0;
    return dcg(grades_in_order, k, gain) / idcg;
}

double ndcg_at_k(const std::vector<std::string>& predicted_order, const std::map<std::string, std::uint64_t>& grades,
                 std::size_t k, Gain gain) {
    if (predicted_order.size() != grades.size()) {
        throw InvalidArgument("predicted order has " + std::to_string(predicted_order.size()) + " ids, expected " +
                              std::to_string(grades.size()));
    }
    std::vector<std::uint64_t> ordered;
    ordered.reserve(grades.size());
    std::set<std::string> seen;
    for (const auto& id : predicted_order) {
        auto it = grades.find(id);
        if (it == grades.end()) throw InvalidArgument("predicted order contains unknown id '" + id + "'");
        if (!seen.insert(id).second) throw InvalidArgument("predicted order repeats '" + id + "'");
        ordered.push_back(it->second);
    }
    return ndcg_from_grades(ordered, k, gain);
}

double recall_at_k(const std::vector<std::string>& retrieved, const std::set<std::string>& oracle, std::size_t k) {
    if (oracle.empty()) throw InvalidArgument("recall needs a nonempty oracle set");
    std::set<std::string> hit;
    const std::size_t n = std::min(k, retrieved.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (oracle.contains(retrieved[i])) hit.insert(retrieved[i]);
    }
    return static_cast<double>(hit.size()) / static_cast<double>(oracle.size());
}

BaselineEstimate random_baseline(std::vector<std::uint64_t> grades, std::size_t k, std::size_t trials,
                                 std::uint64_t seed, Gain gain) {
    if (trials == 0) throw InvalidArgument("trials must be positive");
    if (grades.empty()) throw InvalidArgument("random baseline needs grades");
    Rng rng(seed);
    // Welford keeps the variance accurate for large trial counts.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t t = 1; t <= trials; ++t) {
        rng.shuffle(grades);
        const double x = ndcg_from_grades(grades, k, gain);
        const double d = x - mean;
        mean += d / static_cast<double>(t);
        m2 += d * (x - mean);
    }
    const double var = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
    return {mean, std::sqrt(std::max(0.0, var))};
}

double qc_threshold(double s_random, double s_std) {
    if (s_std < 0.0) throw InvalidArgument("s_std must be nonnegative");
    return std::min(1.0, std::max(0.0, s_random + kQcZ * s_std));
}

QCDecision qc_filter(double s_no_context, double s_raw_context, double s_summary_context, double s_random,
                     double s_std) {
    QCDecision d;
    d.s_no_context = s_no_context;
    d.s_raw_context = s_raw_context;
    d.s_summary_context = s_summary_context;
    d.s_context = std::max(s_raw_context, s_summary_context);
    d.s_random = s_random;
    d.s_std = s_std;
    d.s_threshold = qc_threshold(s_random, s_std);
    const bool no_gain = d.s_context - d.s_no_context <= 0.0;
    const bool below = d.s_context < d.s_threshold;
    d.keep = !(no_gain && below);
    return d;
}

std::optional<double> cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("labelings have " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                              " items");
    }
    if (a.empty()) throw InvalidArgument("kappa needs at least one item");
    const double n = static_cast<double>(a.size());
    double agree = 0, ya = 0, yb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        agree += a[i] == b[i];
        ya += a[i];
        yb += b[i];
    }
    const double po = agree / n;
    const double pe = (ya / n) * (yb / n) + (1 - ya / n) * (1 - yb / n);
    if (pe >= 1.0) return std::nullopt;
    return (po - pe) / (1.0 - pe);
}

KappaReport cohen_kappa(const std::map<std::string, std::vector<bool>>& a,
                        const std::map<std::string, std::vector<bool>>& b) {
    if (a.size() != b.size() || !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
            return x.first == y.first;
        })) {
        throw InvalidArgument("labelings cover different categories");
    }
    KappaReport r;
    std::optional<std::size_t> items;
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& [cat, la] : a) {
        const auto& lb = b.at(cat);
        if (items && la.size() != *items) throw InvalidArgument("category '" + cat + "' has a different item count");
        items = la.size();
        const auto k = cohen_kappa(la, lb);
        r.per_category[cat] = k;
        if (k) {
            sum += *k;
            ++defined;
        }
    }
    if (defined > 0) r.macro = sum / static_cast<double>(defined);
    return r;
}

}  // namespace aqa::eval
