#pragma once

// Direct DCG sums for NDCG checks, linear gain, log2(i + 1) discount.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace aqa::oracle {

inline double brute_dcg(const std::vector<std::uint64_t>& grades_in_order, std::size_t k) {
    double dcg = 0.0;
    for (std::size_t i = 1; i <= k && i <= grades_in_order.size(); ++i)
        dcg += static_cast<double>(grades_in_order[i - 1]) / std::log2(static_cast<double>(i) + 1.0);
    return dcg;
}

inline double brute_ndcg(const std::vector<std::uint64_t>& grades_in_order, std::size_t k) {
    auto ideal = grades_in_order;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    const double idcg = brute_dcg(ideal, k);
    return idcg == 0.0 ? 1.0 : brute_dcg(grades_in_order, k) / idcg;
}

}  // namespace aqa::oracle
