#pragma once

#include <aqa/probe/probe.hpp>

#include <algorithm>
#include <map>
#include <vector>

namespace aqa::oracle {

// Every query searched on its own, then the best score per conversation.
inline std::vector<index::ScoredDoc> union_max_oracle(const probe::Retriever& r, const probe::BroadQuerySet& bqs,
                                                     std::size_t per_k, std::size_t final_k) {
    std::map<std::string, index::ScoredDoc> best;
    for (std::size_t q = 0; q < bqs.queries.size(); ++q) {
        for (auto d : r.search(bqs.queries[q], bqs.filters, per_k)) {
            d.source_query_index = static_cast<int>(q);
            auto it = best.find(d.doc_id);
            if (it == best.end() || d.score > it->second.score) best[d.doc_id] = d;
        }
    }
    std::vector<index::ScoredDoc> out;
    for (auto& [_, d] : best) out.push_back(d);
    std::sort(out.begin(), out.end(), index::ranks_before);
    if (out.size() > final_k) out.resize(final_k);
    return out;
}

}  // namespace aqa::oracle
