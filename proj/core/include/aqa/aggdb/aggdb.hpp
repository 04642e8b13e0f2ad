#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/attribute.hpp"
#include "aqa/corpus/conversation.hpp"
#include "aqa/time.hpp"

namespace aqa::aggdb {

inline constexpr std::size_t kMaxConditions = 3;
inline constexpr std::size_t kDefaultCandidates = 10;

/// attribute = value. Time values are periods ("2023-04", "2023-W17",
/// "2023-04-26" or "begin/end").
struct Condition {
    Attribute attribute = Attribute::Location;
    std::string value;

    friend auto operator<=>(const Condition&, const Condition&) = default;
};

/// Up to three conditions. A repeated single-valued attribute means "any of
/// these values" (user=a, user=b selects both users' conversations); a
/// repeated multi-valued attribute means "all of these values".
struct ConditionSet {
    std::vector<Condition> conditions;

    bool has(Attribute a) const noexcept;
    /// Throws InvalidArgument when there are more than three conditions or a
    /// time value is not a period.
    void validate() const;
    /// "location=United States, topic=Gaming"; "" when empty.
    std::string describe() const;
    friend bool operator==(const ConditionSet&, const ConditionSet&) = default;
};

nlohmann::json to_json(const ConditionSet& c);
ConditionSet condition_set_from_json(const nlohmann::json& j);

struct AggregationRow {
    std::string value;
    std::size_t count = 0;
    friend bool operator==(const AggregationRow&, const AggregationRow&) = default;
};

struct AggregationResult {
    Attribute target = Attribute::Topic;
    std::vector<AggregationRow> rows;  ///< count descending, value ascending
    std::size_t support = 0;           ///< matching conversations
    friend bool operator==(const AggregationResult&, const AggregationResult&) = default;
};

struct Candidate {
    std::string value;
    std::uint64_t grade = 0;
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateSet {
    std::vector<Candidate> candidates;        ///< graded first (by count), then padding
    std::vector<std::string> supporting_ids;  ///< store order
    friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

/// Sorts rows by count descending, value ascending.
void sort_rows(std::vector<AggregationRow>& rows);

/// Read-only query layer over a corpus store. The store must outlive it.
class AggDb {
public:
    explicit AggDb(const corpus::CorpusStore& store, TimeGranularity time_granularity = TimeGranularity::Month);

    const corpus::CorpusStore& store() const noexcept { return *store_; }
    TimeGranularity time_granularity() const noexcept { return granularity_; }

    /// Distinct values of an attribute for the conversation at a store position.
    const std::vector<std::string>& values(std::size_t pos, Attribute a) const;

    bool matches(std::size_t pos, const ConditionSet& cond) const;
    std::vector<std::size_t> match_positions(const ConditionSet& cond) const;
    std::vector<std::string> match(const ConditionSet& cond) const;

    /// Throws InvalidArgument when the target is also a condition attribute.
    AggregationResult aggregate(const ConditionSet& cond, Attribute target) const;

    /// Corpus-wide value counts of an attribute, sorted like aggregation rows.
    const std::vector<AggregationRow>& global_distribution(Attribute a) const;

    /// Top n values graded by count; with fewer than n distinct values the
    /// rest is padded with grade-0 values drawn from the global distribution
    /// of the target, weighted by frequency. Supporting ids are the matching
    /// conversations holding at least one graded value.
    CandidateSet build_candidates(const ConditionSet& cond, Attribute target, std::size_t n = kDefaultCandidates,
                                  std::uint64_t seed = 0) const;

private:
    const corpus::CorpusStore* store_;
    TimeGranularity granularity_;
    std::vector<std::vector<std::vector<std::string>>> values_;  ///< [attribute][pos]
    std::vector<std::vector<AggregationRow>> global_;
};

}  // namespace aqa::aggdb
