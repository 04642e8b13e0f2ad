#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "aqa/corpus/conversation.hpp"

namespace aqa::corpus {

struct LineError {
    std::size_t line = 0;  ///< 1-based
    std::string message;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::vector<LineError> rejected;
};

/// Reads line-delimited conversation records into `store`. Malformed lines
/// and duplicate ids are reported per line and skipped; blank lines are ignored.
IngestReport ingest(std::istream& in, CorpusStore& store);

}  // namespace aqa::corpus
