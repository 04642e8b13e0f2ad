#include "aqa/corpus/ingest.hpp"

#include <istream>

#include <nlohmann/json.hpp>

#include "aqa/text.hpp"

namespace aqa::corpus {

IngestReport ingest(std::istream& in, CorpusStore& store) {
    IngestReport report;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        Conversation c;
        try {
            c = conversation_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            report.rejected.push_back({lineno, std::string("malformed JSON: ") + e.what()});
            continue;
        } catch (const std::exception& e) {
            report.rejected.push_back({lineno, e.what()});
            continue;
        }
        if (store.find(c.id) != nullptr) {
            report.rejected.push_back({lineno, "duplicate id '" + c.id + "'"});
            continue;
        }
        store.add(std::move(c));
        ++report.accepted;
    }
    return report;
}

}  // namespace aqa::corpus
