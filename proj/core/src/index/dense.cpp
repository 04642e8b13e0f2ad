#include "aqa/index/dense.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "aqa/error.hpp"

namespace aqa::index {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "vectors.bin is written in host order");

namespace {

constexpr int kFormatVersion = 1;
constexpr double kUnitTolerance = 1e-6;

}  // namespace

EmbeddingVector normalized(EmbeddingVector v) {
    if (v.empty()) throw InvalidArgument("empty embedding");
    double sq = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw InvalidArgument("embedding has a non-finite entry");
        sq += x * x;
    }
    if (sq == 0.0) throw InvalidArgument("zero embedding cannot be normalized");
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

DenseIndex::DenseIndex(std::vector<IndexDocument> docs, const std::vector<EmbeddingVector>& vectors) {
    if (docs.size() != vectors.size()) {
        throw InvalidArgument("got " + std::to_string(vectors.size()) + " vectors for " + std::to_string(docs.size()) +
                              " documents");
    }
    if (docs.empty()) throw InvalidArgument("cannot build a dense index over an empty corpus");
    dim_ = vectors.front().size();
    data_.reserve(dim_ * vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim_) {
            throw InvalidArgument("dimension mismatch for '" + docs[i].id + "': " + std::to_string(vectors[i].size()) +
                                  " vs " + std::to_string(dim_));
        }
        auto v = normalized(vectors[i]);
        data_.insert(data_.end(), v.begin(), v.end());
    }
    table_ = DocTable(std::move(docs));
}

std::span<const double> DenseIndex::vector(std::size_t doc) const {
    if (doc >= table_.size()) throw InvalidArgument("document position out of range");
    return {data_.data() + doc * dim_, dim_};
}

std::vector<ScoredDoc> DenseIndex::search(std::span<const double> query, const MetadataFilter& filter,
                                          std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be positive");
    if (query.size() != dim_) {
        throw InvalidArgument("query dimension " + std::to_string(query.size()) + " does not match index dimension " +
                              std::to_string(dim_));
    }
    if (std::abs(std::sqrt(dot(query, query)) - 1.0) > kUnitTolerance) {
        throw InvalidArgument("query vector is not unit norm");
    }
    std::vector<std::pair<std::size_t, double>> scored;
    const auto consider = [&](std::size_t i) { scored.emplace_back(i, dot(query, vector(i))); };
    if (filter.empty()) {
        scored.reserve(table_.size());
        for (std::size_t i = 0; i < table_.size(); ++i) consider(i);
    } else {
        for (auto i : table_.passing(filter)) consider(i);
    }
    return table_.pool_top_k(scored, k);
}

void DenseIndex::save(const std::string& dir) const {
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "meta.json");
        json meta = {{"format", "aqa-dense"}, {"version", kFormatVersion}, {"dim", dim_}, {"documents", table_.size()}};
        out << meta.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "docs.jsonl");
        for (const auto& d : table_.docs()) out << to_json(d).dump() << '\n';
    }
    std::ofstream out(fs::path(dir) / "vectors.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(double)));
    if (!out) throw Error("failed writing dense index to '" + dir + "'");
}

DenseIndex DenseIndex::load(const std::string& dir) {
    DenseIndex idx;
    std::vector<IndexDocument> docs;
    try {
        std::ifstream min(fs::path(dir) / "meta.json");
        if (!min) throw NotFound("cannot open '" + (fs::path(dir) / "meta.json").string() + "'");
        const json meta = json::parse(min);
        if (meta.at("format") != "aqa-dense") throw ParseError("'" + dir + "' is not a dense index");
        if (meta.at("version").get<int>() != kFormatVersion) {
            throw ParseError("unsupported dense index version " + meta.at("version").dump());
        }
        idx.dim_ = meta.at("dim").get<std::size_t>();
        std::ifstream din(fs::path(dir) / "docs.jsonl");
        if (!din) throw NotFound("cannot open '" + (fs::path(dir) / "docs.jsonl").string() + "'");
        for (std::string line; std::getline(din, line);) {
            if (!line.empty()) docs.push_back(document_from_json(json::parse(line)));
        }
    } catch (const json::exception& e) {
        throw ParseError("corrupt dense index '" + dir + "': " + e.what());
    }
    const fs::path vpath = fs::path(dir) / "vectors.bin";
    std::ifstream vin(vpath, std::ios::binary);
    if (!vin) throw NotFound("cannot open '" + vpath.string() + "'");
    idx.data_.resize(idx.dim_ * docs.size());
    vin.read(reinterpret_cast<char*>(idx.data_.data()), static_cast<std::streamsize>(idx.data_.size() * sizeof(double)));
    if (vin.gcount() != static_cast<std::streamsize>(idx.data_.size() * sizeof(double)) || vin.peek() != EOF) {
        throw ParseError("'" + vpath.string() + "' does not hold " + std::to_string(docs.size()) + " vectors");
    }
    idx.table_ = DocTable(std::move(docs));
    return idx;
}

std::vector<std::pair<std::string, EmbeddingVector>> read_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open embeddings file '" + path + "'");
    std::vector<std::pair<std::string, EmbeddingVector>> rows;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            rows.emplace_back(j.at("id").get<std::string>(), j.at("vector").get<EmbeddingVector>());
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

void write_embeddings(const std::string& path, const std::vector<std::pair<std::string, EmbeddingVector>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    for (const auto& [id, v] : rows) out << json{{"id", id}, {"vector", v}}.dump() << '\n';
}

}  // namespace aqa::index
