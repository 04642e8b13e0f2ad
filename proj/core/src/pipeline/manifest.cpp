#include "aqa/pipeline/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "aqa/hash.hpp"

namespace aqa::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest.json";

std::string file_hash(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw NotFound("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

}  // namespace

std::string content_hash(const fs::path& p) {
    if (!fs::exists(p)) throw NotFound("'" + p.string() + "' does not exist");
    if (!fs::is_directory(p)) return file_hash(p);
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) entries.emplace_back(fs::relative(e.path(), p).generic_string(), file_hash(e.path()));
    }
    std::sort(entries.begin(), entries.end());
    std::string joined;
    for (const auto& [name, h] : entries) joined += name + "\t" + h + "\n";
    return sha256_hex(joined);
}

Manifest::Manifest(fs::path work_dir) : dir_(std::move(work_dir)) {
    const auto file = dir_ / kManifestFile;
    if (!fs::exists(file)) return;
    std::ifstream in(file);
    try {
        const json j = json::parse(in);
        for (const auto& [name, r] : j.at("artifacts").items()) {
            ArtifactRecord rec;
            rec.stage = r.at("stage").get<std::string>();
            rec.sha256 = r.at("sha256").get<std::string>();
            rec.inputs = r.at("inputs").get<std::map<std::string, std::string>>();
            rec.params = r.value("params", json::object());
            records_.emplace(name, std::move(rec));
        }
    } catch (const json::exception& e) {
        throw ParseError("manifest '" + file.string() + "': " + e.what());
    }
}

const ArtifactRecord* Manifest::find(const std::string& artifact) const {
    auto it = records_.find(artifact);
    return it == records_.end() ? nullptr : &it->second;
}

fs::path Manifest::resolve(const std::string& key) const {
    fs::path p(key);
    return p.is_relative() ? dir_ / p : p;
}

std::string Manifest::key_of(const fs::path& p) const {
    if (p.is_relative()) return p.generic_string();
    const auto rel = fs::relative(p, dir_);
    if (!rel.empty() && rel.native().rfind("..", 0) != 0) return rel.generic_string();
    return p.generic_string();
}

void Manifest::require(const std::string& artifact, const std::string& producer, bool force) const {
    const auto p = resolve(artifact);
    if (!fs::exists(p)) {
        throw NotFound("missing artifact '" + p.string() + "': run `aqa " + producer + "` first");
    }
    if (force) return;
    const auto* rec = find(artifact);
    if (!rec) return;
    if (content_hash(p) != rec->sha256) {
        throw StaleArtifact("artifact '" + artifact + "' was modified after `aqa " + rec->stage +
                            "` wrote it; rerun that stage or pass --force");
    }
    for (const auto& [in, h] : rec->inputs) {
        const auto ip = resolve(in);
        if (!fs::exists(ip) || content_hash(ip) != h) {
            throw StaleArtifact("artifact '" + artifact + "' is stale: input '" + in + "' changed since `aqa " +
                                rec->stage + "` ran; rerun it or pass --force");
        }
    }
}

void Manifest::record(const std::string& artifact, const std::string& stage, const std::vector<std::string>& inputs,
                      json params) {
    ArtifactRecord rec;
    rec.stage = stage;
    rec.sha256 = content_hash(resolve(artifact));
    for (const auto& in : inputs) rec.inputs[in] = content_hash(resolve(in));
    rec.params = std::move(params);
    records_[artifact] = std::move(rec);
    save();
}

void Manifest::save() const {
    json arts = json::object();
    for (const auto& [name, r] : records_) {
        arts[name] = {{"stage", r.stage}, {"sha256", r.sha256}, {"inputs", r.inputs}, {"params", r.params}};
    }
    fs::create_directories(dir_);
    const auto file = dir_ / kManifestFile;
    const auto tmp = dir_ / (std::string(kManifestFile) + ".tmp");
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << json{{"format", "aqa-manifest"}, {"version", 1}, {"artifacts", arts}}.dump(2) << '\n';
    }
    fs::rename(tmp, file);
}

}  // namespace aqa::pipeline
