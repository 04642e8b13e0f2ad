#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/error.hpp"

namespace aqa::pipeline {

/// An input changed after an artifact was built from it.
class StaleArtifact : public Error {
public:
    using Error::Error;
};

/// sha256 of a file, or of the sorted (relative path, file hash) list of a
/// directory. Throws NotFound.
std::string content_hash(const std::filesystem::path& p);

struct ArtifactRecord {
    std::string stage;
    std::string sha256;
    std::map<std::string, std::string> inputs;  ///< path -> sha256 at build time
    nlohmann::json params;
};

/// manifest.json of a work directory: how each artifact was produced.
/// Artifact paths are relative to the work directory; inputs outside it
/// are stored as given.
class Manifest {
public:
    explicit Manifest(std::filesystem::path work_dir);

    const std::filesystem::path& work_dir() const noexcept { return dir_; }
    std::filesystem::path path(const std::string& artifact) const { return dir_ / artifact; }

    const ArtifactRecord* find(const std::string& artifact) const;

    /// Throws NotFound naming the artifact and the stage that makes it
    /// when it is missing; StaleArtifact when it or one of its recorded
    /// inputs changed since it was built (unless force).
    void require(const std::string& artifact, const std::string& producer, bool force) const;

    /// Hashes the artifact and its inputs and saves the manifest.
    void record(const std::string& artifact, const std::string& stage, const std::vector<std::string>& inputs,
                nlohmann::json params = nlohmann::json::object());

    /// Input path as stored in records: relative for work-dir artifacts.
    std::string key_of(const std::filesystem::path& p) const;

private:
    std::filesystem::path resolve(const std::string& key) const;
    void save() const;

    std::filesystem::path dir_;
    std::map<std::string, ArtifactRecord> records_;
};

}  // namespace aqa::pipeline
