#pragma once

#include "blockclust/core.hpp"
#include "blockclust/projection.hpp"
#include "blockclust/pvdbow.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace blockclust {

// Every knob of the pipeline, with the defaults the CLI starts from.
struct PipelineConfig {
    std::size_t top_k = 10000;
    FeatureScheme scheme = FeatureScheme::signature_group;
    double group_threshold = 1.5;
    TrainConfig train;
    bool normalize = true;
    double delta = 0.0; // 0 selects sweep mode
    double sweep_lo = 0.6;
    double sweep_hi = 1.0;
    double sweep_step = 0.01;
    LabelKind label = LabelKind::protocol;
    TsneConfig tsne;
};

// Record of one run: input content digests plus the full configuration.
// Artifacts embed the digest of the scope that produced them, so a stage
// can tell when an upstream artifact was built under different inputs or
// upstream settings. Downstream knobs (cut, labels, projection) stay out
// of the digests on purpose: re-cutting one embedding is a valid reuse.
struct RunManifest {
    std::string tool_version;
    std::string created_at; // not part of any digest
    std::map<std::string, std::string> inputs;      // logical name -> sha256
    std::map<std::string, std::string> input_paths; // logical name -> path, not digested
    PipelineConfig config;

    std::string extract_digest() const;   // inputs + top_k
    std::string feature_digest() const;   // + scheme, group threshold
    std::string embedding_digest() const; // + training settings
};

std::string file_sha256(const std::filesystem::path& path);

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

} // namespace blockclust
