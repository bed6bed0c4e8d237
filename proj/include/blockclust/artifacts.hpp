#pragma once

#include "blockclust/clustering.hpp"
#include "blockclust/core.hpp"
#include "blockclust/extraction.hpp"
#include "blockclust/featurization.hpp"
#include "blockclust/labeling.hpp"
#include "blockclust/pvdbow.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace blockclust {

// Stage files. CSV artifacts start with a "# manifest=<hex>" comment and
// JSONL artifacts with a {"manifest": "<hex>"} line. Readers compare that
// digest against `expected` and throw ManifestMismatch when it differs;
// an empty `expected` skips the check.

void write_blocks(const std::filesystem::path& path, const Corpus& corpus,
                  const std::string& digest);
Corpus read_blocks(const std::filesystem::path& path, const std::string& expected = "");

struct FeatureTable {
    FeatureScheme scheme = FeatureScheme::none;
    std::map<std::string, std::vector<std::int64_t>> tokens; // block_id -> per-node tokens
};

void write_features(const std::filesystem::path& path, const Corpus& corpus,
                    const std::vector<FeatureAssignment>& features, const std::string& digest);
FeatureTable read_features(const std::filesystem::path& path, const std::string& expected = "");

void write_groups(const std::filesystem::path& path, const SignatureGroups& groups,
                  const std::string& digest);
SignatureGroups read_groups(const std::filesystem::path& path, double threshold,
                            const std::string& expected = "");

void write_labels(const std::filesystem::path& path, const LabelBundle& bundle,
                  const std::string& digest);
struct LabelTable {
    LabelSet protocol; // labeled roots only
    LabelSet ffc;
};
LabelTable read_labels(const std::filesystem::path& path, const std::string& expected = "");

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& matrix,
                      const std::string& digest);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path,
                                const std::string& expected = "");

void write_vocab(const std::filesystem::path& path, const std::vector<VocabEntry>& vocab,
                 const std::string& digest);

void write_clusters(const std::filesystem::path& path, const ClusterAssignment& assignment,
                    double delta, const std::string& digest);
struct ClusterTable {
    ClusterAssignment assignment;
    double delta = 0.0;
};
ClusterTable read_clusters(const std::filesystem::path& path, const std::string& expected = "");

void write_sweep(const std::filesystem::path& path, const SweepResult& result,
                 const std::string& digest);

} // namespace blockclust
