#pragma once

#include "blockclust/core.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace blockclust {

struct TsneConfig {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::uint64_t seed = 42;
    double learning_rate = 0.0; // <= 0 picks max(n/48, 50)

    void validate() const;
};

// Row order follows the embedding matrix (block_id ascending).
struct Projection {
    std::vector<std::string> block_ids;
    std::vector<std::array<double, 2>> coords;
};

// Exact-gradient t-SNE. Per-point bandwidths are binary-searched to match
// the perplexity; affinities are symmetrized; gradient descent runs with
// early exaggeration (12x for the first 250 iterations) and momentum
// (0.5, then 0.8). Once exaggeration ends, any step that raises the KL
// objective is rolled back and retried with a halved step, so the
// objective trace is non-increasing from there on. Coordinates start from
// a PCA projection and come back centered. Deterministic given the seed.
// `kl_trace`, when given, receives the objective after each accepted step.
Projection tsne(const EmbeddingMatrix& matrix, const TsneConfig& cfg = {},
                std::vector<double>* kl_trace = nullptr);

struct ProjectedPoint {
    std::string block_id;
    double x = 0.0;
    double y = 0.0;
    std::string label; // empty renders in the reserved unlabeled style
};

// Writes projection.csv (block_id,x,y,label) and a self-contained SVG
// scatter: one color per label, marker shapes cycling once the palette is
// exhausted, plus a legend. `manifest_digest`, when nonempty, is embedded
// in both files.
void export_plot(const std::vector<ProjectedPoint>& points,
                 const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
                 const std::string& manifest_digest = "");

} // namespace blockclust
