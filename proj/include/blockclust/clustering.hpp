#pragma once

#include "blockclust/core.hpp"
#include "blockclust/linkage.hpp"

#include <string>
#include <vector>

namespace blockclust {

// Ward linkage over embedding rows. Leaves are the rows in block_id
// order, so cluster ids ordered by smallest leaf are ordered by smallest
// block_id.
struct EmbeddingLinkage {
    std::vector<std::string> block_ids;
    Dendrogram dendrogram;
};

struct SweepPoint {
    double delta = 0.0;
    int n_clusters = 0;
    Metrics metrics;
};

// Per-delta metrics plus the best delta: the one attaining the maximum
// V-measure, ties resolved towards the smallest delta.
struct SweepResult {
    std::vector<SweepPoint> points;
    double best_delta = 0.0;
    int best_n_clusters = 0;
    Metrics best_metrics;
};

// Pairwise Euclidean distances plus Ward linkage, computed once so many
// cuts can reuse it. Rows are scaled to unit norm first when `normalize`
// is set (zero rows are left alone).
EmbeddingLinkage embedding_linkage(const EmbeddingMatrix& matrix, bool normalize = true);

// Flat clusters from merges strictly below `delta`; ids contiguous from 0
// ordered by smallest member block_id.
ClusterAssignment cut_assignment(const EmbeddingLinkage& linkage, double delta);

ClusterAssignment cluster(const EmbeddingMatrix& matrix, double delta, bool normalize = true);

// cluster() at every delta in {lo, lo+step, ..., hi} against one linkage,
// each cut scored with the full metric set.
SweepResult sweep(const EmbeddingMatrix& matrix, const LabelSet& labels, double lo = 0.6,
                  double hi = 1.0, double step = 0.01, bool normalize = true);

} // namespace blockclust
