#pragma once

#include "blockclust/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace blockclust {

// Label x cluster count table over the evaluated blocks: those present in
// both the assignment and the label set, minus the FFC "Others" category.
struct Contingency {
    std::vector<std::string> labels;                 // row names, ascending
    std::vector<int> clusters;                       // column ids, ascending
    std::vector<std::vector<std::uint64_t>> counts;  // [label][cluster]
    std::vector<std::uint64_t> label_totals;
    std::vector<std::uint64_t> cluster_totals;
    std::uint64_t total = 0;
};

// Throws EmptyEvaluationSet when nothing survives the intersection and
// exclusion rules.
Contingency build_contingency(const ClusterAssignment& assignment, const LabelSet& labels);

// Homogeneity, completeness, V-measure and purity over the contingency
// distribution, entropies in nats. Degenerate conventions: a single label
// gives h = 1, a single cluster gives c = 1, and v = 0 when h + c = 0.
Metrics metrics(const Contingency& table);
Metrics metrics(const ClusterAssignment& assignment, const LabelSet& labels);

struct ClusterBreakdown {
    int cluster_id = 0;
    std::size_t size = 0;
    std::string majority_label;
    double majority_fraction = 0.0;
    std::vector<std::pair<std::string, std::size_t>> top_labels; // up to 3, count desc
};

// Per-cluster composition over the same evaluation set as metrics().
// Clusters ascend by id; label ties break lexicographically.
std::vector<ClusterBreakdown> cluster_report(const ClusterAssignment& assignment,
                                             const LabelSet& labels);

struct OverlapResult {
    double jaccard = 0.0;
    bool first_contains_second = false;
    bool second_contains_first = false;

    bool contains() const { return first_contains_second || second_contains_first; }
};

// Shared-structure measures for a pair of blocks: multiset Jaccard of
// their WL documents at `depth` (one interning table for both), and
// directional containment, where a block contains the other when the
// other's canonical hash matches one of its node subtrees. The feature
// assignments must come from one scheme.
OverlapResult overlap(const BuildingBlock& b1, const BuildingBlock& b2,
                      const FeatureAssignment& f1, const FeatureAssignment& f2, int depth);

} // namespace blockclust
