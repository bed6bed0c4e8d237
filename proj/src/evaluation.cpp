#include "blockclust/evaluation.hpp"

#include "blockclust/extraction.hpp"
#include "blockclust/labeling.hpp"
#include "blockclust/wl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace blockclust {

namespace {

// block_id -> (label, cluster) for blocks carrying both, with the FFC
// "Others" category dropped.
std::map<std::string, std::pair<std::string, int>>
evaluation_set(const ClusterAssignment& assignment, const LabelSet& labels) {
    std::map<std::string, std::pair<std::string, int>> out;
    for (const auto& [block_id, cluster] : assignment) {
        auto it = labels.labels.find(block_id);
        if (it == labels.labels.end()) continue;
        if (labels.kind == LabelKind::ffc && it->second == kOthersLabel) continue;
        out.emplace(block_id, std::make_pair(it->second, cluster));
    }
    return out;
}

double clamp01(double x) {
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

} // namespace

Contingency build_contingency(const ClusterAssignment& assignment, const LabelSet& labels) {
    auto evaluated = evaluation_set(assignment, labels);
    if (evaluated.empty())
        throw Error(ErrorKind::EmptyEvaluationSet, "no block has both a cluster and a label");

    std::map<std::string, std::size_t> label_row;
    std::map<int, std::size_t> cluster_col;
    for (const auto& [id, lc] : evaluated) {
        label_row.emplace(lc.first, 0);
        cluster_col.emplace(lc.second, 0);
    }

    Contingency t;
    for (auto& [label, row] : label_row) {
        row = t.labels.size();
        t.labels.push_back(label);
    }
    for (auto& [cluster, col] : cluster_col) {
        col = t.clusters.size();
        t.clusters.push_back(cluster);
    }
    t.counts.assign(t.labels.size(), std::vector<std::uint64_t>(t.clusters.size(), 0));
    t.label_totals.assign(t.labels.size(), 0);
    t.cluster_totals.assign(t.clusters.size(), 0);
    for (const auto& [id, lc] : evaluated) {
        std::size_t r = label_row[lc.first];
        std::size_t c = cluster_col[lc.second];
        t.counts[r][c] += 1;
        t.label_totals[r] += 1;
        t.cluster_totals[c] += 1;
        t.total += 1;
    }
    return t;
}

Metrics metrics(const Contingency& t) {
    const double n = static_cast<double>(t.total);

    double h_label = 0.0;
    for (std::uint64_t m : t.label_totals) {
        double p = static_cast<double>(m) / n;
        h_label -= p * std::log(p);
    }
    double h_cluster = 0.0;
    for (std::uint64_t m : t.cluster_totals) {
        double p = static_cast<double>(m) / n;
        h_cluster -= p * std::log(p);
    }

    double h_label_given_cluster = 0.0;
    double h_cluster_given_label = 0.0;
    std::uint64_t majority_sum = 0;
    for (std::size_t c = 0; c < t.clusters.size(); ++c) {
        std::uint64_t best = 0;
        for (std::size_t r = 0; r < t.labels.size(); ++r) {
            std::uint64_t cell = t.counts[r][c];
            if (cell == 0) continue;
            best = std::max(best, cell);
            double p = static_cast<double>(cell) / n;
            h_label_given_cluster -=
                p * std::log(static_cast<double>(cell) / static_cast<double>(t.cluster_totals[c]));
            h_cluster_given_label -=
                p * std::log(static_cast<double>(cell) / static_cast<double>(t.label_totals[r]));
        }
        majority_sum += best;
    }

    Metrics out;
    out.homogeneity = t.labels.size() <= 1 ? 1.0 : clamp01(1.0 - h_label_given_cluster / h_label);
    out.completeness =
        t.clusters.size() <= 1 ? 1.0 : clamp01(1.0 - h_cluster_given_label / h_cluster);
    double hc = out.homogeneity + out.completeness;
    out.v_measure = hc == 0.0 ? 0.0 : 2.0 * out.homogeneity * out.completeness / hc;
    out.purity = static_cast<double>(majority_sum) / n;
    return out;
}

Metrics metrics(const ClusterAssignment& assignment, const LabelSet& labels) {
    return metrics(build_contingency(assignment, labels));
}

std::vector<ClusterBreakdown> cluster_report(const ClusterAssignment& assignment,
                                             const LabelSet& labels) {
    auto evaluated = evaluation_set(assignment, labels);

    std::map<int, std::map<std::string, std::size_t>> per_cluster;
    for (const auto& [id, lc] : evaluated) per_cluster[lc.second][lc.first] += 1;

    std::vector<ClusterBreakdown> out;
    out.reserve(per_cluster.size());
    for (const auto& [cluster, label_counts] : per_cluster) {
        ClusterBreakdown b;
        b.cluster_id = cluster;
        std::vector<std::pair<std::string, std::size_t>> ordered(label_counts.begin(),
                                                                 label_counts.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second > y.second;
            return x.first < y.first;
        });
        for (const auto& [label, count] : ordered) b.size += count;
        b.majority_label = ordered.front().first;
        b.majority_fraction =
            static_cast<double>(ordered.front().second) / static_cast<double>(b.size);
        for (std::size_t i = 0; i < ordered.size() && i < 3; ++i)
            b.top_labels.push_back(ordered[i]);
        out.push_back(std::move(b));
    }
    return out;
}

namespace {

double multiset_jaccard(std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<std::string> subtree_hashes(const BuildingBlock& block) {
    std::set<std::string> out;
    out.insert(block.block_id);
    for (std::uint32_t v = 1; v < block.nodes.size(); ++v)
        out.insert(subtree_of(block, v).block_id);
    return out;
}

} // namespace

OverlapResult overlap(const BuildingBlock& b1, const BuildingBlock& b2,
                      const FeatureAssignment& f1, const FeatureAssignment& f2, int depth) {
    if (f1.scheme != f2.scheme)
        throw Error(ErrorKind::SchemeMismatch, "blocks featurized under different schemes");

    WlRelabeler relabeler;
    WlDocument d1 = relabeler.document(b1, f1, depth);
    WlDocument d2 = relabeler.document(b2, f2, depth);

    OverlapResult out;
    out.jaccard = multiset_jaccard(d1.words, d2.words);
    out.first_contains_second = subtree_hashes(b1).count(b2.block_id) > 0;
    out.second_contains_first = subtree_hashes(b2).count(b1.block_id) > 0;
    return out;
}

} // namespace blockclust
