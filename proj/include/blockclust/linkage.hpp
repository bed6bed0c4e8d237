#pragma once

#include <cstddef>
#include <vector>

namespace blockclust {

// Condensed upper-triangle distance matrix over n points.
struct CondensedMatrix {
    std::size_t n = 0;
    std::vector<double> d; // n*(n-1)/2 entries, (i,j) with i<j

    explicit CondensedMatrix(std::size_t n_points)
        : n(n_points), d(n_points < 2 ? 0 : n_points * (n_points - 1) / 2, 0.0) {}

    double& at(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return d[n * i - i * (i + 1) / 2 + (j - i - 1)];
    }
    double at(std::size_t i, std::size_t j) const {
        return const_cast<CondensedMatrix*>(this)->at(i, j);
    }
};

struct Merge {
    int a = 0;      // cluster ids: leaves 0..n-1, t-th merge creates id n+t; a < b
    int b = 0;
    double height = 0.0;
};

// Merge list sorted by non-decreasing height.
struct Dendrogram {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;

    double max_height() const {
        return merges.empty() ? 0.0 : merges.back().height;
    }
};

// Ward linkage on a precomputed dissimilarity matrix via the nearest-
// neighbor chain algorithm. The Lance-Williams recurrence runs on squared
// dissimilarities and heights are reported unsquared, so for Euclidean
// input the heights match the usual minimum-variance convention (two
// singletons merge at their plain distance). The matrix is consumed.
Dendrogram ward_linkage(CondensedMatrix dist);

// Flat clusters from merges with height strictly below `delta`. Cluster
// ids are contiguous from 0, ordered by each cluster's smallest leaf.
std::vector<int> cut_dendrogram(const Dendrogram& dendrogram, double delta);

} // namespace blockclust
