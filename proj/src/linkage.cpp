#include "blockclust/linkage.hpp"

#include "blockclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace blockclust {

namespace {

// Union-find over leaves, used both to relabel the stepwise dendrogram
// and to cut it.
struct DisjointSet {
    std::vector<int> parent;

    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct RawMerge {
    int repr_a = 0; // a leaf inside each merged cluster
    int repr_b = 0;
    double height2 = 0.0; // squared height
};

} // namespace

Dendrogram ward_linkage(CondensedMatrix dist) {
    const std::size_t n = dist.n;
    if (n == 0)
        throw Error(ErrorKind::EmptyMatrix, "ward_linkage on empty matrix");

    Dendrogram out;
    out.n_leaves = n;
    if (n == 1) return out;

    // Work on squared dissimilarities.
    for (double& v : dist.d) v *= v;

    std::vector<double> size(n, 1.0);
    std::vector<bool> active(n, true);
    std::vector<int> chain;
    chain.reserve(n);
    std::vector<RawMerge> raw;
    raw.reserve(n - 1);

    std::size_t n_active = n;
    std::size_t scan_start = 0; // smallest possibly-active slot
    while (n_active > 1) {
        if (chain.empty()) {
            while (!active[scan_start]) ++scan_start;
            chain.push_back(static_cast<int>(scan_start));
        }
        // Grow the chain until two clusters are mutual nearest neighbors.
        int a, b;
        for (;;) {
            a = chain.back();
            int prev = chain.size() >= 2 ? chain[chain.size() - 2] : -1;
            b = -1;
            double best = std::numeric_limits<double>::infinity();
            if (prev >= 0) {
                // Prefer the predecessor on ties so chains terminate.
                b = prev;
                best = dist.at(a, prev);
            }
            for (std::size_t k = scan_start; k < n; ++k) {
                if (!active[k] || static_cast<int>(k) == a) continue;
                double dk = dist.at(a, k);
                if (dk < best) {
                    best = dk;
                    b = static_cast<int>(k);
                }
            }
            if (b == prev) break;
            chain.push_back(b);
        }
        chain.pop_back();
        chain.pop_back();

        double h2 = dist.at(a, b);
        raw.push_back({a, b, h2});

        // Merge a into b: Lance-Williams (Ward) update of all distances
        // towards the surviving slot b.
        double sa = size[a], sb = size[b];
        for (std::size_t k = scan_start; k < n; ++k) {
            if (!active[k] || static_cast<int>(k) == a || static_cast<int>(k) == b) continue;
            double sk = size[k];
            double dak = dist.at(a, k);
            double dbk = dist.at(b, k);
            dist.at(b, k) = ((sa + sk) * dak + (sb + sk) * dbk - sk * h2) / (sa + sb + sk);
        }
        size[b] = sa + sb;
        active[a] = false;
        --n_active;
    }

    // The NN-chain emits merges out of height order; sort, then rebuild
    // cluster ids with a union-find.
    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawMerge& x, const RawMerge& y) { return x.height2 < y.height2; });

    DisjointSet ds(n);
    std::vector<int> cluster_id(n);
    std::iota(cluster_id.begin(), cluster_id.end(), 0);
    out.merges.reserve(raw.size());
    for (std::size_t t = 0; t < raw.size(); ++t) {
        int ra = ds.find(raw[t].repr_a);
        int rb = ds.find(raw[t].repr_b);
        out.merges.push_back({std::min(cluster_id[ra], cluster_id[rb]),
                              std::max(cluster_id[ra], cluster_id[rb]),
                              std::sqrt(raw[t].height2)});
        ds.unite(ra, rb);
        cluster_id[ds.find(ra)] = static_cast<int>(n + t);
    }
    return out;
}

std::vector<int> cut_dendrogram(const Dendrogram& dendrogram, double delta) {
    const std::size_t n = dendrogram.n_leaves;
    DisjointSet ds(n);

    // Replay sorted merges below the cut. Representative leaves are
    // recovered by walking the merge list with a parallel union-find.
    std::vector<int> repr(n + dendrogram.merges.size());
    std::iota(repr.begin(), repr.begin() + n, 0);
    for (std::size_t t = 0; t < dendrogram.merges.size(); ++t) {
        const Merge& m = dendrogram.merges[t];
        int leaf_a = repr[m.a];
        int leaf_b = repr[m.b];
        repr[n + t] = leaf_a;
        if (m.height < delta) ds.unite(leaf_a, leaf_b);
    }

    std::vector<int> labels(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int root = ds.find(static_cast<int>(i));
        if (labels[root] == -1) labels[root] = next++;
    }
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = labels[ds.find(static_cast<int>(i))];
    return out;
}

} // namespace blockclust
