#include "blockclust/clustering.hpp"

#include "blockclust/evaluation.hpp"
#include "blockclust/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace blockclust {

EmbeddingLinkage embedding_linkage(const EmbeddingMatrix& matrix, bool normalize) {
    if (matrix.rows.empty())
        throw Error(ErrorKind::EmptyMatrix, "no embedding rows to cluster");

    const std::size_t n = matrix.rows.size();
    EmbeddingLinkage out;
    out.block_ids.reserve(n);
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (const auto& [id, row] : matrix.rows) {
        out.block_ids.push_back(id);
        rows.push_back(row);
    }
    if (normalize) {
        for (auto& row : rows) {
            double norm2 = 0.0;
            for (double v : row) norm2 += v * v;
            if (norm2 > 0.0) {
                double inv = 1.0 / std::sqrt(norm2);
                for (double& v : row) v *= inv;
            }
        }
    }

    CondensedMatrix dist(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < rows[i].size(); ++k) {
                double d = rows[i][k] - rows[j][k];
                s += d * d;
            }
            dist.at(i, j) = std::sqrt(s);
        }
    });

    out.dendrogram = ward_linkage(std::move(dist));
    return out;
}

ClusterAssignment cut_assignment(const EmbeddingLinkage& linkage, double delta) {
    if (!(delta > 0.0))
        throw Error(ErrorKind::InvalidDelta, "delta must be positive");
    std::vector<int> labels = cut_dendrogram(linkage.dendrogram, delta);
    ClusterAssignment out;
    for (std::size_t i = 0; i < linkage.block_ids.size(); ++i)
        out.emplace(linkage.block_ids[i], labels[i]);
    return out;
}

ClusterAssignment cluster(const EmbeddingMatrix& matrix, double delta, bool normalize) {
    if (!(delta > 0.0))
        throw Error(ErrorKind::InvalidDelta, "delta must be positive");
    return cut_assignment(embedding_linkage(matrix, normalize), delta);
}

SweepResult sweep(const EmbeddingMatrix& matrix, const LabelSet& labels, double lo, double hi,
                  double step, bool normalize) {
    if (!(lo > 0.0) || !(step > 0.0) || hi < lo)
        throw Error(ErrorKind::InvalidDelta, "sweep grid must satisfy 0 < lo <= hi, step > 0");

    EmbeddingLinkage linkage = embedding_linkage(matrix, normalize);

    const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    SweepResult out;
    out.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SweepPoint point;
        point.delta = lo + static_cast<double>(i) * step;
        ClusterAssignment assignment = cut_assignment(linkage, point.delta);
        int max_id = 0;
        for (const auto& [id, c] : assignment) max_id = std::max(max_id, c);
        point.n_clusters = max_id + 1;
        point.metrics = metrics(assignment, labels);
        if (out.points.empty() || point.metrics.v_measure > out.best_metrics.v_measure) {
            out.best_delta = point.delta;
            out.best_n_clusters = point.n_clusters;
            out.best_metrics = point.metrics;
        }
        out.points.push_back(point);
    }
    return out;
}

} // namespace blockclust
