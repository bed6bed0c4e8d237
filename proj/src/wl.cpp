#include "blockclust/wl.hpp"

#include <algorithm>

namespace blockclust {

WlDocument WlRelabeler::document(const BuildingBlock& block, const FeatureAssignment& features,
                                 int depth) {
    if (depth < 0) throw Error(ErrorKind::InvalidArgument, "relabeling depth must be >= 0");
    const std::size_t n = block.node_count();
    if (features.tokens.size() != n)
        throw Error(ErrorKind::InvalidArgument,
                    "feature assignment does not cover all nodes of " + block.block_id);

    // Tree neighborhoods: children, plus the parent unless directed.
    std::vector<std::vector<std::uint32_t>> neighbors(n);
    for (const auto& e : block.edges) {
        neighbors[e.parent].push_back(e.child);
        if (!directed_) neighbors[e.child].push_back(e.parent);
    }

    WlDocument doc;
    doc.block_id = block.block_id;
    doc.words.reserve(n * static_cast<std::size_t>(depth + 1));

    std::vector<std::int64_t> labels(features.tokens);
    doc.words.insert(doc.words.end(), labels.begin(), labels.end());

    std::vector<std::int64_t> next_labels(n);
    for (int it = 0; it < depth; ++it) {
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<std::int64_t> key;
            key.reserve(neighbors[v].size() + 1);
            key.push_back(labels[v]);
            for (std::uint32_t u : neighbors[v]) key.push_back(labels[u]);
            std::sort(key.begin() + 1, key.end());
            auto [pos, inserted] = intern_.try_emplace(std::move(key), next_);
            if (inserted) ++next_;
            next_labels[v] = pos->second;
        }
        labels = next_labels;
        doc.words.insert(doc.words.end(), labels.begin(), labels.end());
    }
    return doc;
}

std::vector<WlDocument> wl_documents(const Corpus& corpus,
                                     const std::vector<FeatureAssignment>& features, int depth,
                                     bool directed) {
    if (features.size() != corpus.blocks.size())
        throw Error(ErrorKind::InvalidArgument, "one feature assignment per block required");
    WlRelabeler relabeler(directed);
    std::vector<WlDocument> docs;
    docs.reserve(corpus.blocks.size());
    for (std::size_t i = 0; i < corpus.blocks.size(); ++i)
        docs.push_back(relabeler.document(corpus.blocks[i], features[i], depth));
    return docs;
}

} // namespace blockclust
