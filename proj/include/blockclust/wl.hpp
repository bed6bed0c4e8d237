#pragma once

#include "blockclust/core.hpp"
#include "blockclust/extraction.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace blockclust {

// Multiset of interned subtree tokens for one block: the node labels of
// WL iterations 0..d, in node-id order per iteration.
struct WlDocument {
    std::string block_id;
    std::vector<std::int64_t> words;
};

// Weisfeiler-Lehman relabeling with an interning table shared across all
// blocks processed by one instance, so equal rooted substructures map to
// equal tokens corpus-wide. Iteration-0 labels are the raw feature tokens;
// refined labels are allocated from 2^32 upwards and therefore never
// collide with them.
class WlRelabeler {
public:
    explicit WlRelabeler(bool directed = false) : directed_(directed) {}

    WlDocument document(const BuildingBlock& block, const FeatureAssignment& features, int depth);

    std::size_t interned_count() const { return intern_.size(); }

private:
    bool directed_;
    std::map<std::vector<std::int64_t>, std::int64_t> intern_;
    std::int64_t next_ = std::int64_t{1} << 32;
};

// Documents for a whole corpus, aligned with corpus order.
std::vector<WlDocument> wl_documents(const Corpus& corpus,
                                     const std::vector<FeatureAssignment>& features, int depth,
                                     bool directed = false);

} // namespace blockclust
