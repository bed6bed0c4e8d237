#pragma once

#include "blockclust/core.hpp"

#include <vector>

namespace blockclust {

// Unique building blocks with occurrence counts, kept in
// (count desc, block_id asc) order.
struct Corpus {
    std::vector<BuildingBlock> blocks;

    const BuildingBlock* find(const std::string& block_id) const;
};

// Every call whose callee carries a protocol label in the registry and
// which has at least one child call. Nested qualifying calls all qualify.
std::vector<std::uint32_t> find_block_roots(const TransactionTrace& trace,
                                            const ContractRegistry& registry);

// Edge-induced subtree of `root` and all its descendants, sibling order
// preserved. Local ids are assigned in pre-order (root = 0). The returned
// block already carries its canonical hash.
BuildingBlock extract_block(const TransactionTrace& trace, std::uint32_t root);

// Canonical digest of the block shape: pre-order edge sequence, each edge
// as (depth, sibling rank, child outdegree, method token), prefixed by the
// root method token and root outdegree. Addresses are excluded, so
// address-relabeled copies of one shape hash identically.
std::string canonical_hash(const BuildingBlock& block);

// Edge-induced subtree rooted at local node `node`, re-indexed in
// pre-order with its canonical hash set. The sub-block's root method is
// recovered from the edge entering `node`; node 0 returns the block
// itself. `count` is zeroed, it has no meaning for a fragment.
BuildingBlock subtree_of(const BuildingBlock& block, std::uint32_t node);

Corpus aggregate(const std::vector<BuildingBlock>& blocks);

// Top-k by descending count (ties by ascending block_id), then drops
// single-node blocks.
Corpus filter_corpus(const Corpus& corpus, std::size_t top_k);

// Full per-trace extraction: roots, subtrees, hashes, then aggregation.
Corpus extract_corpus(const std::vector<TransactionTrace>& traces,
                      const ContractRegistry& registry);

} // namespace blockclust
