#pragma once

#include "blockclust/core.hpp"
#include "blockclust/extraction.hpp"

#include <map>
#include <vector>

namespace blockclust {

// Selector-set grouping: distinct non-empty selector sets from the
// registry, Ward-clustered on pairwise Jaccard distances and cut at
// `threshold`. Group ids are contiguous from 0, ordered by each group's
// lexicographically smallest fingerprint. Nodes with an empty or unknown
// selector set map to the reserved group (== group count).
struct SignatureGroups {
    double threshold = 1.5;
    std::map<std::string, int> groups; // fingerprint -> group id
    int group_count = 0;

    int reserved_group() const { return group_count; }
    int group_of(const std::set<Selector>& selectors) const;

    // Canonical fingerprint: sorted selector hex joined with ';'.
    static std::string fingerprint(const std::set<Selector>& selectors);
};

double jaccard_distance(const std::set<Selector>& a, const std::set<Selector>& b);

SignatureGroups build_signature_groups(const ContractRegistry& registry, double threshold = 1.5);

// Token = total degree of the node in the block tree (the graph2vec
// default when no features are given).
FeatureAssignment feature_none(const BuildingBlock& block);

// Token in {0: factory-deployed, 1: asset, 2: other}; unregistered
// addresses count as other.
FeatureAssignment feature_3class(const BuildingBlock& block, const ContractRegistry& registry);

// Token = interned id of the node's exact selector set. Ids are assigned
// from the registry's distinct non-empty sets in fingerprint order
// (starting at 1); empty and unknown sets share token 0.
FeatureAssignment feature_selectors(const BuildingBlock& block, const ContractRegistry& registry);

FeatureAssignment feature_group(const BuildingBlock& block, const ContractRegistry& registry,
                                const SignatureGroups& groups);

// One assignment per corpus block, aligned with corpus order. `groups` is
// required for the signature_group scheme.
std::vector<FeatureAssignment> featurize_corpus(const Corpus& corpus,
                                                const ContractRegistry& registry,
                                                FeatureScheme scheme,
                                                const SignatureGroups* groups = nullptr);

} // namespace blockclust
