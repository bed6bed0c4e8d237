#include "blockclust/featurization.hpp"

#include "blockclust/linkage.hpp"
#include "blockclust/parallel.hpp"

#include <algorithm>

namespace blockclust {

std::string SignatureGroups::fingerprint(const std::set<Selector>& selectors) {
    std::string out;
    for (const auto& s : selectors) {
        if (!out.empty()) out += ';';
        out += s.hex();
    }
    return out;
}

int SignatureGroups::group_of(const std::set<Selector>& selectors) const {
    if (selectors.empty()) return reserved_group();
    auto it = groups.find(fingerprint(selectors));
    return it == groups.end() ? reserved_group() : it->second;
}

double jaccard_distance(const std::set<Selector>& a, const std::set<Selector>& b) {
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++inter; ++ia; ++ib; }
    }
    std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 0.0;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

SignatureGroups build_signature_groups(const ContractRegistry& registry, double threshold) {
    // Distinct non-empty selector sets, in fingerprint order.
    std::map<std::string, const std::set<Selector>*> distinct;
    for (const auto& [addr, info] : registry.entries) {
        (void)addr;
        if (info.selectors.empty()) continue;
        distinct.emplace(SignatureGroups::fingerprint(info.selectors), &info.selectors);
    }
    if (distinct.empty())
        throw Error(ErrorKind::EmptyRegistry, "registry has no non-empty selector sets");

    std::vector<std::string> fingerprints;
    std::vector<const std::set<Selector>*> sets;
    fingerprints.reserve(distinct.size());
    for (const auto& [fp, set] : distinct) {
        fingerprints.push_back(fp);
        sets.push_back(set);
    }

    SignatureGroups out;
    out.threshold = threshold;
    const std::size_t n = sets.size();
    if (n == 1) {
        out.groups.emplace(fingerprints[0], 0);
        out.group_count = 1;
        return out;
    }

    CondensedMatrix dist(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            dist.at(i, j) = jaccard_distance(*sets[i], *sets[j]);
    });

    Dendrogram dendrogram = ward_linkage(std::move(dist));
    std::vector<int> labels = cut_dendrogram(dendrogram, threshold);
    for (std::size_t i = 0; i < n; ++i) out.groups.emplace(fingerprints[i], labels[i]);
    out.group_count = 1 + *std::max_element(labels.begin(), labels.end());
    return out;
}

FeatureAssignment feature_none(const BuildingBlock& block) {
    FeatureAssignment fa;
    fa.scheme = FeatureScheme::none;
    fa.tokens.assign(block.node_count(), 0);
    for (const auto& e : block.edges) {
        fa.tokens[e.parent] += 1;
        fa.tokens[e.child] += 1;
    }
    return fa;
}

FeatureAssignment feature_3class(const BuildingBlock& block, const ContractRegistry& registry) {
    FeatureAssignment fa;
    fa.scheme = FeatureScheme::three_class;
    fa.tokens.reserve(block.node_count());
    for (const auto& addr : block.nodes) {
        const ContractInfo* info = registry.find(addr);
        ContractClass c = info ? info->contract_class : ContractClass::other;
        fa.tokens.push_back(static_cast<std::int64_t>(c));
    }
    return fa;
}

namespace {

// Registry-wide interning of distinct non-empty selector sets: ids follow
// fingerprint order starting at 1, token 0 is the shared unknown/empty set.
std::map<std::string, std::int64_t> selector_set_ids(const ContractRegistry& registry) {
    std::map<std::string, std::int64_t> ids;
    for (const auto& [addr, info] : registry.entries) {
        (void)addr;
        if (info.selectors.empty()) continue;
        ids.emplace(SignatureGroups::fingerprint(info.selectors), 0);
    }
    std::int64_t next = 1;
    for (auto& [fp, id] : ids) {
        (void)fp;
        id = next++;
    }
    return ids;
}

} // namespace

FeatureAssignment feature_selectors(const BuildingBlock& block, const ContractRegistry& registry) {
    auto ids = selector_set_ids(registry);
    FeatureAssignment fa;
    fa.scheme = FeatureScheme::signatures;
    fa.tokens.reserve(block.node_count());
    for (const auto& addr : block.nodes) {
        const ContractInfo* info = registry.find(addr);
        std::int64_t token = 0;
        if (info && !info->selectors.empty()) {
            auto it = ids.find(SignatureGroups::fingerprint(info->selectors));
            if (it != ids.end()) token = it->second;
        }
        fa.tokens.push_back(token);
    }
    return fa;
}

FeatureAssignment feature_group(const BuildingBlock& block, const ContractRegistry& registry,
                                const SignatureGroups& groups) {
    FeatureAssignment fa;
    fa.scheme = FeatureScheme::signature_group;
    fa.tokens.reserve(block.node_count());
    for (const auto& addr : block.nodes) {
        const ContractInfo* info = registry.find(addr);
        if (info) fa.tokens.push_back(groups.group_of(info->selectors));
        else fa.tokens.push_back(groups.reserved_group());
    }
    return fa;
}

std::vector<FeatureAssignment> featurize_corpus(const Corpus& corpus,
                                                const ContractRegistry& registry,
                                                FeatureScheme scheme,
                                                const SignatureGroups* groups) {
    // Selector-set interning is registry-wide; hoist it out of the loop.
    std::map<std::string, std::int64_t> ids;
    if (scheme == FeatureScheme::signatures) ids = selector_set_ids(registry);
    if (scheme == FeatureScheme::signature_group && !groups)
        throw Error(ErrorKind::InvalidArgument,
                    "signature_group featurization requires built groups");

    std::vector<FeatureAssignment> out(corpus.blocks.size());
    parallel_for(corpus.blocks.size(), [&](std::size_t i) {
        const BuildingBlock& block = corpus.blocks[i];
        switch (scheme) {
            case FeatureScheme::none:
                out[i] = feature_none(block);
                break;
            case FeatureScheme::three_class:
                out[i] = feature_3class(block, registry);
                break;
            case FeatureScheme::signatures: {
                FeatureAssignment fa;
                fa.scheme = scheme;
                fa.tokens.reserve(block.node_count());
                for (const auto& addr : block.nodes) {
                    const ContractInfo* info = registry.find(addr);
                    std::int64_t token = 0;
                    if (info && !info->selectors.empty()) {
                        auto it = ids.find(SignatureGroups::fingerprint(info->selectors));
                        if (it != ids.end()) token = it->second;
                    }
                    fa.tokens.push_back(token);
                }
                out[i] = std::move(fa);
                break;
            }
            case FeatureScheme::signature_group:
                out[i] = feature_group(block, registry, *groups);
                break;
        }
    });
    return out;
}

} // namespace blockclust
