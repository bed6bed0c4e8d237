#include "blockclust/synthgen.hpp"

#include "blockclust/core.hpp"
#include "blockclust/csv.hpp"
#include "blockclust/ingestion.hpp"
#include "blockclust/labeling.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace blockclust {

void SynthSpec::validate() const {
    if (n_protocols < 1 || n_protocols > 1000)
        throw Error(ErrorKind::InvalidSpec, "n_protocols must be in [1, 1000]");
    if (blocks_per_protocol < 1)
        throw Error(ErrorKind::InvalidSpec, "blocks_per_protocol must be >= 1");
    if (n_archetypes < 1 || n_archetypes > 8)
        throw Error(ErrorKind::InvalidSpec, "n_archetypes must be in [1, 8]");
    if (!(noise_rate >= 0.0) || !(noise_rate <= 1.0))
        throw Error(ErrorKind::InvalidSpec, "noise_rate must be in [0, 1]");
}

namespace {

// Root-method pools per financial category, in the category table's row
// order. Every name classifies to its own row: names that contain a
// keyword of an earlier row are excluded up front.
struct CategoryPool {
    const char* category;
    std::vector<const char*> names;
};

const std::vector<CategoryPool>& category_pools() {
    static const std::vector<CategoryPool> pools = {
        {"Swap",
         {"swapExactTokensForTokens", "swapTokensForExactTokens", "exchangeUnderlying",
          "swapOut"}},
        {"Lock Capital",
         {"depositCollateral", "addLiquidity", "stakeTokens", "lockAssets", "lendToPool"}},
        {"Redeem or Withdraw",
         {"withdrawCollateral", "removeLiquidity", "unstakeTokens", "unlockAssets"}},
        {"Borrow", {"borrowAsset", "borrowTokens", "borrowUnderlying", "borrowFromPool"}},
        {"Get Interest or Rewards",
         {"claimRewards", "getReward", "harvestYield", "earnInterest", "getFees"}},
        {"Repay", {"repayLoan", "repayDebt", "repayUnderlying", "repayFull"}},
        {"Governance", {"voteForProposal", "castVote", "voteOnMotion", "voteWithReason"}},
        {"Liquidate",
         {"liquidatePosition", "liquidateAccount", "liquidateBorrower", "selfLiquidation"}},
    };
    return pools;
}

// Distinct root name per (protocol, archetype): the pool rotates over
// protocols and wraps into version suffixes, keeping canonical hashes of
// different protocols' blocks apart.
std::string root_name(std::size_t protocol, std::size_t archetype) {
    const CategoryPool& pool = category_pools()[archetype];
    std::string name = pool.names[protocol % pool.names.size()];
    std::size_t wrap = protocol / pool.names.size();
    if (wrap > 0) name += "V" + std::to_string(wrap + 1);
    return name;
}

struct Node {
    Address address;
    std::string method;
    std::vector<std::unique_ptr<Node>> children;
};

std::unique_ptr<Node> leaf(const Address& a, std::string m) {
    auto n = std::make_unique<Node>();
    n->address = a;
    n->method = std::move(m);
    return n;
}

// Per-protocol cast: entry contract, two core contracts, a router, plus
// the shared unregistered token/aggregator addresses.
struct ProtocolCast {
    std::string name;
    Address entry, core0, core1, router;
};

Address draw_address(std::mt19937_64& rng, std::set<Address>& used) {
    for (;;) {
        Address a;
        for (auto& b : a.bytes) b = static_cast<std::uint8_t>(rng());
        if (used.insert(a).second) return a;
    }
}

} // namespace

SynthPaths generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::set<Address> used;

    Address token_a = draw_address(rng, used);
    Address token_b = draw_address(rng, used);
    Address token_c = draw_address(rng, used);
    Address aggregator = draw_address(rng, used);

    std::vector<ProtocolCast> casts(spec.n_protocols);
    for (std::size_t p = 0; p < spec.n_protocols; ++p) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "protocol%02zu", p);
        casts[p].name = buf;
        casts[p].entry = draw_address(rng, used);
        casts[p].core0 = draw_address(rng, used);
        casts[p].core1 = draw_address(rng, used);
        casts[p].router = draw_address(rng, used);
    }

    SynthPaths paths;
    paths.traces = out_dir / "traces.jsonl";
    paths.registry = out_dir / "registry.csv";
    paths.truth = out_dir / "truth.csv";

    // Registry: four contracts per protocol, each with the protocol's ten
    // shared selectors plus one private one. The four sets are distinct
    // yet close in Jaccard distance, so signature grouping fuses them into
    // one group per protocol while protocols stay apart. Only the entry
    // and router contracts carry the protocol label; the cores are
    // protocol-internal plumbing, so blocks root at entry calls alone.
    {
        std::ofstream reg(paths.registry);
        if (!reg) throw Error(ErrorKind::IoError, "cannot write " + paths.registry.string());
        reg << "address,protocol,class,selectors\n";
        for (std::size_t p = 0; p < spec.n_protocols; ++p) {
            std::vector<Selector> sels;
            for (std::size_t i = 0; i < 14; ++i)
                sels.push_back(
                    selector_of("p" + std::to_string(p) + "core" + std::to_string(i) + "()"));
            auto set_for = [&](std::size_t k) {
                std::string joined;
                std::set<Selector> sorted(sels.begin(), sels.begin() + 10);
                sorted.insert(sels[10 + k]);
                for (const auto& s : sorted) {
                    if (!joined.empty()) joined += ';';
                    joined += s.hex();
                }
                return joined;
            };
            const char* core_class = p % 2 == 0 ? "asset" : "fd";
            const ProtocolCast& c = casts[p];
            reg << "0x" << c.entry.hex() << ',' << c.name << ",other," << set_for(0) << "\n";
            reg << "0x" << c.core0.hex() << ",," << core_class << ',' << set_for(1) << "\n";
            reg << "0x" << c.core1.hex() << ",," << core_class << ',' << set_for(2) << "\n";
            reg << "0x" << c.router.hex() << ',' << c.name << ",other," << set_for(3) << "\n";
        }
        if (!reg.good()) throw Error(ErrorKind::IoError, "write failed: " + paths.registry.string());
    }

    std::ofstream traces(paths.traces);
    if (!traces) throw Error(ErrorKind::IoError, "cannot write " + paths.traces.string());
    std::ofstream truth(paths.truth);
    if (!truth) throw Error(ErrorKind::IoError, "cannot write " + paths.truth.string());
    truth << "tx_id,root_index,protocol,ffc\n";

    // The protocol-internal core subtree shared by all of the protocol's
    // archetypes. Its head is protocol-internal plumbing, so it stays
    // inside the enclosing block instead of rooting one of its own.
    auto make_core = [&](const ProtocolCast& c, std::size_t p) {
        auto core = leaf(c.core0, "updatePoolState" + std::to_string(p));
        core->children.push_back(leaf(c.core1, "getReserves"));
        core->children.push_back(leaf(c.core1, "computeRate"));
        auto sync = leaf(c.core1, "syncPrice");
        sync->children.push_back(leaf(token_a, "balanceOf"));
        sync->children.push_back(leaf(token_b, "balanceOf"));
        core->children.push_back(std::move(sync));
        auto accrue = leaf(c.core0, "accrueFees");
        accrue->children.push_back(leaf(c.router, "distribute"));
        core->children.push_back(std::move(accrue));
        return core;
    };

    // Archetype trees, all sharing the core subtree. Shape 2 settles
    // through the protocol's own shape-0 service, so that whole tree
    // recurs as a nested protocol-rooted block inside shape-2 traces:
    // the extractor picks it up again and block containment has real
    // positives to find.
    auto make_template = [&](std::size_t p, std::size_t archetype, auto&& self)
        -> std::unique_ptr<Node> {
        const ProtocolCast& c = casts[p];
        auto root = leaf(c.entry, root_name(p, archetype));
        switch (archetype % 3) {
        case 0:
            root->children.push_back(leaf(token_a, "transferFrom"));
            root->children.push_back(make_core(c, p));
            root->children.push_back(leaf(token_b, "transfer"));
            break;
        case 1:
            root->children.push_back(leaf(token_a, "transferFrom"));
            root->children.push_back(leaf(token_b, "approve"));
            root->children.push_back(make_core(c, p));
            root->children.push_back(leaf(c.router, "mintShares"));
            break;
        default: {
            root->children.push_back(make_core(c, p));
            root->children.push_back(leaf(c.router, "burnShares"));
            root->children.push_back(self(p, 0, self));
            auto chain = leaf(token_a, "transfer");
            chain->children.push_back(leaf(token_b, "balanceOf"));
            root->children.push_back(std::move(chain));
            break;
        }
        }
        return root;
    };

    auto collect = [](Node* node, auto&& self, std::vector<Node*>& out) -> void {
        out.push_back(node);
        for (auto& child : node->children) self(child.get(), self, out);
    };

    std::size_t tx_counter = 0;
    for (std::size_t i = 0; i < spec.blocks_per_protocol; ++i) {
        for (std::size_t p = 0; p < spec.n_protocols; ++p) {
            std::size_t archetype = i % spec.n_archetypes;
            auto root = make_template(p, archetype, make_template);

            if (unit(rng) < spec.noise_rate) {
                std::vector<Node*> nodes;
                collect(root.get(), collect, nodes);
                if (unit(rng) < 0.5) {
                    // Grow: one extra token leaf under a random node.
                    std::size_t at = static_cast<std::size_t>(unit(rng) * nodes.size());
                    if (at >= nodes.size()) at = nodes.size() - 1;
                    nodes[at]->children.push_back(leaf(token_c, "balanceOf"));
                } else {
                    std::vector<Node*> parents_of_leaves;
                    for (Node* n : nodes)
                        for (auto& ch : n->children)
                            if (ch->children.empty()) parents_of_leaves.push_back(n);
                    std::size_t at =
                        static_cast<std::size_t>(unit(rng) * parents_of_leaves.size());
                    if (at >= parents_of_leaves.size()) at = parents_of_leaves.size() - 1;
                    Node* parent = parents_of_leaves[at];
                    for (std::size_t k = 0; k < parent->children.size(); ++k)
                        if (parent->children[k]->children.empty()) {
                            parent->children.erase(parent->children.begin() +
                                                   static_cast<std::ptrdiff_t>(k));
                            break;
                        }
                }
            }
            if (unit(rng) < spec.noise_rate) {
                std::vector<Node*> nodes;
                collect(root.get(), collect, nodes);
                if (nodes.size() > 1) {
                    std::size_t at =
                        1 + static_cast<std::size_t>(unit(rng) * (nodes.size() - 1));
                    if (at >= nodes.size()) at = nodes.size() - 1;
                    nodes[at]->address = token_c;
                }
            }

            TransactionTrace trace;
            char txbuf[32];
            std::snprintf(txbuf, sizeof txbuf, "synth-%06zu", tx_counter++);
            trace.tx_id = txbuf;

            CallRecord entry_call;
            entry_call.index = 0;
            entry_call.callee = aggregator;
            entry_call.method_name = "execute";
            trace.calls.push_back(entry_call);

            auto emit = [&](Node* node, std::optional<std::uint32_t> parent,
                            auto&& self) -> void {
                CallRecord call;
                call.index = static_cast<std::uint32_t>(trace.calls.size());
                call.parent = parent;
                call.callee = node->address;
                call.method_name = node->method;
                trace.calls.push_back(call);
                std::uint32_t my_index = call.index;
                for (auto& child : node->children) self(child.get(), my_index, self);
            };
            emit(root.get(), 0, emit);

            traces << trace_to_json(trace) << "\n";
            truth << trace.tx_id << ",1," << casts[p].name << ','
                  << csv::escape(category_pools()[archetype].category) << "\n";
        }
    }

    if (!traces.good()) throw Error(ErrorKind::IoError, "write failed: " + paths.traces.string());
    if (!truth.good()) throw Error(ErrorKind::IoError, "write failed: " + paths.truth.string());
    return paths;
}

} // namespace blockclust
