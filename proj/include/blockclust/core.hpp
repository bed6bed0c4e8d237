#pragma once

#include "blockclust/errors.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace blockclust {

// 20-byte account address. Canonical text form is 40 lowercase hex chars;
// parsing accepts an optional "0x" prefix and mixed case.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    static Address parse(std::string_view text);
    std::string hex() const;

    auto operator<=>(const Address&) const = default;
};

// 4-byte function selector (8 hex chars).
struct Selector {
    std::array<std::uint8_t, 4> bytes{};

    static Selector parse(std::string_view text);
    std::string hex() const;

    auto operator<=>(const Selector&) const = default;
};

// One call inside a transaction trace. `index` is the 0-based pre-order
// position in execution order; the root call has no parent.
struct CallRecord {
    std::uint32_t index = 0;
    std::optional<std::uint32_t> parent;
    Address callee;
    std::string method_name;          // may be empty when unknown
    std::optional<Selector> selector;
};

struct TransactionTrace {
    std::string tx_id;
    std::vector<CallRecord> calls; // execution order, indices 0..n-1
};

// Throws CycleOrForest / NonContiguousIndices / MultipleRoots when the
// records do not form a single tree in execution order.
void validate_trace(const TransactionTrace& trace);

enum class ContractClass { factory_deployed, asset, other };

const char* contract_class_name(ContractClass c);
ContractClass contract_class_from_name(std::string_view name); // throws UnknownClass

struct ContractInfo {
    Address address;
    std::optional<std::string> protocol;
    ContractClass contract_class = ContractClass::other;
    std::set<Selector> selectors;
};

struct ContractRegistry {
    std::map<Address, ContractInfo> entries;

    const ContractInfo* find(const Address& address) const {
        auto it = entries.find(address);
        return it == entries.end() ? nullptr : &it->second;
    }
};

// Method identity used in hashing and on block edges: the selector when
// known, the method name text otherwise. The one-char tag keeps the two
// domains from colliding.
std::string method_token(const std::string& method_name, const std::optional<Selector>& selector);

struct BlockEdge {
    std::uint32_t parent = 0;       // local node id
    std::uint32_t child = 0;        // local node id
    std::string method;             // method_token() of the child call
    std::uint32_t rank = 0;         // sibling rank under `parent`, execution order

    bool operator==(const BlockEdge&) const = default;
};

// A protocol-rooted, edge-induced subtree of a transaction trace.
// Local node ids index `nodes`; node 0 is the root. Edges are stored in
// pre-order of the child node.
struct BuildingBlock {
    std::string block_id;           // canonical hash, hex; set by canonical_hash
    Address root_address;
    std::string root_method;        // raw method name of the root call
    std::optional<Selector> root_selector;
    std::vector<Address> nodes;
    std::vector<BlockEdge> edges;
    std::uint64_t count = 0;

    std::size_t node_count() const { return nodes.size(); }
    std::string root_token() const { return method_token(root_method, root_selector); }
    // children[i] = local ids of i's children in sibling-rank order
    std::vector<std::vector<std::uint32_t>> children() const;
};

enum class FeatureScheme { none, three_class, signatures, signature_group };

const char* feature_scheme_name(FeatureScheme s);
FeatureScheme feature_scheme_from_name(std::string_view name); // throws InvalidArgument

// One integer token per local node id of a block.
struct FeatureAssignment {
    FeatureScheme scheme = FeatureScheme::none;
    std::vector<std::int64_t> tokens;
};

enum class LabelKind { protocol, ffc };

const char* label_kind_name(LabelKind k);

struct LabelSet {
    LabelKind kind = LabelKind::protocol;
    std::map<std::string, std::string> labels; // block_id -> label text
};

// One mu-dimensional row per block id. std::map keeps rows in block_id
// order, which is the canonical row order everywhere downstream.
struct EmbeddingMatrix {
    std::size_t dim = 0;
    std::map<std::string, std::vector<double>> rows;
};

using ClusterAssignment = std::map<std::string, int>; // block_id -> cluster id

struct Metrics {
    double homogeneity = 0.0;
    double completeness = 0.0;
    double v_measure = 0.0;
    double purity = 0.0;
};

struct ClusteringRun {
    double delta = 0.0;
    ClusterAssignment assignments;
    Metrics metrics;
    int n_clusters = 0;
};

// JSON-Lines codecs for the on-disk schemas (see ingestion/extraction).
std::string trace_to_json(const TransactionTrace& trace);
TransactionTrace trace_from_json(const std::string& line);
std::string block_to_json(const BuildingBlock& block);
BuildingBlock block_from_json(const std::string& line);

} // namespace blockclust
