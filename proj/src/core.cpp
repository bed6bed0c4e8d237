#include "blockclust/core.hpp"

#include "blockclust/hash.hpp"

#include <json.hpp>

#include <algorithm>

namespace blockclust {

using nlohmann::json;

Address Address::parse(std::string_view text) {
    if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
    if (text.size() != 40)
        throw Error(ErrorKind::BadAddress,
                    "address must be 40 hex chars, got " + std::string(text));
    auto raw = from_hex(text);
    Address a;
    std::copy(raw.begin(), raw.end(), a.bytes.begin());
    return a;
}

std::string Address::hex() const {
    return to_hex(bytes);
}

Selector Selector::parse(std::string_view text) {
    if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
    if (text.size() != 8)
        throw Error(ErrorKind::BadSelector,
                    "selector must be 8 hex chars, got " + std::string(text));
    std::vector<std::uint8_t> raw;
    try {
        raw = from_hex(text);
    } catch (const Error&) {
        throw Error(ErrorKind::BadSelector, "non-hex selector: " + std::string(text));
    }
    Selector s;
    std::copy(raw.begin(), raw.end(), s.bytes.begin());
    return s;
}

std::string Selector::hex() const {
    return to_hex(bytes);
}

void validate_trace(const TransactionTrace& trace) {
    const auto& calls = trace.calls;
    if (calls.empty())
        throw Error(ErrorKind::CycleOrForest, "trace has no calls: " + trace.tx_id);

    std::size_t roots = 0;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (calls[i].index != i)
            throw Error(ErrorKind::NonContiguousIndices,
                        "call at position " + std::to_string(i) + " has index " +
                            std::to_string(calls[i].index));
        if (!calls[i].parent) {
            ++roots;
        } else if (*calls[i].parent >= i) {
            // Forward or self parent cannot occur in execution order.
            throw Error(ErrorKind::CycleOrForest,
                        "call " + std::to_string(i) + " has parent " +
                            std::to_string(*calls[i].parent));
        }
    }
    if (roots > 1)
        throw Error(ErrorKind::MultipleRoots,
                    std::to_string(roots) + " parentless calls in " + trace.tx_id);
    if (roots == 0)
        throw Error(ErrorKind::CycleOrForest, "no root call in " + trace.tx_id);
    if (calls[0].parent)
        throw Error(ErrorKind::CycleOrForest, "first call has a parent in " + trace.tx_id);
}

const char* contract_class_name(ContractClass c) {
    switch (c) {
        case ContractClass::factory_deployed: return "fd";
        case ContractClass::asset: return "asset";
        case ContractClass::other: return "other";
    }
    return "other";
}

ContractClass contract_class_from_name(std::string_view name) {
    if (name == "fd") return ContractClass::factory_deployed;
    if (name == "asset") return ContractClass::asset;
    if (name == "other") return ContractClass::other;
    throw Error(ErrorKind::UnknownClass, "unknown contract class: " + std::string(name));
}

std::string method_token(const std::string& method_name, const std::optional<Selector>& selector) {
    if (selector) return "s" + selector->hex();
    return "m" + method_name;
}

std::vector<std::vector<std::uint32_t>> BuildingBlock::children() const {
    std::vector<std::vector<std::uint32_t>> out(nodes.size());
    for (const auto& e : edges) out[e.parent].push_back(e.child);
    return out;
}

const char* feature_scheme_name(FeatureScheme s) {
    switch (s) {
        case FeatureScheme::none: return "none";
        case FeatureScheme::three_class: return "3class";
        case FeatureScheme::signatures: return "sig";
        case FeatureScheme::signature_group: return "siggroup";
    }
    return "none";
}

FeatureScheme feature_scheme_from_name(std::string_view name) {
    if (name == "none") return FeatureScheme::none;
    if (name == "3class") return FeatureScheme::three_class;
    if (name == "sig") return FeatureScheme::signatures;
    if (name == "siggroup") return FeatureScheme::signature_group;
    throw Error(ErrorKind::InvalidArgument, "unknown feature scheme: " + std::string(name));
}

const char* label_kind_name(LabelKind k) {
    return k == LabelKind::protocol ? "protocol" : "ffc";
}

std::string trace_to_json(const TransactionTrace& trace) {
    json calls = json::array();
    for (const auto& c : trace.calls) {
        json rec;
        rec["i"] = c.index;
        if (c.parent) rec["p"] = *c.parent;
        rec["to"] = "0x" + c.callee.hex();
        if (!c.method_name.empty()) rec["m"] = c.method_name;
        if (c.selector) rec["s"] = c.selector->hex();
        calls.push_back(std::move(rec));
    }
    json obj;
    obj["tx_id"] = trace.tx_id;
    obj["calls"] = std::move(calls);
    return obj.dump();
}

TransactionTrace trace_from_json(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("bad JSON: ") + e.what());
    }
    try {
        TransactionTrace trace;
        trace.tx_id = obj.at("tx_id").get<std::string>();
        for (const auto& rec : obj.at("calls")) {
            CallRecord c;
            c.index = rec.at("i").get<std::uint32_t>();
            if (rec.contains("p") && !rec["p"].is_null())
                c.parent = rec["p"].get<std::uint32_t>();
            c.callee = Address::parse(rec.at("to").get<std::string>());
            if (rec.contains("m") && !rec["m"].is_null())
                c.method_name = rec["m"].get<std::string>();
            if (rec.contains("s") && !rec["s"].is_null())
                c.selector = Selector::parse(rec["s"].get<std::string>());
            trace.calls.push_back(std::move(c));
        }
        return trace;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("bad trace object: ") + e.what());
    }
}

std::string block_to_json(const BuildingBlock& block) {
    json nodes = json::array();
    for (const auto& a : block.nodes) nodes.push_back("0x" + a.hex());
    json edges = json::array();
    for (const auto& e : block.edges)
        edges.push_back(json::array({e.parent, e.child, e.method, e.rank}));
    json obj;
    obj["id"] = block.block_id;
    obj["root"] = "0x" + block.root_address.hex();
    obj["root_method"] = block.root_method;
    if (block.root_selector) obj["root_selector"] = block.root_selector->hex();
    obj["nodes"] = std::move(nodes);
    obj["edges"] = std::move(edges);
    obj["count"] = block.count;
    return obj.dump();
}

BuildingBlock block_from_json(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("bad JSON: ") + e.what());
    }
    try {
        BuildingBlock b;
        b.block_id = obj.at("id").get<std::string>();
        b.root_address = Address::parse(obj.at("root").get<std::string>());
        b.root_method = obj.at("root_method").get<std::string>();
        if (obj.contains("root_selector") && !obj["root_selector"].is_null())
            b.root_selector = Selector::parse(obj["root_selector"].get<std::string>());
        for (const auto& n : obj.at("nodes")) b.nodes.push_back(Address::parse(n.get<std::string>()));
        for (const auto& e : obj.at("edges")) {
            BlockEdge edge;
            edge.parent = e.at(0).get<std::uint32_t>();
            edge.child = e.at(1).get<std::uint32_t>();
            edge.method = e.at(2).get<std::string>();
            edge.rank = e.at(3).get<std::uint32_t>();
            b.edges.push_back(std::move(edge));
        }
        b.count = obj.at("count").get<std::uint64_t>();
        return b;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("bad block object: ") + e.what());
    }
}

} // namespace blockclust
