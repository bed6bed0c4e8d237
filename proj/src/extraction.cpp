#include "blockclust/extraction.hpp"

#include "blockclust/hash.hpp"
#include "blockclust/parallel.hpp"

#include <algorithm>
#include <unordered_map>

namespace blockclust {

namespace {

std::vector<std::vector<std::uint32_t>> trace_children(const TransactionTrace& trace) {
    std::vector<std::vector<std::uint32_t>> children(trace.calls.size());
    for (const auto& call : trace.calls)
        if (call.parent) children[*call.parent].push_back(call.index);
    return children;
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void append_str(std::vector<std::uint8_t>& out, const std::string& s) {
    append_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

} // namespace

const BuildingBlock* Corpus::find(const std::string& block_id) const {
    for (const auto& b : blocks)
        if (b.block_id == block_id) return &b;
    return nullptr;
}

std::vector<std::uint32_t> find_block_roots(const TransactionTrace& trace,
                                            const ContractRegistry& registry) {
    auto children = trace_children(trace);
    std::vector<std::uint32_t> roots;
    for (const auto& call : trace.calls) {
        if (children[call.index].empty()) continue;
        const ContractInfo* info = registry.find(call.callee);
        if (info && info->protocol) roots.push_back(call.index);
    }
    return roots;
}

BuildingBlock extract_block(const TransactionTrace& trace, std::uint32_t root) {
    if (root >= trace.calls.size())
        throw Error(ErrorKind::NotARoot, "call index " + std::to_string(root) + " out of range");
    auto children = trace_children(trace);
    if (children[root].empty())
        throw Error(ErrorKind::NotARoot,
                    "call " + std::to_string(root) + " has no outgoing calls");

    const CallRecord& root_call = trace.calls[root];
    BuildingBlock block;
    block.root_address = root_call.callee;
    block.root_method = root_call.method_name;
    block.root_selector = root_call.selector;

    // Pre-order walk; local ids in discovery order, root = 0.
    struct Frame {
        std::uint32_t call;
        std::uint32_t local_parent;
        std::uint32_t rank;
    };
    block.nodes.push_back(root_call.callee);
    std::vector<Frame> stack;
    const auto& root_kids = children[root];
    for (std::size_t i = root_kids.size(); i-- > 0;)
        stack.push_back({root_kids[i], 0, static_cast<std::uint32_t>(i)});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        const CallRecord& call = trace.calls[f.call];
        auto local = static_cast<std::uint32_t>(block.nodes.size());
        block.nodes.push_back(call.callee);
        block.edges.push_back({f.local_parent, local,
                               method_token(call.method_name, call.selector), f.rank});
        const auto& kids = children[f.call];
        for (std::size_t i = kids.size(); i-- > 0;)
            stack.push_back({kids[i], local, static_cast<std::uint32_t>(i)});
    }

    block.count = 1;
    block.block_id = canonical_hash(block);
    return block;
}

std::string canonical_hash(const BuildingBlock& block) {
    auto children = block.children();

    std::vector<std::uint8_t> buf;
    buf.reserve(64 + block.edges.size() * 24);
    append_str(buf, block.root_token());
    append_u32(buf, static_cast<std::uint32_t>(children[0].size()));

    // Edge method by child id, for the pre-order walk below.
    std::vector<const std::string*> edge_method(block.nodes.size(), nullptr);
    for (const auto& e : block.edges) edge_method[e.child] = &e.method;

    struct Frame {
        std::uint32_t node;
        std::uint32_t depth;
        std::uint32_t rank;
    };
    std::vector<Frame> stack;
    for (std::size_t i = children[0].size(); i-- > 0;)
        stack.push_back({children[0][i], 1, static_cast<std::uint32_t>(i)});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        append_u32(buf, f.depth);
        append_u32(buf, f.rank);
        append_u32(buf, static_cast<std::uint32_t>(children[f.node].size()));
        append_str(buf, *edge_method[f.node]);
        const auto& kids = children[f.node];
        for (std::size_t i = kids.size(); i-- > 0;)
            stack.push_back({kids[i], f.depth + 1, static_cast<std::uint32_t>(i)});
    }

    return to_hex(sha256(buf));
}

BuildingBlock subtree_of(const BuildingBlock& block, std::uint32_t node) {
    if (node >= block.nodes.size())
        throw Error(ErrorKind::InvalidArgument,
                    "node " + std::to_string(node) + " out of range");
    if (node == 0) {
        BuildingBlock copy = block;
        copy.count = 0;
        return copy;
    }

    auto children = block.children();
    std::vector<const std::string*> edge_method(block.nodes.size(), nullptr);
    for (const auto& e : block.edges) edge_method[e.child] = &e.method;

    BuildingBlock sub;
    sub.root_address = block.nodes[node];
    const std::string& token = *edge_method[node];
    if (token.size() == 9 && token[0] == 's')
        sub.root_selector = Selector::parse(token.substr(1));
    else
        sub.root_method = token.substr(1);

    struct Frame {
        std::uint32_t orig;
        std::uint32_t local_parent;
        std::uint32_t rank;
    };
    sub.nodes.push_back(block.nodes[node]);
    std::vector<Frame> stack;
    const auto& root_kids = children[node];
    for (std::size_t i = root_kids.size(); i-- > 0;)
        stack.push_back({root_kids[i], 0, static_cast<std::uint32_t>(i)});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        auto local = static_cast<std::uint32_t>(sub.nodes.size());
        sub.nodes.push_back(block.nodes[f.orig]);
        sub.edges.push_back({f.local_parent, local, *edge_method[f.orig], f.rank});
        const auto& kids = children[f.orig];
        for (std::size_t i = kids.size(); i-- > 0;)
            stack.push_back({kids[i], local, static_cast<std::uint32_t>(i)});
    }

    sub.count = 0;
    sub.block_id = canonical_hash(sub);
    return sub;
}

Corpus aggregate(const std::vector<BuildingBlock>& blocks) {
    std::unordered_map<std::string, std::size_t> index;
    Corpus corpus;
    for (const auto& block : blocks) {
        auto it = index.find(block.block_id);
        if (it == index.end()) {
            index.emplace(block.block_id, corpus.blocks.size());
            corpus.blocks.push_back(block);
            corpus.blocks.back().count = 1;
        } else {
            corpus.blocks[it->second].count += 1;
        }
    }
    std::sort(corpus.blocks.begin(), corpus.blocks.end(),
              [](const BuildingBlock& a, const BuildingBlock& b) {
                  if (a.count != b.count) return a.count > b.count;
                  return a.block_id < b.block_id;
              });
    return corpus;
}

Corpus filter_corpus(const Corpus& corpus, std::size_t top_k) {
    if (top_k < 1)
        throw Error(ErrorKind::InvalidArgument, "top_k must be >= 1");
    Corpus out;
    for (const auto& block : corpus.blocks) {
        if (out.blocks.size() + 1 > top_k) break;
        out.blocks.push_back(block);
    }
    std::erase_if(out.blocks, [](const BuildingBlock& b) { return b.node_count() < 2; });
    return out;
}

Corpus extract_corpus(const std::vector<TransactionTrace>& traces,
                      const ContractRegistry& registry) {
    std::vector<std::vector<BuildingBlock>> per_trace(traces.size());
    parallel_for(traces.size(), [&](std::size_t i) {
        for (std::uint32_t root : find_block_roots(traces[i], registry))
            per_trace[i].push_back(extract_block(traces[i], root));
    });
    std::vector<BuildingBlock> all;
    for (auto& blocks : per_trace)
        for (auto& b : blocks) all.push_back(std::move(b));
    return aggregate(all);
}

} // namespace blockclust
