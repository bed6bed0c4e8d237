#pragma once

#include "blockclust/core.hpp"

#include <filesystem>
#include <vector>

namespace blockclust {

struct ParseIssue {
    long line = 0;     // 1-based
    ErrorKind kind = ErrorKind::SchemaError;
    std::string message;
};

struct TraceParseResult {
    std::vector<TransactionTrace> traces;
    std::vector<ParseIssue> issues; // malformed lines, with line numbers
};

// Reads traces.jsonl (one transaction object per line). Every returned
// trace passes validate_trace; malformed lines are collected as issues.
// When `strict` is set the first bad line throws instead.
TraceParseResult parse_traces(const std::filesystem::path& path, bool strict = false);

// Reads registry.csv with header address,protocol,class,selectors
// (selectors ';'-separated hex). Duplicate addresses are rejected.
ContractRegistry parse_registry(const std::filesystem::path& path);

// First 4 bytes of the Keccak-256 digest of a canonical signature
// "name(type1,type2,...)". Spaces and unbalanced parens are rejected.
Selector selector_of(std::string_view signature);

} // namespace blockclust
