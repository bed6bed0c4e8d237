#include "blockclust/ingestion.hpp"

#include "blockclust/csv.hpp"
#include "blockclust/hash.hpp"

#include <fstream>

namespace blockclust {

TraceParseResult parse_traces(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path.string());

    TraceParseResult result;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            TransactionTrace trace = trace_from_json(line);
            try {
                validate_trace(trace);
            } catch (const Error& e) {
                throw Error(ErrorKind::InvalidTree, e.what(), line_no);
            }
            result.traces.push_back(std::move(trace));
        } catch (const Error& e) {
            ErrorKind kind = e.kind() == ErrorKind::InvalidTree ? ErrorKind::InvalidTree
                                                                : ErrorKind::SchemaError;
            if (strict) throw Error(kind, e.what(), line_no);
            result.issues.push_back({line_no, kind, e.what()});
        }
    }
    return result;
}

ContractRegistry parse_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path.string());

    ContractRegistry registry;
    std::string line;
    long line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = csv::parse_line(line);
        if (!saw_header) {
            if (fields != std::vector<std::string>{"address", "protocol", "class", "selectors"})
                throw Error(ErrorKind::SchemaError,
                            "registry header must be address,protocol,class,selectors", line_no);
            saw_header = true;
            continue;
        }
        if (fields.size() != 4)
            throw Error(ErrorKind::SchemaError,
                        "expected 4 fields, got " + std::to_string(fields.size()), line_no);

        ContractInfo info;
        try {
            info.address = Address::parse(fields[0]);
        } catch (const Error& e) {
            throw Error(e.kind(), e.what(), line_no);
        }
        if (!fields[1].empty()) info.protocol = fields[1];
        try {
            info.contract_class = contract_class_from_name(fields[2]);
        } catch (const Error& e) {
            throw Error(ErrorKind::UnknownClass, e.what(), line_no);
        }
        if (!fields[3].empty()) {
            std::size_t start = 0;
            const std::string& sel = fields[3];
            while (start <= sel.size()) {
                std::size_t end = sel.find(';', start);
                std::string_view part(sel.data() + start,
                                      (end == std::string::npos ? sel.size() : end) - start);
                if (!part.empty()) {
                    try {
                        info.selectors.insert(Selector::parse(part));
                    } catch (const Error& e) {
                        throw Error(ErrorKind::BadSelector, e.what(), line_no);
                    }
                }
                if (end == std::string::npos) break;
                start = end + 1;
            }
        }
        auto [it, inserted] = registry.entries.emplace(info.address, info);
        (void)it;
        if (!inserted)
            throw Error(ErrorKind::DuplicateAddress,
                        "duplicate address " + info.address.hex(), line_no);
    }
    if (!saw_header)
        throw Error(ErrorKind::SchemaError, "registry file has no header: " + path.string());
    return registry;
}

Selector selector_of(std::string_view signature) {
    if (signature.find(' ') != std::string_view::npos)
        throw Error(ErrorKind::MalformedSignature,
                    "signature contains spaces: " + std::string(signature));
    long depth = 0;
    for (char c : signature) {
        if (c == '(') ++depth;
        else if (c == ')') {
            --depth;
            if (depth < 0)
                throw Error(ErrorKind::MalformedSignature,
                            "unbalanced parens: " + std::string(signature));
        }
    }
    if (depth != 0 || signature.find('(') == std::string_view::npos)
        throw Error(ErrorKind::MalformedSignature,
                    "unbalanced parens: " + std::string(signature));

    Digest256 digest = keccak256(signature);
    Selector s;
    std::copy(digest.begin(), digest.begin() + 4, s.bytes.begin());
    return s;
}

} // namespace blockclust
