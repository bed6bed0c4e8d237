#include "blockclust/artifacts.hpp"

#include "blockclust/csv.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>

namespace blockclust {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::filesystem::path& path, long line) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error(ErrorKind::SchemaError, "bad number in " + path.string(), line);
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    if (!out.good()) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

void check_digest(const std::string& found, const std::string& expected,
                  const std::filesystem::path& path) {
    if (!expected.empty() && found != expected)
        throw Error(ErrorKind::ManifestMismatch,
                    path.string() + " was produced under a different manifest");
}

// Reads a CSV artifact: optional "# manifest=" comment, a header that must
// equal `header`, then data rows fed to `row`.
void read_csv(const std::filesystem::path& path, const std::string& expected,
              const std::string& header,
              const std::function<void(const std::vector<std::string>&, long)>& row) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::string line;
    long line_no = 0;
    std::string digest;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# manifest=", 0) == 0) {
            digest = line.substr(11);
            continue;
        }
        if (!saw_header) {
            if (line != header)
                throw Error(ErrorKind::SchemaError,
                            path.string() + ": expected header '" + header + "'", line_no);
            saw_header = true;
            continue;
        }
        row(csv::parse_line(line), line_no);
    }
    if (!saw_header)
        throw Error(ErrorKind::SchemaError, path.string() + ": missing header");
    check_digest(digest, expected, path);
}

} // namespace

void write_blocks(const std::filesystem::path& path, const Corpus& corpus,
                  const std::string& digest) {
    auto out = open_out(path);
    out << "{\"manifest\":\"" << digest << "\"}\n";
    for (const auto& block : corpus.blocks) out << block_to_json(block) << "\n";
    finish_out(out, path);
}

Corpus read_blocks(const std::filesystem::path& path, const std::string& expected) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    Corpus corpus;
    std::string line;
    long line_no = 0;
    std::string digest;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.find("\"manifest\"") != std::string::npos) {
            try {
                digest = nlohmann::json::parse(line).at("manifest").get<std::string>();
            } catch (const nlohmann::json::exception&) {
                throw Error(ErrorKind::SchemaError, "bad manifest line in " + path.string(), 1);
            }
            continue;
        }
        try {
            corpus.blocks.push_back(block_from_json(line));
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ": " + e.what(), line_no);
        }
    }
    check_digest(digest, expected, path);
    return corpus;
}

void write_features(const std::filesystem::path& path, const Corpus& corpus,
                    const std::vector<FeatureAssignment>& features, const std::string& digest) {
    if (corpus.blocks.size() != features.size())
        throw Error(ErrorKind::InvalidArgument, "features do not align with the corpus");
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    out << "block_id,scheme,tokens\n";
    for (std::size_t i = 0; i < corpus.blocks.size(); ++i) {
        std::string tokens;
        for (std::int64_t t : features[i].tokens) {
            if (!tokens.empty()) tokens += ';';
            tokens += std::to_string(t);
        }
        out << corpus.blocks[i].block_id << ',' << feature_scheme_name(features[i].scheme) << ','
            << tokens << "\n";
    }
    finish_out(out, path);
}

FeatureTable read_features(const std::filesystem::path& path, const std::string& expected) {
    FeatureTable table;
    bool first = true;
    read_csv(path, expected, "block_id,scheme,tokens",
             [&](const std::vector<std::string>& fields, long line_no) {
                 if (fields.size() != 3)
                     throw Error(ErrorKind::SchemaError, path.string() + ": want 3 fields",
                                 line_no);
                 FeatureScheme scheme = feature_scheme_from_name(fields[1]);
                 if (first) {
                     table.scheme = scheme;
                     first = false;
                 } else if (scheme != table.scheme) {
                     throw Error(ErrorKind::SchemeMismatch,
                                 path.string() + ": mixed feature schemes", line_no);
                 }
                 std::vector<std::int64_t> tokens;
                 const std::string& list = fields[2];
                 std::size_t start = 0;
                 while (start <= list.size() && !list.empty()) {
                     std::size_t semi = list.find(';', start);
                     std::string item = list.substr(
                         start, semi == std::string::npos ? std::string::npos : semi - start);
                     tokens.push_back(
                         static_cast<std::int64_t>(parse_double(item, path, line_no)));
                     if (semi == std::string::npos) break;
                     start = semi + 1;
                 }
                 table.tokens[fields[0]] = std::move(tokens);
             });
    return table;
}

void write_groups(const std::filesystem::path& path, const SignatureGroups& groups,
                  const std::string& digest) {
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    out << "group_id,fingerprint\n";
    std::map<int, std::vector<std::string>> by_group;
    for (const auto& [fingerprint, id] : groups.groups) by_group[id].push_back(fingerprint);
    for (const auto& [id, fingerprints] : by_group)
        for (const auto& f : fingerprints) out << id << ',' << f << "\n";
    finish_out(out, path);
}

SignatureGroups read_groups(const std::filesystem::path& path, double threshold,
                            const std::string& expected) {
    SignatureGroups groups;
    groups.threshold = threshold;
    read_csv(path, expected, "group_id,fingerprint",
             [&](const std::vector<std::string>& fields, long line_no) {
                 if (fields.size() != 2)
                     throw Error(ErrorKind::SchemaError, path.string() + ": want 2 fields",
                                 line_no);
                 int id = static_cast<int>(parse_double(fields[0], path, line_no));
                 groups.groups[fields[1]] = id;
                 if (id + 1 > groups.group_count) groups.group_count = id + 1;
             });
    return groups;
}

void write_labels(const std::filesystem::path& path, const LabelBundle& bundle,
                  const std::string& digest) {
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    out << "block_id,protocol,ffc\n";
    for (const auto& [block_id, ffc] : bundle.ffc.labels) {
        auto it = bundle.protocol.labels.find(block_id);
        std::string protocol = it == bundle.protocol.labels.end() ? "" : it->second;
        out << block_id << ',' << csv::escape(protocol) << ',' << csv::escape(ffc) << "\n";
    }
    finish_out(out, path);
}

LabelTable read_labels(const std::filesystem::path& path, const std::string& expected) {
    LabelTable table;
    table.protocol.kind = LabelKind::protocol;
    table.ffc.kind = LabelKind::ffc;
    read_csv(path, expected, "block_id,protocol,ffc",
             [&](const std::vector<std::string>& fields, long line_no) {
                 if (fields.size() != 3)
                     throw Error(ErrorKind::SchemaError, path.string() + ": want 3 fields",
                                 line_no);
                 if (!fields[1].empty()) table.protocol.labels[fields[0]] = fields[1];
                 table.ffc.labels[fields[0]] = fields[2];
             });
    return table;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& matrix,
                      const std::string& digest) {
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    out << "block_id";
    for (std::size_t k = 0; k < matrix.dim; ++k) out << ",e" << k;
    out << "\n";
    for (const auto& [block_id, row] : matrix.rows) {
        out << block_id;
        for (double v : row) out << ',' << format_double(v);
        out << "\n";
    }
    finish_out(out, path);
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path, const std::string& expected) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    EmbeddingMatrix matrix;
    std::string line;
    long line_no = 0;
    std::string digest;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# manifest=", 0) == 0) {
            digest = line.substr(11);
            continue;
        }
        auto fields = csv::parse_line(line);
        if (!saw_header) {
            if (fields.empty() || fields[0] != "block_id")
                throw Error(ErrorKind::SchemaError, path.string() + ": bad header", line_no);
            matrix.dim = fields.size() - 1;
            saw_header = true;
            continue;
        }
        if (fields.size() != matrix.dim + 1)
            throw Error(ErrorKind::SchemaError, path.string() + ": row width mismatch", line_no);
        std::vector<double> row(matrix.dim);
        for (std::size_t k = 0; k < matrix.dim; ++k)
            row[k] = parse_double(fields[k + 1], path, line_no);
        matrix.rows[fields[0]] = std::move(row);
    }
    if (!saw_header) throw Error(ErrorKind::SchemaError, path.string() + ": missing header");
    check_digest(digest, expected, path);
    return matrix;
}

void write_vocab(const std::filesystem::path& path, const std::vector<VocabEntry>& vocab,
                 const std::string& digest) {
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    for (const auto& entry : vocab) out << entry.token << '\t' << entry.count << "\n";
    finish_out(out, path);
}

void write_clusters(const std::filesystem::path& path, const ClusterAssignment& assignment,
                    double delta, const std::string& digest) {
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    out << "block_id,cluster_id,delta\n";
    const std::string d = format_double(delta);
    for (const auto& [block_id, cluster] : assignment)
        out << block_id << ',' << cluster << ',' << d << "\n";
    finish_out(out, path);
}

ClusterTable read_clusters(const std::filesystem::path& path, const std::string& expected) {
    ClusterTable table;
    read_csv(path, expected, "block_id,cluster_id,delta",
             [&](const std::vector<std::string>& fields, long line_no) {
                 if (fields.size() != 3)
                     throw Error(ErrorKind::SchemaError, path.string() + ": want 3 fields",
                                 line_no);
                 table.assignment[fields[0]] =
                     static_cast<int>(parse_double(fields[1], path, line_no));
                 table.delta = parse_double(fields[2], path, line_no);
             });
    return table;
}

void write_sweep(const std::filesystem::path& path, const SweepResult& result,
                 const std::string& digest) {
    auto out = open_out(path);
    out << "# manifest=" << digest << "\n";
    out << "delta,n_clusters,homogeneity,completeness,v_measure,purity\n";
    for (const auto& point : result.points)
        out << format_double(point.delta) << ',' << point.n_clusters << ','
            << format_double(point.metrics.homogeneity) << ','
            << format_double(point.metrics.completeness) << ','
            << format_double(point.metrics.v_measure) << ','
            << format_double(point.metrics.purity) << "\n";
    finish_out(out, path);
}

} // namespace blockclust
