#include "blockclust/manifest.hpp"

#include "blockclust/hash.hpp"

#include <json.hpp>

#include <ctime>
#include <fstream>
#include <sstream>

namespace blockclust {

using nlohmann::json;

namespace {

json inputs_json(const RunManifest& m) {
    json j = json::object();
    for (const auto& [name, digest] : m.inputs) j[name] = digest;
    return j;
}

json extract_scope(const RunManifest& m) {
    return json{{"inputs", inputs_json(m)}, {"top_k", m.config.top_k}};
}

json feature_scope(const RunManifest& m) {
    json j = extract_scope(m);
    j["scheme"] = feature_scheme_name(m.config.scheme);
    j["group_threshold"] = m.config.group_threshold;
    return j;
}

json embedding_scope(const RunManifest& m) {
    json j = feature_scope(m);
    const TrainConfig& t = m.config.train;
    j["train"] = {{"dim", t.dim},
                  {"learning_rate", t.learning_rate},
                  {"epochs", t.epochs},
                  {"wl_depth", t.wl_depth},
                  {"negative", t.negative},
                  {"min_count", t.min_count},
                  {"seed", t.seed},
                  {"directed_wl", t.directed_wl}};
    return j;
}

std::string digest_of(const json& j) {
    return to_hex(sha256(std::string_view(j.dump())));
}

} // namespace

std::string RunManifest::extract_digest() const { return digest_of(extract_scope(*this)); }
std::string RunManifest::feature_digest() const { return digest_of(feature_scope(*this)); }
std::string RunManifest::embedding_digest() const { return digest_of(embedding_scope(*this)); }

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return to_hex(sha256(std::string_view(buf.str())));
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
    json j;
    j["tool_version"] = m.tool_version;
    j["created_at"] = m.created_at;
    j["inputs"] = inputs_json(m);
    json paths = json::object();
    for (const auto& [name, p] : m.input_paths) paths[name] = p;
    j["input_paths"] = paths;
    const PipelineConfig& c = m.config;
    j["pipeline"] = {{"top_k", c.top_k},
                     {"scheme", feature_scheme_name(c.scheme)},
                     {"group_threshold", c.group_threshold},
                     {"dim", c.train.dim},
                     {"learning_rate", c.train.learning_rate},
                     {"epochs", c.train.epochs},
                     {"wl_depth", c.train.wl_depth},
                     {"negative", c.train.negative},
                     {"min_count", c.train.min_count},
                     {"seed", c.train.seed},
                     {"directed_wl", c.train.directed_wl}};
    j["analysis"] = {{"normalize", c.normalize},
                     {"delta", c.delta},
                     {"sweep_lo", c.sweep_lo},
                     {"sweep_hi", c.sweep_hi},
                     {"sweep_step", c.sweep_step},
                     {"label", label_kind_name(c.label)},
                     {"perplexity", c.tsne.perplexity},
                     {"tsne_iterations", c.tsne.iterations},
                     {"tsne_seed", c.tsne.seed}};
    j["digests"] = {{"extract", m.extract_digest()},
                    {"features", m.feature_digest()},
                    {"embeddings", m.embedding_digest()}};

    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out.good()) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, "bad manifest: " + std::string(e.what()));
    }

    RunManifest m;
    try {
        m.tool_version = j.at("tool_version").get<std::string>();
        m.created_at = j.value("created_at", "");
        for (const auto& [name, digest] : j.at("inputs").items())
            m.inputs[name] = digest.get<std::string>();
        if (j.contains("input_paths"))
            for (const auto& [name, p] : j.at("input_paths").items())
                m.input_paths[name] = p.get<std::string>();
        const json& p = j.at("pipeline");
        m.config.top_k = p.at("top_k").get<std::size_t>();
        m.config.scheme = feature_scheme_from_name(p.at("scheme").get<std::string>());
        m.config.group_threshold = p.at("group_threshold").get<double>();
        m.config.train.dim = p.at("dim").get<std::size_t>();
        m.config.train.learning_rate = p.at("learning_rate").get<double>();
        m.config.train.epochs = p.at("epochs").get<std::size_t>();
        m.config.train.wl_depth = p.at("wl_depth").get<int>();
        m.config.train.negative = p.at("negative").get<std::size_t>();
        m.config.train.min_count = p.at("min_count").get<std::size_t>();
        m.config.train.seed = p.at("seed").get<std::uint64_t>();
        m.config.train.directed_wl = p.at("directed_wl").get<bool>();
        const json& a = j.at("analysis");
        m.config.normalize = a.at("normalize").get<bool>();
        m.config.delta = a.at("delta").get<double>();
        m.config.sweep_lo = a.at("sweep_lo").get<double>();
        m.config.sweep_hi = a.at("sweep_hi").get<double>();
        m.config.sweep_step = a.at("sweep_step").get<double>();
        std::string label = a.at("label").get<std::string>();
        m.config.label = label == "ffc" ? LabelKind::ffc : LabelKind::protocol;
        m.config.tsne.perplexity = a.at("perplexity").get<double>();
        m.config.tsne.iterations = a.at("tsne_iterations").get<std::size_t>();
        m.config.tsne.seed = a.at("tsne_seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, "bad manifest: " + std::string(e.what()));
    }
    return m;
}

} // namespace blockclust
