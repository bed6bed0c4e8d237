// Command-line front end for the building-block clustering pipeline.
//
// Subcommands cover the pipeline stages (synth, extract, featurize, embed,
// cluster, evaluate, project) plus `report`, which runs every feature
// scheme against both label kinds and renders the resulting metric matrix.
// Each stage reads the run manifest from the work directory, verifies that
// its input artifacts carry the digest the current configuration implies,
// and refuses mixed lineages with a ManifestMismatch error.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 internal. Failures print a
// single JSON object on stderr: {"error": {"kind", "message", "line"}}.

#include "blockclust/artifacts.hpp"
#include "blockclust/clustering.hpp"
#include "blockclust/core.hpp"
#include "blockclust/errors.hpp"
#include "blockclust/evaluation.hpp"
#include "blockclust/extraction.hpp"
#include "blockclust/featurization.hpp"
#include "blockclust/ingestion.hpp"
#include "blockclust/labeling.hpp"
#include "blockclust/manifest.hpp"
#include "blockclust/projection.hpp"
#include "blockclust/pvdbow.hpp"
#include "blockclust/synthgen.hpp"
#include "blockclust/wl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace blockclust;

namespace {

constexpr const char* kToolVersion = "blockclust 0.1.0";

std::string now_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::InvalidDelta:
        case ErrorKind::InvalidSpec: return 2;
        case ErrorKind::Internal: return 4;
        default: return 3;
    }
}

void print_error(const std::string& kind, const std::string& message, long line = -1) {
    json e{{"kind", kind}, {"message", message}};
    if (line >= 0) e["line"] = line;
    std::cerr << json{{"error", e}}.dump() << "\n";
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

// Config file: a flat JSON object whose keys mirror the long flag names.
// Precedence is flags > config file > stored manifest (or built-in
// defaults when no manifest exists yet).
void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, "bad config file: " + std::string(e.what()));
    }
    try {
        if (j.contains("top_k")) cfg.top_k = j["top_k"].get<std::size_t>();
        if (j.contains("scheme"))
            cfg.scheme = feature_scheme_from_name(j["scheme"].get<std::string>());
        if (j.contains("group_threshold")) cfg.group_threshold = j["group_threshold"].get<double>();
        if (j.contains("dim")) cfg.train.dim = j["dim"].get<std::size_t>();
        if (j.contains("learning_rate")) cfg.train.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("epochs")) cfg.train.epochs = j["epochs"].get<std::size_t>();
        if (j.contains("wl_depth")) cfg.train.wl_depth = j["wl_depth"].get<int>();
        if (j.contains("negative")) cfg.train.negative = j["negative"].get<std::size_t>();
        if (j.contains("min_count")) cfg.train.min_count = j["min_count"].get<std::size_t>();
        if (j.contains("seed")) cfg.train.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("directed_wl")) cfg.train.directed_wl = j["directed_wl"].get<bool>();
        if (j.contains("normalize")) cfg.normalize = j["normalize"].get<bool>();
        if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
        if (j.contains("sweep_lo")) cfg.sweep_lo = j["sweep_lo"].get<double>();
        if (j.contains("sweep_hi")) cfg.sweep_hi = j["sweep_hi"].get<double>();
        if (j.contains("sweep_step")) cfg.sweep_step = j["sweep_step"].get<double>();
        if (j.contains("label"))
            cfg.label = j["label"].get<std::string>() == "ffc" ? LabelKind::ffc
                                                               : LabelKind::protocol;
        if (j.contains("perplexity")) cfg.tsne.perplexity = j["perplexity"].get<double>();
        if (j.contains("tsne_iterations"))
            cfg.tsne.iterations = j["tsne_iterations"].get<std::size_t>();
        if (j.contains("tsne_seed")) cfg.tsne.seed = j["tsne_seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, "bad config value: " + std::string(e.what()));
    }
}

RunManifest load_dir_manifest(const fs::path& out) {
    fs::path p = out / "manifest.json";
    if (!fs::exists(p))
        throw Error(ErrorKind::IoError,
                    p.string() + " not found; run `extract` into this directory first");
    return load_manifest(p);
}

// Re-reads a recorded input, insisting its content still matches the
// digest the manifest was built from.
fs::path verified_input(const RunManifest& m, const std::string& name,
                        const std::string& override_path) {
    fs::path p = override_path.empty()
                     ? fs::path(m.input_paths.count(name) ? m.input_paths.at(name) : "")
                     : fs::path(override_path);
    if (p.empty())
        throw Error(ErrorKind::SchemaError, "manifest records no path for input '" + name + "'");
    if (file_sha256(p) != m.inputs.at(name))
        throw Error(ErrorKind::ManifestMismatch,
                    p.string() + " no longer matches the digest recorded for '" + name + "'");
    return p;
}

ContractRegistry reload_registry(const RunManifest& m, const std::string& override_path = "") {
    return parse_registry(verified_input(m, "registry", override_path));
}

std::vector<FfcRule> reload_rules(const RunManifest& m) {
    if (m.inputs.count("ffc_rules")) return load_ffc_rules(verified_input(m, "ffc_rules", ""));
    return default_ffc_rules();
}

// Aligns a feature table with the corpus, erroring on blocks the table
// does not cover.
std::vector<FeatureAssignment> align_features(const Corpus& corpus, const FeatureTable& table) {
    std::vector<FeatureAssignment> features;
    features.reserve(corpus.blocks.size());
    for (const auto& block : corpus.blocks) {
        auto it = table.tokens.find(block.block_id);
        if (it == table.tokens.end())
            throw Error(ErrorKind::SchemaError, "features.csv misses block " + block.block_id);
        FeatureAssignment fa;
        fa.scheme = table.scheme;
        fa.tokens = it->second;
        features.push_back(std::move(fa));
    }
    return features;
}

json metrics_json(const Metrics& m) {
    return json{{"homogeneity", m.homogeneity},
                {"completeness", m.completeness},
                {"v_measure", m.v_measure},
                {"purity", m.purity}};
}

int cluster_count(const ClusterAssignment& assignment) {
    int n = 0;
    for (const auto& [id, cluster] : assignment) n = std::max(n, cluster + 1);
    return n;
}

// ---------------------------------------------------------------- stages

void cmd_synth(const fs::path& out, const SynthSpec& spec) {
    fs::create_directories(out);
    SynthPaths paths = generate(spec, out);
    std::cerr << "[synth] wrote " << paths.traces << ", " << paths.registry << ", " << paths.truth
              << "\n";
    std::cout << json{{"traces", paths.traces.string()},
                      {"registry", paths.registry.string()},
                      {"truth", paths.truth.string()}}
                     .dump()
              << "\n";
}

void cmd_extract(const fs::path& out, const fs::path& traces_path, const fs::path& registry_path,
                 const std::string& rules_path, const PipelineConfig& cfg) {
    fs::create_directories(out);

    TraceParseResult parsed = parse_traces(traces_path);
    if (!parsed.issues.empty())
        std::cerr << "[extract] skipped " << parsed.issues.size() << " malformed trace lines\n";
    ContractRegistry registry = parse_registry(registry_path);
    std::vector<FfcRule> rules =
        rules_path.empty() ? default_ffc_rules() : load_ffc_rules(rules_path);

    Corpus full = extract_corpus(parsed.traces, registry);
    Corpus filtered = filter_corpus(full, cfg.top_k);

    RunManifest m;
    m.tool_version = kToolVersion;
    m.created_at = now_utc();
    m.config = cfg;
    m.inputs["traces"] = file_sha256(traces_path);
    m.inputs["registry"] = file_sha256(registry_path);
    m.input_paths["traces"] = fs::absolute(traces_path).string();
    m.input_paths["registry"] = fs::absolute(registry_path).string();
    if (!rules_path.empty()) {
        m.inputs["ffc_rules"] = file_sha256(rules_path);
        m.input_paths["ffc_rules"] = fs::absolute(fs::path(rules_path)).string();
    }

    const std::string digest = m.extract_digest();
    write_blocks(out / "blocks.jsonl", filtered, digest);
    write_blocks(out / "blocks_prefilter.jsonl", full, digest);
    LabelBundle labels = build_label_sets(filtered, registry, rules, &full);
    write_labels(out / "labels.csv", labels, digest);
    save_manifest(m, out / "manifest.json");

    std::cerr << "[extract] " << parsed.traces.size() << " traces -> " << full.blocks.size()
              << " distinct blocks, " << filtered.blocks.size() << " kept\n";
    std::cout << json{{"traces", parsed.traces.size()},
                      {"blocks", full.blocks.size()},
                      {"kept", filtered.blocks.size()},
                      {"manifest", digest}}
                     .dump()
              << "\n";
}

void cmd_featurize(const fs::path& out, RunManifest m, const std::string& registry_override) {
    Corpus corpus = read_blocks(out / "blocks.jsonl", m.extract_digest());
    ContractRegistry registry = reload_registry(m, registry_override);

    const std::string digest = m.feature_digest();
    std::optional<SignatureGroups> groups;
    if (m.config.scheme == FeatureScheme::signature_group) {
        groups = build_signature_groups(registry, m.config.group_threshold);
        write_groups(out / "groups.csv", *groups, digest);
    }
    std::vector<FeatureAssignment> features =
        featurize_corpus(corpus, registry, m.config.scheme, groups ? &*groups : nullptr);
    write_features(out / "features.csv", corpus, features, digest);
    save_manifest(m, out / "manifest.json");

    std::cerr << "[featurize] scheme " << feature_scheme_name(m.config.scheme) << " over "
              << corpus.blocks.size() << " blocks\n";
    std::cout << json{{"scheme", feature_scheme_name(m.config.scheme)},
                      {"blocks", corpus.blocks.size()},
                      {"manifest", digest}}
                     .dump()
              << "\n";
}

void cmd_embed(const fs::path& out, RunManifest m) {
    m.config.train.validate();
    Corpus corpus = read_blocks(out / "blocks.jsonl", m.extract_digest());
    FeatureTable table = read_features(out / "features.csv", m.feature_digest());
    std::vector<FeatureAssignment> features = align_features(corpus, table);

    std::vector<WlDocument> docs =
        wl_documents(corpus, features, m.config.train.wl_depth, m.config.train.directed_wl);
    EmbeddingMatrix matrix = train_embeddings(docs, m.config.train);

    const std::string digest = m.embedding_digest();
    write_embeddings(out / "embeddings.csv", matrix, digest);
    write_vocab(out / "vocab.txt", build_vocabulary(docs, m.config.train.min_count), digest);
    save_manifest(m, out / "manifest.json");

    std::cerr << "[embed] " << matrix.rows.size() << " blocks x " << matrix.dim << " dims\n";
    std::cout << json{{"blocks", matrix.rows.size()}, {"dim", matrix.dim}, {"manifest", digest}}
                     .dump()
              << "\n";
}

void cmd_cluster(const fs::path& out, RunManifest m, bool delta_given) {
    EmbeddingMatrix matrix = read_embeddings(out / "embeddings.csv", m.embedding_digest());
    const std::string digest = m.embedding_digest();

    if (delta_given) {
        ClusterAssignment assignment = cluster(matrix, m.config.delta, m.config.normalize);
        write_clusters(out / "clusters.csv", assignment, m.config.delta, digest);
        save_manifest(m, out / "manifest.json");
        std::cerr << "[cluster] delta " << m.config.delta << " -> " << cluster_count(assignment)
                  << " clusters\n";
        std::cout << json{{"delta", m.config.delta},
                          {"n_clusters", cluster_count(assignment)},
                          {"manifest", digest}}
                         .dump()
                  << "\n";
        return;
    }

    LabelTable labels = read_labels(out / "labels.csv", m.extract_digest());
    const LabelSet& ls = m.config.label == LabelKind::ffc ? labels.ffc : labels.protocol;
    m.config.delta = 0.0; // sweep mode
    SweepResult result = sweep(matrix, ls, m.config.sweep_lo, m.config.sweep_hi,
                               m.config.sweep_step, m.config.normalize);
    write_sweep(out / "sweep.csv", result, digest);
    ClusterAssignment assignment = cluster(matrix, result.best_delta, m.config.normalize);
    write_clusters(out / "clusters.csv", assignment, result.best_delta, digest);
    save_manifest(m, out / "manifest.json");

    std::cerr << "[cluster] sweep best delta " << result.best_delta << " -> "
              << result.best_n_clusters << " clusters, V " << result.best_metrics.v_measure
              << "\n";
    json row = metrics_json(result.best_metrics);
    row["delta"] = result.best_delta;
    row["n_clusters"] = result.best_n_clusters;
    row["label"] = label_kind_name(ls.kind);
    row["manifest"] = digest;
    std::cout << row.dump() << "\n";
}

void cmd_evaluate(const fs::path& out, RunManifest m) {
    ClusterTable clusters = read_clusters(out / "clusters.csv", m.embedding_digest());
    LabelTable labels = read_labels(out / "labels.csv", m.extract_digest());
    const LabelSet& ls = m.config.label == LabelKind::ffc ? labels.ffc : labels.protocol;

    Metrics met = metrics(clusters.assignment, ls);
    std::vector<ClusterBreakdown> breakdown = cluster_report(clusters.assignment, ls);

    json j = metrics_json(met);
    j["label"] = label_kind_name(ls.kind);
    j["delta"] = clusters.delta;
    j["n_clusters"] = cluster_count(clusters.assignment);
    j["manifest"] = m.embedding_digest();
    json rows = json::array();
    for (const auto& b : breakdown) {
        json top = json::array();
        for (const auto& [label, count] : b.top_labels) top.push_back({{label, count}});
        rows.push_back({{"cluster", b.cluster_id},
                        {"size", b.size},
                        {"majority_label", b.majority_label},
                        {"majority_fraction", b.majority_fraction},
                        {"top_labels", top}});
    }
    j["clusters"] = rows;

    std::ofstream f(out / "evaluation.json");
    if (!f) throw Error(ErrorKind::IoError, "cannot write evaluation.json");
    f << j.dump(2) << "\n";
    if (!f.good()) throw Error(ErrorKind::IoError, "write failed: evaluation.json");

    json summary = metrics_json(met);
    summary["label"] = label_kind_name(ls.kind);
    summary["delta"] = clusters.delta;
    summary["n_clusters"] = cluster_count(clusters.assignment);
    summary["manifest"] = m.embedding_digest();
    std::cout << summary.dump() << "\n";
    std::cerr << "[evaluate] " << label_kind_name(ls.kind) << " purity " << met.purity << " V "
              << met.v_measure << "\n";
}

void cmd_project(const fs::path& out, RunManifest m) {
    m.config.tsne.validate();
    EmbeddingMatrix matrix = read_embeddings(out / "embeddings.csv", m.embedding_digest());
    LabelTable labels = read_labels(out / "labels.csv", m.extract_digest());
    const LabelSet& ls = m.config.label == LabelKind::ffc ? labels.ffc : labels.protocol;

    Projection projection = tsne(matrix, m.config.tsne);
    std::vector<ProjectedPoint> points;
    points.reserve(projection.block_ids.size());
    for (std::size_t i = 0; i < projection.block_ids.size(); ++i) {
        ProjectedPoint p;
        p.block_id = projection.block_ids[i];
        p.x = projection.coords[i][0];
        p.y = projection.coords[i][1];
        auto it = ls.labels.find(p.block_id);
        if (it != ls.labels.end()) p.label = it->second;
        points.push_back(std::move(p));
    }
    export_plot(points, out / "projection.csv", out / "projection.svg", m.embedding_digest());
    save_manifest(m, out / "manifest.json");

    std::cerr << "[project] " << points.size() << " points -> projection.csv / projection.svg\n";
    std::cout << json{{"points", points.size()}, {"manifest", m.embedding_digest()}}.dump()
              << "\n";
}

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

void cmd_report(const fs::path& out, RunManifest m, const std::string& registry_override) {
    Corpus corpus = read_blocks(out / "blocks.jsonl", m.extract_digest());
    Corpus prefilter = read_blocks(out / "blocks_prefilter.jsonl", m.extract_digest());
    ContractRegistry registry = reload_registry(m, registry_override);
    std::vector<FfcRule> rules = reload_rules(m);
    LabelBundle bundle = build_label_sets(corpus, registry, rules, &prefilter);

    const FeatureScheme schemes[] = {FeatureScheme::none, FeatureScheme::three_class,
                                     FeatureScheme::signatures, FeatureScheme::signature_group};
    const LabelKind kinds[] = {LabelKind::ffc, LabelKind::protocol};

    struct Cell {
        FeatureScheme scheme;
        LabelKind label;
        double delta = 0.0;
        int n_clusters = 0;
        Metrics metrics;
        std::string embedding_digest;
    };
    std::vector<Cell> cells;
    ClusterAssignment chosen_assignment; // the configured scheme x label cell
    double chosen_delta = 0.0;
    std::vector<FeatureAssignment> chosen_features;

    for (FeatureScheme scheme : schemes) {
        RunManifest stage = m;
        stage.config.scheme = scheme;
        std::optional<SignatureGroups> groups;
        if (scheme == FeatureScheme::signature_group)
            groups = build_signature_groups(registry, m.config.group_threshold);
        std::vector<FeatureAssignment> features =
            featurize_corpus(corpus, registry, scheme, groups ? &*groups : nullptr);
        std::vector<WlDocument> docs =
            wl_documents(corpus, features, m.config.train.wl_depth, m.config.train.directed_wl);
        EmbeddingMatrix matrix = train_embeddings(docs, m.config.train);
        EmbeddingLinkage linkage = embedding_linkage(matrix, m.config.normalize);

        for (LabelKind kind : kinds) {
            const LabelSet& ls = kind == LabelKind::ffc ? bundle.ffc : bundle.protocol;
            SweepResult sr = sweep(matrix, ls, m.config.sweep_lo, m.config.sweep_hi,
                                   m.config.sweep_step, m.config.normalize);
            cells.push_back({scheme, kind, sr.best_delta, sr.best_n_clusters, sr.best_metrics,
                             stage.embedding_digest()});
            if (scheme == m.config.scheme && kind == m.config.label) {
                chosen_assignment = cut_assignment(linkage, sr.best_delta);
                chosen_delta = sr.best_delta;
                chosen_features = features;
            }
            std::cerr << "[report] " << feature_scheme_name(scheme) << " x "
                      << label_kind_name(kind) << ": V " << sr.best_metrics.v_measure
                      << " purity " << sr.best_metrics.purity << " at delta " << sr.best_delta
                      << "\n";
        }
        if (scheme == m.config.scheme && chosen_features.empty()) chosen_features = features;
    }

    // metrics.json: one row per scheme x label.
    json rows = json::array();
    for (const Cell& c : cells) {
        json row = metrics_json(c.metrics);
        row["scheme"] = feature_scheme_name(c.scheme);
        row["label"] = label_kind_name(c.label);
        row["delta"] = c.delta;
        row["n_clusters"] = c.n_clusters;
        row["embedding_digest"] = c.embedding_digest;
        rows.push_back(row);
    }
    json mj{{"manifest", m.extract_digest()}, {"rows", rows}};
    {
        std::ofstream f(out / "metrics.json");
        if (!f) throw Error(ErrorKind::IoError, "cannot write metrics.json");
        f << mj.dump(2) << "\n";
        if (!f.good()) throw Error(ErrorKind::IoError, "write failed: metrics.json");
    }

    // report.md
    std::ofstream md(out / "report.md");
    if (!md) throw Error(ErrorKind::IoError, "cannot write report.md");
    md << "# Building-block clustering report\n\n";
    md << "- manifest: `" << m.extract_digest() << "`\n";
    md << "- blocks: " << corpus.blocks.size() << " (from " << prefilter.blocks.size()
       << " before the single-node filter)\n";
    md << "- embedding: dim " << m.config.train.dim << ", WL depth " << m.config.train.wl_depth
       << ", epochs " << m.config.train.epochs << ", seed " << m.config.train.seed << "\n";
    md << "- cut: sweep delta in [" << m.config.sweep_lo << ", " << m.config.sweep_hi << "] step "
       << m.config.sweep_step << ", best V-measure per cell\n\n";

    auto distribution = [&md](const char* title, const std::vector<LabelDistribution>& dist) {
        md << "## " << title << "\n\n";
        md << "| label | blocks before filter | blocks after filter |\n";
        md << "|---|---:|---:|\n";
        for (const auto& d : dist)
            md << "| " << d.label << " | " << d.count_before << " | " << d.count_after << " |\n";
        md << "\n";
    };
    distribution("Protocol label distribution", bundle.protocol_report);
    distribution("Functionality label distribution", bundle.ffc_report);

    md << "## Metrics by feature scheme\n\n";
    for (LabelKind kind : kinds) {
        md << "### " << (kind == LabelKind::ffc ? "Functionality labels" : "Protocol labels")
           << "\n\n";
        md << "| features | purity | homogeneity | completeness | V-measure | delta | clusters "
              "|\n";
        md << "|---|---:|---:|---:|---:|---:|---:|\n";
        for (const Cell& c : cells) {
            if (c.label != kind) continue;
            md << "| " << feature_scheme_name(c.scheme) << " | " << format_pct(c.metrics.purity)
               << " | " << format_pct(c.metrics.homogeneity) << " | "
               << format_pct(c.metrics.completeness) << " | " << format_pct(c.metrics.v_measure)
               << " | " << format_pct(c.delta) << " | " << c.n_clusters << " |\n";
        }
        md << "\n";
    }

    const LabelSet& chosen_labels =
        m.config.label == LabelKind::ffc ? bundle.ffc : bundle.protocol;
    if (!chosen_assignment.empty()) {
        std::vector<ClusterBreakdown> breakdown = cluster_report(chosen_assignment, chosen_labels);
        std::sort(breakdown.begin(), breakdown.end(),
                  [](const ClusterBreakdown& a, const ClusterBreakdown& b) {
                      if (a.size != b.size) return a.size > b.size;
                      return a.cluster_id < b.cluster_id;
                  });
        md << "## Largest clusters (" << feature_scheme_name(m.config.scheme) << " features, "
           << label_kind_name(m.config.label) << " labels, delta " << format_pct(chosen_delta)
           << ")\n\n";
        md << "| cluster | size | majority label | share | runners-up |\n";
        md << "|---:|---:|---|---:|---|\n";
        std::size_t shown = 0;
        for (const auto& b : breakdown) {
            if (++shown > 15) break;
            md << "| " << b.cluster_id << " | " << b.size << " | " << b.majority_label << " | "
               << format_pct(b.majority_fraction) << " | ";
            bool first = true;
            for (std::size_t i = 1; i < b.top_labels.size(); ++i) {
                if (!first) md << ", ";
                md << b.top_labels[i].first << " (" << b.top_labels[i].second << ")";
                first = false;
            }
            md << " |\n";
        }
        md << "\n";
    }

    // Shared substructure between the most frequent blocks.
    md << "## Shared subtrees among the most frequent blocks\n\n";
    std::vector<std::size_t> top;
    for (std::size_t i = 0; i < corpus.blocks.size() && top.size() < 12; ++i) top.push_back(i);
    std::size_t found = 0;
    for (std::size_t a = 0; a < top.size(); ++a) {
        for (std::size_t b = a + 1; b < top.size(); ++b) {
            const BuildingBlock& ba = corpus.blocks[top[a]];
            const BuildingBlock& bb = corpus.blocks[top[b]];
            OverlapResult r = overlap(ba, bb, chosen_features[top[a]], chosen_features[top[b]],
                                      m.config.train.wl_depth);
            if (r.jaccard < 0.5 && !r.contains()) continue;
            ++found;
            md << "- `" << ba.block_id.substr(0, 12) << "` vs `" << bb.block_id.substr(0, 12)
               << "`: WL Jaccard " << format_pct(r.jaccard);
            if (r.first_contains_second) md << "; the first contains the second";
            if (r.second_contains_first) md << "; the second contains the first";
            md << "\n";
        }
    }
    if (found == 0) md << "No pair of top blocks shares more than half its WL structure.\n";
    md << "\n";
    if (!md.good()) throw Error(ErrorKind::IoError, "write failed: report.md");
    md.close();

    save_manifest(m, out / "manifest.json");
    std::cerr << "[report] wrote metrics.json and report.md\n";
    std::cout << mj.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building-block extraction, embedding and clustering pipeline"};
    app.require_subcommand(1);
    // Let global options (--config, --deterministic) appear after the
    // subcommand name as well; subcommands inherit this at creation.
    app.fallthrough();
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)")
        ->check(CLI::ExistingFile);
    bool deterministic = false;
    app.add_flag("--deterministic", deterministic, "single worker thread everywhere");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic planted corpus");
    std::string synth_out;
    SynthSpec spec;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--protocols", spec.n_protocols, "number of protocols");
    synth->add_option("--blocks", spec.blocks_per_protocol, "transactions per protocol");
    synth->add_option("--archetypes", spec.n_archetypes, "archetypes per protocol (max 8)");
    synth->add_option("--noise", spec.noise_rate, "per-block noise probability");
    synth->add_option("--seed", spec.seed, "generator seed");

    // extract
    auto* extract = app.add_subcommand("extract", "parse traces and extract building blocks");
    std::string ex_out, ex_traces, ex_registry, ex_rules;
    extract->add_option("--traces", ex_traces, "traces.jsonl")->required();
    extract->add_option("--registry", ex_registry, "registry.csv")->required();
    extract->add_option("--out", ex_out, "work directory")->required();
    extract->add_option("--ffc-rules", ex_rules, "functionality keyword rules (JSON)");
    std::size_t ex_top_k = 0;
    auto* o_top_k = extract->add_option("--top-k", ex_top_k, "keep the k most frequent blocks");

    // featurize
    auto* featurize = app.add_subcommand("featurize", "assign node feature tokens");
    std::string fz_out, fz_scheme, fz_registry;
    featurize->add_option("--out", fz_out, "work directory")->required();
    auto* o_scheme = featurize->add_option("--scheme", fz_scheme, "none|3class|sig|siggroup")
                         ->check(CLI::IsMember({"none", "3class", "sig", "siggroup"}));
    featurize->add_option("--registry", fz_registry, "registry path override");
    double fz_threshold = 0.0;
    auto* o_threshold =
        featurize->add_option("--group-threshold", fz_threshold, "signature-group cut height");

    // embed
    auto* embed = app.add_subcommand("embed", "train graph embeddings");
    std::string em_out;
    embed->add_option("--out", em_out, "work directory")->required();
    std::size_t em_dim = 0, em_epochs = 0, em_negative = 0, em_min_count = 0;
    double em_lr = 0.0;
    int em_wl = 0;
    std::uint64_t em_seed = 0;
    bool em_directed = false;
    auto* o_dim = embed->add_option("--dim", em_dim, "embedding dimension");
    auto* o_lr = embed->add_option("--learning-rate", em_lr, "initial learning rate");
    auto* o_epochs = embed->add_option("--epochs", em_epochs, "training epochs");
    auto* o_wl = embed->add_option("--wl-depth", em_wl, "WL iterations per block");
    auto* o_negative = embed->add_option("--negative", em_negative, "negative samples per word");
    auto* o_min_count = embed->add_option("--min-count", em_min_count, "vocabulary cutoff");
    auto* o_seed = embed->add_option("--seed", em_seed, "training seed");
    auto* o_directed = embed->add_flag("--directed-wl", em_directed, "children-only WL neighbors");

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "agglomerate embeddings and cut");
    std::string cl_out, cl_label;
    cluster_cmd->add_option("--out", cl_out, "work directory")->required();
    double cl_delta = 0.0;
    auto* o_delta = cluster_cmd->add_option("--delta", cl_delta, "fixed cut height");
    bool cl_sweep = false;
    cluster_cmd->add_flag("--sweep", cl_sweep, "sweep the cut height (default without --delta)");
    double cl_lo = 0.0, cl_hi = 0.0, cl_step = 0.0;
    auto* o_lo = cluster_cmd->add_option("--sweep-lo", cl_lo, "sweep start");
    auto* o_hi = cluster_cmd->add_option("--sweep-hi", cl_hi, "sweep end");
    auto* o_step = cluster_cmd->add_option("--sweep-step", cl_step, "sweep step");
    bool cl_normalize = true;
    auto* o_normalize = cluster_cmd->add_flag("--normalize,!--no-normalize", cl_normalize,
                                              "unit-normalize rows before distances");
    auto* o_cl_label = cluster_cmd->add_option("--label", cl_label, "sweep scoring labels")
                           ->check(CLI::IsMember({"protocol", "ffc"}));

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score clusters against labels");
    std::string ev_out, ev_label;
    evaluate->add_option("--out", ev_out, "work directory")->required();
    auto* o_ev_label = evaluate->add_option("--label", ev_label, "protocol|ffc")
                           ->check(CLI::IsMember({"protocol", "ffc"}));

    // project
    auto* project = app.add_subcommand("project", "2-d t-SNE projection and scatter plot");
    std::string pj_out, pj_label;
    project->add_option("--out", pj_out, "work directory")->required();
    double pj_perplexity = 0.0;
    std::size_t pj_iterations = 0;
    std::uint64_t pj_seed = 0;
    auto* o_perplexity = project->add_option("--perplexity", pj_perplexity, "t-SNE perplexity");
    auto* o_iterations = project->add_option("--iterations", pj_iterations, "gradient steps");
    auto* o_pj_seed = project->add_option("--tsne-seed", pj_seed, "projection seed");
    auto* o_pj_label = project->add_option("--label", pj_label, "coloring labels")
                           ->check(CLI::IsMember({"protocol", "ffc"}));

    // report
    auto* report = app.add_subcommand("report", "all feature schemes x both label kinds");
    std::string rp_out, rp_registry;
    report->add_option("--out", rp_out, "work directory")->required();
    report->add_option("--registry", rp_registry, "registry path override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("InvalidArgument", e.what());
        return 2;
    }

    if (deterministic) setenv("BLOCKCLUST_THREADS", "1", 1);

    try {
        if (synth->parsed()) {
            spec.validate();
            cmd_synth(synth_out, spec);
        } else if (extract->parsed()) {
            PipelineConfig cfg;
            if (!config_path.empty()) apply_config_file(cfg, config_path);
            if (given(o_top_k)) cfg.top_k = ex_top_k;
            cmd_extract(ex_out, ex_traces, ex_registry, ex_rules, cfg);
        } else {
            // Stages below start from the stored manifest instead of the
            // defaults, so settings persist across invocations.
            const fs::path out = featurize->parsed()   ? fz_out
                                 : embed->parsed()     ? em_out
                                 : cluster_cmd->parsed() ? cl_out
                                 : evaluate->parsed()  ? ev_out
                                 : project->parsed()   ? pj_out
                                                       : rp_out;
            RunManifest m = load_dir_manifest(out);
            m.tool_version = kToolVersion;
            m.created_at = now_utc();
            if (!config_path.empty()) apply_config_file(m.config, config_path);

            if (featurize->parsed()) {
                if (given(o_scheme)) m.config.scheme = feature_scheme_from_name(fz_scheme);
                if (given(o_threshold)) m.config.group_threshold = fz_threshold;
                cmd_featurize(out, std::move(m), fz_registry);
            } else if (embed->parsed()) {
                if (given(o_dim)) m.config.train.dim = em_dim;
                if (given(o_lr)) m.config.train.learning_rate = em_lr;
                if (given(o_epochs)) m.config.train.epochs = em_epochs;
                if (given(o_wl)) m.config.train.wl_depth = em_wl;
                if (given(o_negative)) m.config.train.negative = em_negative;
                if (given(o_min_count)) m.config.train.min_count = em_min_count;
                if (given(o_seed)) m.config.train.seed = em_seed;
                if (given(o_directed)) m.config.train.directed_wl = em_directed;
                cmd_embed(out, std::move(m));
            } else if (cluster_cmd->parsed()) {
                if (given(o_normalize)) m.config.normalize = cl_normalize;
                if (given(o_lo)) m.config.sweep_lo = cl_lo;
                if (given(o_hi)) m.config.sweep_hi = cl_hi;
                if (given(o_step)) m.config.sweep_step = cl_step;
                if (given(o_cl_label))
                    m.config.label = cl_label == "ffc" ? LabelKind::ffc : LabelKind::protocol;
                bool delta_given = given(o_delta) && !cl_sweep;
                if (given(o_delta)) m.config.delta = cl_delta;
                cmd_cluster(out, std::move(m), delta_given);
            } else if (evaluate->parsed()) {
                if (given(o_ev_label))
                    m.config.label = ev_label == "ffc" ? LabelKind::ffc : LabelKind::protocol;
                cmd_evaluate(out, std::move(m));
            } else if (project->parsed()) {
                if (given(o_perplexity)) m.config.tsne.perplexity = pj_perplexity;
                if (given(o_iterations)) m.config.tsne.iterations = pj_iterations;
                if (given(o_pj_seed)) m.config.tsne.seed = pj_seed;
                if (given(o_pj_label))
                    m.config.label = pj_label == "ffc" ? LabelKind::ffc : LabelKind::protocol;
                cmd_project(out, std::move(m));
            } else if (report->parsed()) {
                cmd_report(out, std::move(m), rp_registry);
            }
        }
    } catch (const Error& e) {
        print_error(error_kind_name(e.kind()), e.what(), e.line());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        print_error("Internal", e.what());
        return 4;
    }
    return 0;
}
