#include "blockclust/artifacts.hpp"
#include "blockclust/manifest.hpp"

#include <doctest.h>

#include <string>

#include "support.hpp"

using namespace blockclust;
using testsupport::addr;
using testsupport::make_block;
using testsupport::TempDir;

namespace {

RunManifest base_manifest() {
    RunManifest m;
    m.tool_version = "blockclust test";
    m.created_at = "2024-01-01T00:00:00Z";
    m.inputs = {{"traces", "aa"}, {"registry", "bb"}};
    m.input_paths = {{"traces", "/tmp/traces.jsonl"}, {"registry", "/tmp/registry.csv"}};
    return m;
}

} // namespace

TEST_CASE("digest scopes nest: each stage sees its own knobs") {
    RunManifest m = base_manifest();
    std::string e0 = m.extract_digest();
    std::string f0 = m.feature_digest();
    std::string g0 = m.embedding_digest();
    CHECK(e0.size() == 64);
    CHECK(e0 != f0);
    CHECK(f0 != g0);

    SUBCASE("input digests feed every scope") {
        RunManifest m2 = base_manifest();
        m2.inputs["traces"] = "cc";
        CHECK(m2.extract_digest() != e0);
        CHECK(m2.feature_digest() != f0);
        CHECK(m2.embedding_digest() != g0);
    }
    SUBCASE("top_k feeds every scope") {
        RunManifest m2 = base_manifest();
        m2.config.top_k = 99;
        CHECK(m2.extract_digest() != e0);
        CHECK(m2.feature_digest() != f0);
        CHECK(m2.embedding_digest() != g0);
    }
    SUBCASE("the feature scheme reaches features and embeddings only") {
        RunManifest m2 = base_manifest();
        m2.config.scheme = FeatureScheme::none;
        CHECK(m2.extract_digest() == e0);
        CHECK(m2.feature_digest() != f0);
        CHECK(m2.embedding_digest() != g0);
    }
    SUBCASE("the grouping threshold behaves like the scheme") {
        RunManifest m2 = base_manifest();
        m2.config.group_threshold = 0.7;
        CHECK(m2.extract_digest() == e0);
        CHECK(m2.feature_digest() != f0);
    }
    SUBCASE("training settings reach the embedding scope only") {
        RunManifest m2 = base_manifest();
        m2.config.train.dim = 32;
        CHECK(m2.extract_digest() == e0);
        CHECK(m2.feature_digest() == f0);
        CHECK(m2.embedding_digest() != g0);

        RunManifest m3 = base_manifest();
        m3.config.train.seed = 7;
        CHECK(m3.embedding_digest() != g0);
        CHECK(m3.feature_digest() == f0);
    }
    SUBCASE("downstream knobs stay out of every digest") {
        RunManifest m2 = base_manifest();
        m2.config.normalize = false;
        m2.config.delta = 0.42;
        m2.config.sweep_lo = 0.1;
        m2.config.sweep_hi = 2.0;
        m2.config.sweep_step = 0.05;
        m2.config.label = LabelKind::ffc;
        m2.config.tsne.perplexity = 5.0;
        m2.config.tsne.seed = 9;
        CHECK(m2.extract_digest() == e0);
        CHECK(m2.feature_digest() == f0);
        CHECK(m2.embedding_digest() == g0);
    }
    SUBCASE("bookkeeping fields stay out of every digest") {
        RunManifest m2 = base_manifest();
        m2.created_at = "1999-12-31T23:59:59Z";
        m2.input_paths["traces"] = "/somewhere/else.jsonl";
        m2.tool_version = "blockclust 9.9.9";
        CHECK(m2.extract_digest() == e0);
        CHECK(m2.feature_digest() == f0);
        CHECK(m2.embedding_digest() == g0);
    }
}

TEST_CASE("manifests round-trip through disk") {
    TempDir tmp;
    auto path = tmp.path() / "manifest.json";
    RunManifest m = base_manifest();
    m.config.scheme = FeatureScheme::signatures;
    m.config.train.dim = 64;
    m.config.train.directed_wl = true;
    m.config.delta = 0.8;
    m.config.label = LabelKind::ffc;
    save_manifest(m, path);

    RunManifest back = load_manifest(path);
    CHECK(back.tool_version == m.tool_version);
    CHECK(back.created_at == m.created_at);
    CHECK(back.inputs == m.inputs);
    CHECK(back.input_paths == m.input_paths);
    CHECK(back.config.scheme == FeatureScheme::signatures);
    CHECK(back.config.train.dim == 64);
    CHECK(back.config.train.directed_wl == true);
    CHECK(back.config.delta == 0.8);
    CHECK(back.config.label == LabelKind::ffc);
    CHECK(back.extract_digest() == m.extract_digest());
    CHECK(back.feature_digest() == m.feature_digest());
    CHECK(back.embedding_digest() == m.embedding_digest());

    SUBCASE("missing files raise io errors") {
        CHECK_THROWS_AS((void)load_manifest(tmp.path() / "nope.json"), Error);
    }
    SUBCASE("garbage raises schema errors") {
        testsupport::write_file(path, "not json at all");
        try {
            (void)load_manifest(path);
            FAIL("expected a throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchemaError);
        }
    }
}

TEST_CASE("file hashing matches the reference digest") {
    TempDir tmp;
    auto path = tmp.path() / "abc.txt";
    testsupport::write_file(path, "abc");
    CHECK(file_sha256(path) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS_AS((void)file_sha256(tmp.path() / "missing"), Error);
}

TEST_CASE("block artifacts round-trip with manifest stamping") {
    TempDir tmp;
    auto path = tmp.path() / "blocks.jsonl";
    Corpus corpus;
    corpus.blocks.push_back(make_block({-1, 0, 0}, {"r", "x", "y"},
                                       {addr(1), addr(2), addr(3)}));
    corpus.blocks.push_back(make_block({-1, 0}, {"swap", "transfer"}, {addr(4), addr(5)}));
    corpus.blocks[0].count = 5;
    corpus.blocks[1].count = 2;

    write_blocks(path, corpus, "digest-1");
    Corpus back = read_blocks(path, "digest-1");
    REQUIRE(back.blocks.size() == 2);
    CHECK(back.blocks[0].block_id == corpus.blocks[0].block_id);
    CHECK(back.blocks[0].count == 5);
    CHECK(back.blocks[0].nodes == corpus.blocks[0].nodes);
    CHECK(back.blocks[1].edges == corpus.blocks[1].edges);

    SUBCASE("the wrong expected digest is rejected") {
        try {
            (void)read_blocks(path, "digest-2");
            FAIL("expected a throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ManifestMismatch);
        }
    }
    SUBCASE("an empty expected digest skips the check") {
        CHECK_NOTHROW((void)read_blocks(path, ""));
    }
}

TEST_CASE("feature artifacts round-trip and reject scheme mixing") {
    TempDir tmp;
    auto path = tmp.path() / "features.csv";
    Corpus corpus;
    corpus.blocks.push_back(make_block({-1, 0}, {"r", "x"}, {addr(1), addr(2)}));
    corpus.blocks.push_back(make_block({-1, 0, 0}, {"r", "x", "y"},
                                       {addr(1), addr(2), addr(3)}));
    std::vector<FeatureAssignment> feats(2);
    feats[0].scheme = FeatureScheme::three_class;
    feats[0].tokens = {0, 1};
    feats[1].scheme = FeatureScheme::three_class;
    feats[1].tokens = {2, 0, 1};

    write_features(path, corpus, feats, "fd");
    FeatureTable table = read_features(path, "fd");
    CHECK(table.scheme == FeatureScheme::three_class);
    REQUIRE(table.tokens.size() == 2);
    CHECK(table.tokens.at(corpus.blocks[0].block_id) == feats[0].tokens);
    CHECK(table.tokens.at(corpus.blocks[1].block_id) == feats[1].tokens);

    SUBCASE("mismatch is rejected") {
        CHECK_THROWS_AS((void)read_features(path, "other"), Error);
    }
}

TEST_CASE("group tables round-trip") {
    TempDir tmp;
    auto path = tmp.path() / "groups.csv";
    SignatureGroups groups;
    groups.threshold = 0.8;
    groups.groups = {{"00000001;00000002", 0}, {"000000f1", 1}, {"000000f2", 1}};
    groups.group_count = 2;
    write_groups(path, groups, "gg");
    SignatureGroups back = read_groups(path, 0.8, "gg");
    CHECK(back.threshold == 0.8);
    CHECK(back.group_count == 2);
    CHECK(back.groups == groups.groups);
    CHECK(back.reserved_group() == 2);
}

TEST_CASE("label artifacts carry both axes") {
    TempDir tmp;
    auto path = tmp.path() / "labels.csv";
    LabelBundle bundle;
    bundle.protocol.kind = LabelKind::protocol;
    bundle.ffc.kind = LabelKind::ffc;
    bundle.ffc.labels = {{"blk-a", "Swap"}, {"blk-b", "Others"}, {"blk-c", "Repay"}};
    bundle.protocol.labels = {{"blk-a", "uni"}, {"blk-c", "maker"}}; // blk-b unlabeled
    bundle.ffc_excluded = {"blk-b"};

    write_labels(path, bundle, "LL");
    LabelTable back = read_labels(path, "LL");
    CHECK(back.protocol.kind == LabelKind::protocol);
    CHECK(back.ffc.kind == LabelKind::ffc);
    CHECK(back.ffc.labels.size() == 3);
    CHECK(back.ffc.labels.at("blk-b") == "Others");
    CHECK(back.protocol.labels.size() == 2);
    CHECK(back.protocol.labels.count("blk-b") == 0);
}

TEST_CASE("embedding artifacts round-trip exactly") {
    TempDir tmp;
    auto path = tmp.path() / "embeddings.csv";
    EmbeddingMatrix m;
    m.dim = 3;
    m.rows = {{"a", {0.1, -2.5e-17, 3.0}}, {"b", {1e300, 0.0, -1.25}}};
    write_embeddings(path, m, "EE");
    EmbeddingMatrix back = read_embeddings(path, "EE");
    CHECK(back.dim == 3);
    REQUIRE(back.rows.size() == 2);
    // %.17g output: doubles survive the round trip bit for bit.
    for (const auto& [id, row] : m.rows) {
        const auto& other = back.rows.at(id);
        REQUIRE(other.size() == row.size());
        for (std::size_t i = 0; i < row.size(); ++i) CHECK(other[i] == row[i]);
    }

    SUBCASE("tampering trips the digest check") {
        std::string text = testsupport::read_file(path);
        testsupport::write_file(path, text + "c,1,2,3\n");
        // Extra row does not break the manifest line, but a wrong expected
        // digest does.
        CHECK_THROWS_AS((void)read_embeddings(path, "other"), Error);
    }
}

TEST_CASE("cluster artifacts round-trip with their delta") {
    TempDir tmp;
    auto path = tmp.path() / "clusters.csv";
    ClusterAssignment assign{{"a", 0}, {"b", 1}, {"c", 0}};
    write_clusters(path, assign, 0.75, "CC");
    ClusterTable back = read_clusters(path, "CC");
    CHECK(back.delta == 0.75);
    CHECK(back.assignment == assign);
}

TEST_CASE("sweep and vocabulary artifacts are written with headers") {
    TempDir tmp;
    SweepResult r;
    SweepPoint p1;
    p1.delta = 0.6;
    p1.n_clusters = 4;
    p1.metrics.v_measure = 0.5;
    SweepPoint p2;
    p2.delta = 0.75; // exactly representable, so the text form is stable
    p2.n_clusters = 3;
    p2.metrics.v_measure = 0.75;
    r.points = {p1, p2};
    r.best_delta = 0.75;
    r.best_n_clusters = 3;
    r.best_metrics = p2.metrics;

    auto sweep_path = tmp.path() / "sweep.csv";
    write_sweep(sweep_path, r, "SS");
    std::string text = testsupport::read_file(sweep_path);
    CHECK(text.find("# manifest=SS") != std::string::npos);
    CHECK(text.find("delta,n_clusters,homogeneity,completeness,v_measure,purity") !=
          std::string::npos);
    CHECK(text.find("0.75,3,") != std::string::npos);

    auto vocab_path = tmp.path() / "vocab.txt";
    std::vector<VocabEntry> vocab{{3, 10}, {5, 2}};
    write_vocab(vocab_path, vocab, "VV");
    std::string vtext = testsupport::read_file(vocab_path);
    CHECK(vtext.find("# manifest=VV") != std::string::npos);
    CHECK(vtext.find("3\t10") != std::string::npos);
    CHECK(vtext.find("5\t2") != std::string::npos);
}

TEST_CASE("corrupted artifacts raise schema errors with the line number") {
    TempDir tmp;
    auto path = tmp.path() / "embeddings.csv";
    testsupport::write_file(path, "# manifest=XX\nblock_id,e0\na,not-a-number\n");
    try {
        (void)read_embeddings(path, "XX");
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SchemaError);
        CHECK(e.line() == 3);
    }
}
