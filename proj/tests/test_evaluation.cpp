#include "blockclust/core.hpp"
#include "blockclust/evaluation.hpp"
#include "blockclust/extraction.hpp"
#include "blockclust/featurization.hpp"
#include "blockclust/labeling.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "support.hpp"

using namespace blockclust;
using testsupport::addr;

namespace {

// Independent metric computation straight from the definitions, organized
// completely differently from the library (explicit joint distribution).
struct NaiveMetrics {
    double h, c, v, purity;
};

NaiveMetrics naive_metrics(const std::vector<std::string>& labels, const std::vector<int>& clusters) {
    std::map<std::string, double> pl;
    std::map<int, double> pk;
    std::map<std::pair<std::string, int>, double> joint;
    double n = static_cast<double>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pl[labels[i]] += 1.0 / n;
        pk[clusters[i]] += 1.0 / n;
        joint[{labels[i], clusters[i]}] += 1.0 / n;
    }
    double hl = 0, hk = 0, hlk = 0, hkl = 0;
    for (const auto& [l, p] : pl) hl -= p * std::log(p);
    for (const auto& [k, p] : pk) hk -= p * std::log(p);
    for (const auto& [lk, p] : joint) {
        hlk -= p * std::log(p / pk[lk.second]);  // H(L|K)
        hkl -= p * std::log(p / pl[lk.first]);   // H(K|L)
    }
    NaiveMetrics m{};
    m.h = (hl == 0.0) ? 1.0 : 1.0 - hlk / hl;
    m.c = (hk == 0.0) ? 1.0 : 1.0 - hkl / hk;
    m.v = (m.h + m.c == 0.0) ? 0.0 : 2.0 * m.h * m.c / (m.h + m.c);
    std::map<int, std::map<std::string, int>> per_cluster;
    for (std::size_t i = 0; i < labels.size(); ++i) per_cluster[clusters[i]][labels[i]] += 1;
    double correct = 0;
    for (const auto& [k, hist] : per_cluster) {
        int best = 0;
        for (const auto& [l, cnt] : hist) best = std::max(best, cnt);
        correct += best;
    }
    m.purity = correct / n;
    return m;
}

std::pair<ClusterAssignment, LabelSet> from_vectors(const std::vector<std::string>& labels,
                                                    const std::vector<int>& clusters,
                                                    LabelKind kind = LabelKind::protocol) {
    ClusterAssignment a;
    LabelSet ls;
    ls.kind = kind;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::string id = "blk" + std::to_string(i);
        a.emplace(id, clusters[i]);
        ls.labels.emplace(id, labels[i]);
    }
    return {a, ls};
}

} // namespace

TEST_CASE("the worked example: labels aabb against clusters 1112") {
    auto [a, ls] = from_vectors({"a", "a", "b", "b"}, {1, 1, 1, 2});
    Metrics m = metrics(a, ls);
    CHECK(std::fabs(m.homogeneity - 0.3113) < 1e-3);
    CHECK(std::fabs(m.completeness - 0.3837) < 1e-3);
    CHECK(std::fabs(m.v_measure - 0.3438) < 1e-3);
    CHECK(m.purity == doctest::Approx(0.75));

    // And against the independent implementation, much tighter.
    auto ref = naive_metrics({"a", "a", "b", "b"}, {1, 1, 1, 2});
    CHECK(m.homogeneity == doctest::Approx(ref.h).epsilon(1e-12));
    CHECK(m.completeness == doctest::Approx(ref.c).epsilon(1e-12));
    CHECK(m.v_measure == doctest::Approx(ref.v).epsilon(1e-12));
}

TEST_CASE("degenerate conventions") {
    SUBCASE("a single label gives homogeneity 1") {
        auto [a, ls] = from_vectors({"x", "x", "x"}, {0, 1, 2});
        Metrics m = metrics(a, ls);
        CHECK(m.homogeneity == doctest::Approx(1.0));
        CHECK(m.completeness < 1.0);
    }
    SUBCASE("a single cluster gives completeness 1") {
        auto [a, ls] = from_vectors({"x", "y", "z"}, {0, 0, 0});
        Metrics m = metrics(a, ls);
        CHECK(m.completeness == doctest::Approx(1.0));
        CHECK(m.homogeneity < 1.0);
    }
    SUBCASE("single label AND single cluster: both conventions fire") {
        auto [a, ls] = from_vectors({"x", "x"}, {0, 0});
        Metrics m = metrics(a, ls);
        CHECK(m.homogeneity == doctest::Approx(1.0));
        CHECK(m.completeness == doctest::Approx(1.0));
        CHECK(m.v_measure == doctest::Approx(1.0));
        CHECK(m.purity == doctest::Approx(1.0));
    }
    SUBCASE("v falls back to 0 when h + c = 0") {
        // Two labels split 50/50 across two clusters, each cluster an even
        // mix: I(L;K) = 0, so h = c = 0 and the harmonic mean degenerates.
        auto [a, ls] = from_vectors({"x", "y", "x", "y"}, {0, 0, 1, 1});
        Metrics m = metrics(a, ls);
        CHECK(m.homogeneity == doctest::Approx(0.0));
        CHECK(m.completeness == doctest::Approx(0.0));
        CHECK(m.v_measure == doctest::Approx(0.0));
        CHECK(m.purity == doctest::Approx(0.5));
    }
}

TEST_CASE("library metrics match the naive oracle on every small instance") {
    // All label/cluster vector pairs over n <= 5 points, 2 labels x 2
    // clusters exhaustively.
    for (int n = 1; n <= 5; ++n) {
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 4; // (label,cluster) in 2x2
        for (int code = 0; code < total; ++code) {
            std::vector<std::string> labels;
            std::vector<int> clusters;
            int c = code;
            for (int i = 0; i < n; ++i) {
                labels.push_back((c & 1) ? "p" : "q");
                clusters.push_back((c & 2) ? 1 : 0);
                c >>= 2;
            }
            auto ref = naive_metrics(labels, clusters);
            auto [a, ls] = from_vectors(labels, clusters);
            Metrics m = metrics(a, ls);
            CAPTURE(code);
            CAPTURE(n);
            CHECK(std::fabs(m.homogeneity - ref.h) < 1e-12);
            CHECK(std::fabs(m.completeness - ref.c) < 1e-12);
            CHECK(std::fabs(m.v_measure - ref.v) < 1e-12);
            CHECK(std::fabs(m.purity - ref.purity) < 1e-12);
        }
    }
}

TEST_CASE("contingency evaluates the intersection of assignment and labels") {
    ClusterAssignment a{{"b1", 0}, {"b2", 0}, {"b3", 1}, {"unlabeled", 1}};
    LabelSet ls;
    ls.kind = LabelKind::protocol;
    ls.labels = {{"b1", "x"}, {"b2", "y"}, {"b3", "x"}, {"unclustered", "y"}};
    Contingency t = build_contingency(a, ls);
    CHECK(t.total == 3); // b1, b2, b3 only
    REQUIRE(t.labels.size() == 2);
    CHECK(t.labels[0] == "x");
    CHECK(t.labels[1] == "y");
    REQUIRE(t.clusters.size() == 2);
    CHECK(t.label_totals[0] == 2);
    CHECK(t.label_totals[1] == 1);
    CHECK(t.cluster_totals[0] == 2);
    CHECK(t.cluster_totals[1] == 1);
    CHECK(t.counts[0][0] == 1); // x in cluster 0
    CHECK(t.counts[1][0] == 1); // y in cluster 0
    CHECK(t.counts[0][1] == 1); // x in cluster 1
}

TEST_CASE("the fallback category drops out of functional evaluation only") {
    ClusterAssignment a{{"b1", 0}, {"b2", 0}, {"b3", 1}};
    LabelSet ffc;
    ffc.kind = LabelKind::ffc;
    ffc.labels = {{"b1", "Swap"}, {"b2", "Others"}, {"b3", "Swap"}};
    Contingency t = build_contingency(a, ffc);
    CHECK(t.total == 2);
    REQUIRE(t.labels.size() == 1);
    CHECK(t.labels[0] == "Swap");

    SUBCASE("a protocol label that happens to read Others is kept") {
        LabelSet proto = ffc;
        proto.kind = LabelKind::protocol;
        Contingency t2 = build_contingency(a, proto);
        CHECK(t2.total == 3);
        CHECK(t2.labels.size() == 2);
    }
    SUBCASE("nothing left to evaluate") {
        LabelSet all_others;
        all_others.kind = LabelKind::ffc;
        all_others.labels = {{"b1", "Others"}, {"b2", "Others"}, {"b3", "Others"}};
        try {
            (void)build_contingency(a, all_others);
            FAIL("expected a throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptyEvaluationSet);
        }
    }
    SUBCASE("disjoint id sets") {
        LabelSet elsewhere;
        elsewhere.labels = {{"zz", "Swap"}};
        CHECK_THROWS_AS((void)build_contingency(a, elsewhere), Error);
    }
}

TEST_CASE("cluster breakdowns rank clusters and their labels") {
    ClusterAssignment a{{"b1", 1}, {"b2", 1}, {"b3", 1}, {"b4", 0}, {"b5", 0}, {"b6", 2}};
    LabelSet ls;
    ls.kind = LabelKind::protocol;
    ls.labels = {{"b1", "x"}, {"b2", "x"}, {"b3", "y"},
                 {"b4", "z"}, {"b5", "z"}, {"b6", "w"}};
    auto rows = cluster_report(a, ls);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].cluster_id == 0);
    CHECK(rows[0].size == 2);
    CHECK(rows[0].majority_label == "z");
    CHECK(rows[0].majority_fraction == doctest::Approx(1.0));
    CHECK(rows[1].cluster_id == 1);
    CHECK(rows[1].size == 3);
    CHECK(rows[1].majority_label == "x");
    CHECK(rows[1].majority_fraction == doctest::Approx(2.0 / 3.0));
    REQUIRE(rows[1].top_labels.size() == 2);
    CHECK(rows[1].top_labels[0].first == "x");
    CHECK(rows[1].top_labels[0].second == 2);
    CHECK(rows[1].top_labels[1].first == "y");

    SUBCASE("label ties break lexicographically") {
        LabelSet tie;
        tie.labels = {{"b1", "beta"}, {"b2", "alpha"}};
        ClusterAssignment two{{"b1", 0}, {"b2", 0}};
        auto r = cluster_report(two, tie);
        REQUIRE(r.size() == 1);
        CHECK(r[0].majority_label == "alpha");
    }
}

TEST_CASE("overlap measures shared structure between two blocks") {
    // big:    r -> x -> (m, n)   (the x subtree is a block of its own)
    // small:  x -> (m, n)
    auto big_trace = testsupport::make_trace("t1", {-1, 0, 1, 1}, {"r", "x", "m", "n"},
                                             {addr(1), addr(2), addr(3), addr(4)});
    BuildingBlock big = extract_block(big_trace, 0);
    BuildingBlock small = extract_block(big_trace, 1);

    auto f_big = feature_none(big);
    auto f_small = feature_none(small);

    SUBCASE("identical blocks overlap completely") {
        auto r = overlap(big, big, f_big, f_big, 2);
        CHECK(r.jaccard == doctest::Approx(1.0));
        CHECK(r.first_contains_second);
        CHECK(r.second_contains_first);
    }
    SUBCASE("a true subtree is contained but not containing") {
        auto r = overlap(big, small, f_big, f_small, 2);
        CHECK(r.first_contains_second);
        CHECK(!r.second_contains_first);
        CHECK(r.contains());
        CHECK(r.jaccard > 0.0);
        CHECK(r.jaccard < 1.0);
    }
    SUBCASE("unrelated shapes share little") {
        auto other_trace = testsupport::make_trace("t2", {-1, 0, 0, 0, 0},
                                                   {"q", "a", "b", "c", "d"},
                                                   {addr(7), addr(8), addr(9), addr(10), addr(11)});
        BuildingBlock other = extract_block(other_trace, 0);
        auto f_other = feature_none(other);
        auto r = overlap(big, other, f_big, f_other, 2);
        CHECK(!r.contains());
        CHECK(r.jaccard < 1.0);
    }
    SUBCASE("feature schemes may not be mixed") {
        FeatureAssignment other_scheme = f_small;
        other_scheme.scheme = FeatureScheme::three_class;
        try {
            (void)overlap(big, small, f_big, other_scheme, 2);
            FAIL("expected a throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchemeMismatch);
        }
    }
}
