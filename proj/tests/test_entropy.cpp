#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "topicxray/corpus.hpp"
#include "topicxray/entropy.hpp"
#include "topicxray/synth.hpp"

using namespace topicxray;

namespace {

Corpus corpus_from(const std::string& jsonl) {
    std::istringstream in(jsonl);
    return ingest_corpus(in, CorpusFormat::kJsonl);
}

// ---- independent brute-force evaluator ------------------------------------
// Recomputes subtree memberships from parent chains and counts cross edges by
// scanning the raw edge list; shares no code with the library path.

bool brute_member(const IdeaTree& tree, NodeId subtree_root, NodeId v) {
    while (true) {
        if (v == subtree_root) return true;
        if (v == tree.root) return false;
        v = tree.parent[v];
    }
}

double brute_surprisal(double x) { return (x <= 0.0 || x >= 1.0) ? 0.0 : -x * std::log2(x); }

double brute_h(NodeId v, const IdeaTree& tree, const TopicNetwork& topic) {
    std::size_t count = 0;
    for (NodeId u = 0; u < topic.node_count(); ++u) count += brute_member(tree, v, u);
    return brute_surprisal(static_cast<double>(count) / static_cast<double>(topic.node_count()));
}

double brute_i(NodeId vi, NodeId vj, const IdeaTree& tree, const TopicNetwork& topic) {
    if (topic.edge_count() == 0) return 0.0;
    std::size_t crossings = 0;
    for (const auto& [a, b] : topic.edges) {
        const bool fwd = brute_member(tree, vi, a) && brute_member(tree, vj, b);
        const bool rev = brute_member(tree, vj, a) && brute_member(tree, vi, b);
        if (fwd || rev) ++crossings;
    }
    return brute_surprisal(static_cast<double>(crossings) /
                           static_cast<double>(topic.edge_count()));
}

double brute_ke(NodeId v, const IdeaTree& tree, const TopicNetwork& topic) {
    double acc = brute_h(v, tree, topic);
    std::vector<NodeId> kids;
    for (NodeId u = 0; u < topic.node_count(); ++u) {
        if (u != v && tree.parent[u] == v) kids.push_back(u);
    }
    for (const NodeId c : kids) acc -= brute_h(c, tree, topic);
    for (std::size_t i = 0; i < kids.size(); ++i) {
        for (std::size_t j = i + 1; j < kids.size(); ++j) {
            acc += brute_i(kids[i], kids[j], tree, topic);
        }
    }
    return std::abs(acc);
}

// Hand-built 8-node topic: seed s with direct citers a..g; b cites a as well,
// and the idea tree hangs b under a.
struct Fixture8 {
    TopicNetwork topic;
    IdeaTree tree;

    Fixture8() {
        const Corpus corpus = corpus_from(
            "{\"kind\":\"paper\",\"id\":\"s\",\"t\":2000}\n"
            "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
            "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2002}\n"
            "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2003}\n"
            "{\"kind\":\"paper\",\"id\":\"d\",\"t\":2003.2}\n"
            "{\"kind\":\"paper\",\"id\":\"e\",\"t\":2003.4}\n"
            "{\"kind\":\"paper\",\"id\":\"f\",\"t\":2003.6}\n"
            "{\"kind\":\"paper\",\"id\":\"g\",\"t\":2003.8}\n"
            "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"s\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"s\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"a\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"s\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"d\",\"cited\":\"s\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"e\",\"cited\":\"s\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"f\",\"cited\":\"s\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"g\",\"cited\":\"s\"}\n");
        topic = build_topic(corpus, "s", 0);
        auto table = std::make_shared<EmbeddingTable>();
        auto put = [&](const char* id, double theta) {
            table->insert(id, {static_cast<float>(std::cos(theta)),
                               static_cast<float>(std::sin(theta))});
        };
        put("s", 0.0);
        put("a", 0.9);
        put("b", 1.0);  // next to a: parent(b) = a
        put("c", -0.5);
        put("d", -0.7);
        put("e", -0.9);
        put("f", -1.1);
        put("g", -1.3);
        tree = extract(topic, EmbeddingProvider(table));
    }
};

}  // namespace

TEST_CASE("subtree entropy: boundaries and the 3-of-8 value") {
    const Fixture8 fx;
    const NodeId root = fx.tree.root;
    CHECK(subtree_entropy(root, fx.tree, fx.topic) == 0.0);  // p = 1

    const NodeId b = fx.topic.require("b");
    REQUIRE(fx.tree.subtree_size[b] == 1);
    // leaf in a topic of 8: -(1/8) log2(1/8) = 0.375
    CHECK(subtree_entropy(b, fx.tree, fx.topic) == doctest::Approx(0.375).epsilon(1e-15));

    // direct evaluation of the definition for p = 3/8
    const double expected = -(3.0 / 8.0) * std::log2(3.0 / 8.0);
    CHECK(expected == doctest::Approx(0.5306).epsilon(1e-4));

    const Corpus two = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"s\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"s\"}\n");
    const TopicNetwork topic2 = build_topic(two, "s", 0);
    const IdeaTree tree2 = extract(topic2, JaccardProvider());
    CHECK(subtree_entropy(topic2.require("a"), tree2, topic2) == doctest::Approx(0.5));
}

TEST_CASE("mutual subtree entropy: conventions, value, symmetry") {
    const Fixture8 fx;
    const NodeId a = fx.topic.require("a");
    const NodeId c = fx.topic.require("c");
    // no citations between subtree(a) = {a, b} and subtree(c) = {c}
    // other than... none: b cites only s and a.
    CHECK(mutual_subtree_entropy(a, c, fx.tree, fx.topic) == 0.0);
    CHECK(mutual_subtree_entropy(a, c, fx.tree, fx.topic) ==
          mutual_subtree_entropy(c, a, fx.tree, fx.topic));
    CHECK_THROWS_AS(mutual_subtree_entropy(a, a, fx.tree, fx.topic), Error);

    SUBCASE("zero-edge topic: I = 0 by convention") {
        TopicNetwork bare;
        bare.seed_id = "r";
        bare.ids = {"r", "x", "y"};
        bare.timestamps = {2000.0, 2001.0, 2002.0};
        bare.disciplines = {"", "", ""};
        bare.seed = 0;
        bare.out.assign(3, {});
        bare.in.assign(3, {});
        bare.undirected.assign(3, {});
        bare.as_of = 2002.0;
        IdeaTree flat_tree;
        flat_tree.root = 0;
        flat_tree.parent = {kNoNode, 0, 0};
        flat_tree.depth = {0, 1, 1};
        flat_tree.subtree_size = {3, 1, 1};
        flat_tree.children = {{1, 2}, {}, {}};
        CHECK(mutual_subtree_entropy(1, 2, flat_tree, bare) == 0.0);
    }

    // 1 cross-citation out of 8 topic edges: -(1/8) log2(1/8) = 0.375
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"s\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2001.5}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2002}\n"
        "{\"kind\":\"paper\",\"id\":\"d\",\"t\":2002.5}\n"
        "{\"kind\":\"paper\",\"id\":\"e\",\"t\":2003}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"a\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"d\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"d\",\"cited\":\"c\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"d\",\"cited\":\"b\"}\n"  // the crossing
        "{\"kind\":\"edge\",\"citer\":\"e\",\"cited\":\"s\"}\n");
    const TopicNetwork topic = build_topic(corpus, "s", 0);
    REQUIRE(topic.edge_count() == 8);
    auto table = std::make_shared<EmbeddingTable>();
    auto put = [&](const char* id, double theta) {
        table->insert(id, {static_cast<float>(std::cos(theta)),
                           static_cast<float>(std::sin(theta))});
    };
    put("s", 0.0);
    put("a", 0.8);
    put("b", 0.9);   // under a
    put("c", -0.8);
    put("d", -0.9);  // under c
    put("e", 1.8);
    const IdeaTree tree = extract(topic, EmbeddingProvider(table));
    const NodeId na = topic.require("a");
    const NodeId nc = topic.require("c");
    REQUIRE(tree.parent[topic.require("b")] == na);
    REQUIRE(tree.parent[topic.require("d")] == nc);
    CHECK(mutual_subtree_entropy(na, nc, tree, topic) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(mutual_subtree_entropy(na, nc, tree, topic) == brute_i(na, nc, tree, topic));
}

TEST_CASE("knowledge entropy: spec examples and the root error") {
    const Fixture8 fx;
    CHECK_THROWS_AS(knowledge_entropy(fx.tree.root, fx.tree, fx.topic), Error);

    // leaf b in the 8-node topic: KE = H = 0.375
    const NodeId b = fx.topic.require("b");
    CHECK(knowledge_entropy(b, fx.tree, fx.topic) == doctest::Approx(0.375).epsilon(1e-15));

    // node a with one child, subtree sizes 2 and 1 in N = 8, no cross edges:
    // |H(2/8) - H(1/8)| = |0.5 - 0.375| = 0.125
    const NodeId a = fx.topic.require("a");
    REQUIRE(fx.tree.subtree_size[a] == 2);
    CHECK(knowledge_entropy(a, fx.tree, fx.topic) == doctest::Approx(0.125).epsilon(1e-12));

    // leaf in a 2-node topic: KE = 0.5
    const Corpus two = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"s\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"s\"}\n");
    const TopicNetwork topic2 = build_topic(two, "s", 0);
    const IdeaTree tree2 = extract(topic2, JaccardProvider());
    CHECK(knowledge_entropy(topic2.require("a"), tree2, topic2) == doctest::Approx(0.5));
}

TEST_CASE("oracle equivalence: knowledge_entropy matches brute force on random trees") {
    std::mt19937_64 gen(31337);
    double max_dev = 0.0;
    int trees_checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + gen() % 49;  // <= 50 nodes
        std::ostringstream rows;
        rows << "{\"kind\":\"paper\",\"id\":\"n000\",\"t\":2000}\n";
        for (std::size_t i = 1; i < n; ++i) {
            rows << "{\"kind\":\"paper\",\"id\":\"n" << char('0' + i / 100)
                 << char('0' + (i / 10) % 10) << char('0' + i % 10)
                 << "\",\"t\":" << 2000.0 + 0.25 * static_cast<double>(i) << "}\n";
        }
        auto id_of = [](std::size_t i) {
            std::string s = "n000";
            s[1] = char('0' + i / 100);
            s[2] = char('0' + (i / 10) % 10);
            s[3] = char('0' + i % 10);
            return s;
        };
        for (std::size_t i = 1; i < n; ++i) {
            rows << "{\"kind\":\"edge\",\"citer\":\"" << id_of(i) << "\",\"cited\":\"n000\"}\n";
            const std::size_t extras = gen() % 3;
            for (std::size_t k = 0; k < extras; ++k) {
                const std::size_t target = 1 + gen() % (n - 1);
                if (target == i) continue;
                rows << "{\"kind\":\"edge\",\"citer\":\"" << id_of(i) << "\",\"cited\":\""
                     << id_of(target) << "\"}\n";
            }
        }
        const Corpus corpus = corpus_from(rows.str());
        const TopicNetwork topic = build_topic(corpus, "n000", 0);
        const IdeaTree tree = extract(topic, JaccardProvider());
        const auto ke = knowledge_entropy_all(tree, topic);
        for (NodeId v = 0; v < topic.node_count(); ++v) {
            if (v == tree.root) continue;
            const double expect = brute_ke(v, tree, topic);
            max_dev = std::max(max_dev, std::abs(ke[v] - expect));
            CHECK(std::abs(ke[v] - expect) <= 1e-12);
            CHECK(knowledge_entropy(v, tree, topic) == doctest::Approx(expect).epsilon(1e-12));
            if (tree.children[v].empty()) {
                // leaf law: KE = H exactly
                CHECK(ke[v] == subtree_entropy(v, tree, topic));
            }
        }
        ++trees_checked;
    }
    CHECK(trees_checked == 60);
    MESSAGE("max |ke - brute| deviation: ", max_dev);
}

TEST_CASE("visible depth counts distinct visible levels") {
    // Hand-built 6-node chain-with-branches tree to control levels exactly.
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"s\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2002}\n"
        "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2003}\n"
        "{\"kind\":\"paper\",\"id\":\"d\",\"t\":2004}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"a\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"b\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"d\",\"cited\":\"s\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"d\",\"cited\":\"c\"}\n");
    const TopicNetwork topic = build_topic(corpus, "s", 0);
    auto table = std::make_shared<EmbeddingTable>();
    auto put = [&](const char* id, double theta) {
        table->insert(id, {static_cast<float>(std::cos(theta)),
                           static_cast<float>(std::sin(theta))});
    };
    put("s", 0.0);
    put("a", 0.3);
    put("b", 0.6);
    put("c", 0.9);
    put("d", 1.2);
    const IdeaTree tree = extract(topic, EmbeddingProvider(table));
    REQUIRE(tree.max_depth() == 4);  // chain s-a-b-c-d

    std::vector<double> ke(topic.node_count(), 0.0);
    const double M = 0.5;
    SUBCASE("no node visible") {
        const VisibleDepth vd = visible_depth(tree, ke, M);
        CHECK(vd.vd == 0);
        CHECK(vd.max_visible_level == 0);
    }
    SUBCASE("only level 1 visible") {
        ke[topic.require("a")] = 0.7;
        const VisibleDepth vd = visible_depth(tree, ke, M);
        CHECK(vd.vd == 1);
        CHECK(vd.max_visible_level == 1);
    }
    SUBCASE("levels {1,2,4} visible: vd 3, deepest 4") {
        ke[topic.require("a")] = 0.7;  // level 1
        ke[topic.require("b")] = 0.9;  // level 2
        ke[topic.require("d")] = 0.6;  // level 4
        const VisibleDepth vd = visible_depth(tree, ke, M);
        CHECK(vd.vd == 3);
        CHECK(vd.max_visible_level == 4);
    }
}

TEST_CASE("depth series: flat topic never lights up; relay reaches planted depth") {
    {
        GeneratorSpec spec;
        spec.scenario = Scenario::kFlat;
        spec.rng_seed = 9;
        const SynthResult synth = generate(spec);
        const TopicNetwork topic = build_topic(synth.corpus, "p00000", 0);
        const DepthSeries series =
            depth_series(topic, EmbeddingProvider(synth.embeddings), {}, 0.1, 1.0);
        CHECK(series.stl == 0);
        for (const DepthPoint& p : series.points) CHECK(p.vd == 0);
        CHECK(synth.truth.planted_stl == 0);
    }
    {
        GeneratorSpec spec;
        spec.scenario = Scenario::kRelay;
        spec.relay_stages = 3;
        spec.rng_seed = 12;
        const SynthResult synth = generate(spec);
        REQUIRE(synth.truth.planted_stl == 3);
        const TopicNetwork topic = build_topic(synth.corpus, "p00000", 0);
        const SeriesAnalysis analysis =
            analyze_series(topic, EmbeddingProvider(synth.embeddings), {}, 0.1, 1.0);
        const DepthSeries series = depth_series_of(analysis);
        CHECK(series.stl == 3);
        // stl equals the max of the series by construction
        int max_vd = 0;
        for (const DepthPoint& p : series.points) max_vd = std::max(max_vd, p.vd);
        CHECK(series.stl == max_vd);
        // first-visible layer times match the generator schedule within a step
        for (const auto& [level, t_sched] : synth.truth.layer_schedule) {
            REQUIRE(series.layer_first_visible.count(level));
            CHECK(std::abs(series.layer_first_visible.at(level) - t_sched) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("layer interval stats") {
    DepthSeries one;
    one.points = {{2000.0, 0, 0}, {2005.0, 1, 1}};
    one.stl = 1;
    one.layer_first_visible = {{1, 2005.0}};

    const auto rows = layer_interval_stats({one});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].stl_class == 1);
    CHECK(rows[0].topics == 1);
    CHECK(rows[0].mean == doctest::Approx(5.0));
    CHECK(rows[0].median == doctest::Approx(5.0));

    // two identical series: same stats as one (mean invariance)
    const auto rows2 = layer_interval_stats({one, one});
    REQUIRE(rows2.size() == 1);
    CHECK(rows2[0].topics == 2);
    CHECK(rows2[0].mean == doctest::Approx(rows[0].mean));
    CHECK(rows2[0].median == doctest::Approx(rows[0].median));

    CHECK(layer_interval_stats({}).empty());
}

TEST_CASE("calibrate_threshold separates planted nodes on an observed grid") {
    std::vector<CalibrationSample> samples;
    for (int i = 0; i < 40; ++i) samples.push_back({0.01 + 0.001 * i, false});  // <= 0.05
    for (int i = 0; i < 10; ++i) samples.push_back({0.30 + 0.02 * i, true});    // >= 0.30
    const double m = calibrate_threshold(samples);
    CHECK(m > 0.05);
    CHECK(m <= 0.30);

    CHECK_THROWS_AS(calibrate_threshold({}), Error);

    std::vector<CalibrationSample> inseparable;
    for (int i = 0; i < 50; ++i) inseparable.push_back({0.5, false});
    inseparable.push_back({0.4, true});
    CHECK_THROWS_WITH_AS(calibrate_threshold(inseparable), doctest::Contains("inseparable"),
                         Error);
}

TEST_CASE("calibration on a generated corpus separates focal hubs from background") {
    GeneratorSpec spec;
    spec.scenario = Scenario::kRelay;
    spec.rng_seed = 77;
    const SynthResult synth = generate(spec);
    const TopicNetwork topic = build_topic(synth.corpus, "p00000", 0);
    const SeriesAnalysis analysis =
        analyze_series(topic, EmbeddingProvider(synth.embeddings), {}, 0.1, 1.0);
    const SnapshotAnalysis& last = analysis.snaps.back();
    std::vector<CalibrationSample> samples;
    for (NodeId v = 0; v < last.net.node_count(); ++v) {
        if (v == last.tree.root) continue;
        const bool planted =
            std::find(synth.truth.high_value_nodes.begin(), synth.truth.high_value_nodes.end(),
                      last.net.ids[v]) != synth.truth.high_value_nodes.end();
        samples.push_back({last.ke[v], planted});
    }
    const double m = calibrate_threshold(samples);
    CHECK(m > 0.0);
    // the calibrated threshold keeps every planted hub visible
    for (const auto& s : samples) {
        if (s.planted) CHECK(s.ke >= m);
    }
}
