#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "topicxray/corpus.hpp"
#include "topicxray/ideatree.hpp"
#include "topicxray/synth.hpp"

using namespace topicxray;

namespace {

Corpus corpus_from(const std::string& jsonl) {
    std::istringstream in(jsonl);
    return ingest_corpus(in, CorpusFormat::kJsonl);
}

std::shared_ptr<EmbeddingTable> angle_table(
    const std::vector<std::pair<std::string, double>>& angles) {
    auto table = std::make_shared<EmbeddingTable>();
    for (const auto& [id, theta] : angles) {
        table->insert(id, {static_cast<float>(std::cos(theta)),
                           static_cast<float>(std::sin(theta))});
    }
    return table;
}

void check_tree_invariants(const IdeaTree& tree, const TopicNetwork& topic) {
    REQUIRE(tree.node_count() == topic.node_count());
    const std::size_t n = topic.node_count();
    std::size_t parents = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (v == tree.root) {
            CHECK(tree.parent[v] == kNoNode);
            CHECK(tree.depth[v] == 0);
            continue;
        }
        parents++;
        CHECK(tree.depth[v] == tree.depth[tree.parent[v]] + 1);
        // every parent chain reaches the root within n-1 steps
        NodeId walk = v;
        std::size_t steps = 0;
        while (walk != tree.root && steps <= n) {
            walk = tree.parent[walk];
            ++steps;
        }
        CHECK(walk == tree.root);
        CHECK(steps <= n - 1);
    }
    CHECK(parents == n - 1);
    CHECK(tree.subtree_size[tree.root] == n);
    // subtree-size conservation at every node
    for (NodeId v = 0; v < n; ++v) {
        std::size_t acc = 1;
        for (const NodeId c : tree.children[v]) acc += tree.subtree_size[c];
        CHECK(tree.subtree_size[v] == acc);
    }
}

}  // namespace

TEST_CASE("cut_loops leaves acyclic input unchanged") {
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2002}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"a\"}\n");
    const TopicNetwork topic = build_topic(corpus, "S", 0);
    const JaccardProvider provider;
    const auto [cut, report] = cut_loops(topic, &provider);
    CHECK(report.removed_edges.empty());
    CHECK(cut.edges == topic.edges);
}

TEST_CASE("cut_loops removes a time-inverted citation") {
    // a (2005) cites b (2010): chronologically impossible beyond the slack.
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2005}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2010}\n"
        "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2010.5}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"b\",\"t\":2010.2}\n");
    const TopicNetwork topic = build_topic(corpus, "S", 0);
    REQUIRE(topic.edge_count() == 4);  // ingest slack accepts the explicit time
    const auto [cut, report] = cut_loops(topic, nullptr);
    REQUIRE(report.removed_edges.size() == 1);
    CHECK(report.removed_edges[0].citer == "a");
    CHECK(report.removed_edges[0].cited == "b");
    CHECK(report.removed_edges[0].reason == LoopCutReason::kTimeInversion);
    CHECK(cut.edge_count() == 3);
}

TEST_CASE("cut_loops breaks a two-cycle by the removal policy") {
    // a and b born the same year cite each other; both cite the seed.
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2001}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"b\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"a\"}\n");
    const TopicNetwork topic = build_topic(corpus, "S", 0);
    const JaccardProvider provider;
    const auto [cut, report] = cut_loops(topic, &provider);

    REQUIRE(report.removed_edges.size() == 1);
    CHECK(report.removed_edges[0].reason == LoopCutReason::kCycleBreak);

    // Brute-force oracle: removing either cycle edge yields an acyclic graph,
    // and the policy (max diff, then lexicographic citer/cited) picks one.
    const auto sim = provider.bind(topic);
    const double d_ab = sim->diff(topic.require("a"), topic.require("b"));
    const double d_ba = sim->diff(topic.require("b"), topic.require("a"));
    CHECK(d_ab == d_ba);  // diff is symmetric: the tie falls to lexicographic order
    CHECK(report.removed_edges[0].citer == "a");
    CHECK(report.removed_edges[0].cited == "b");
    CHECK(cut.edge_count() == 3);

    // no directed cycle remains: b->a survives, a->b is gone
    for (const auto& [citer, cited] : cut.edges) {
        CHECK(!(cut.ids[citer] == "a" && cut.ids[cited] == "b"));
    }
}

TEST_CASE("extract: star topic gives the star, single node gives the root") {
    {
        const Corpus corpus = corpus_from(
            "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n"
            "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
            "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2002}\n"
            "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2003}\n"
            "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"S\"}\n"
            "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"S\"}\n");
        const TopicNetwork topic = build_topic(corpus, "S", 0);
        const JaccardProvider provider;
        const IdeaTree tree = extract(topic, provider);
        check_tree_invariants(tree, topic);
        for (NodeId v = 0; v < topic.node_count(); ++v) {
            if (v != tree.root) {
                CHECK(tree.parent[v] == tree.root);
                CHECK(tree.depth[v] == 1);
            }
        }
        const TreeStats stats = tree_stats(tree);
        CHECK(stats.max_depth == 1);
        CHECK(stats.level_sizes == std::vector<std::size_t>{1, 3});
    }
    {
        const Corpus corpus = corpus_from("{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n");
        const TopicNetwork topic = build_topic(corpus, "S", 0);
        const JaccardProvider provider;
        const IdeaTree tree = extract(topic, provider);
        CHECK(tree.node_count() == 1);
        CHECK(tree.depth[tree.root] == 0);
        const TreeStats stats = tree_stats(tree);
        CHECK(stats.max_depth == 0);
        CHECK(stats.level_sizes == std::vector<std::size_t>{1});
    }
}

TEST_CASE("extract picks the minimum-diff citation: enumerate both candidates") {
    // c cites {S, a}; embeddings place c next to a and far from S.
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2002}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"a\"}\n");
    const TopicNetwork topic = build_topic(corpus, "S", 0);
    const auto table = angle_table({{"S", 0.0}, {"a", 1.0}, {"c", 1.1}});
    const EmbeddingProvider provider(table);

    // Oracle: compare the two candidate parents directly.
    const double d_ca = diff_idx("c", "a", topic, provider);
    const double d_cs = diff_idx("c", "S", topic, provider);
    REQUIRE(d_ca < d_cs);

    const IdeaTree tree = extract(topic, provider);
    check_tree_invariants(tree, topic);
    CHECK(tree.parent[topic.require("c")] == topic.require("a"));
    CHECK(tree.depth[topic.require("c")] == 2);

    const TreeStats stats = tree_stats(tree);
    CHECK(stats.max_depth == 2);
    CHECK(stats.level_sizes == std::vector<std::size_t>{1, 1, 1});
    CHECK(stats.branching.at(1) == 2);  // S and a each have one child
    CHECK(stats.branching.at(0) == 1);  // c is a leaf
}

TEST_CASE("chain of 4 produces the expected stats") {
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2000}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2001}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2002}\n"
        "{\"kind\":\"paper\",\"id\":\"c\",\"t\":2003}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"a\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"S\"}\n"
        "{\"kind\":\"edge\",\"citer\":\"c\",\"cited\":\"b\"}\n");
    const TopicNetwork topic = build_topic(corpus, "S", 0);
    const auto table = angle_table({{"S", 0.0}, {"a", 0.4}, {"b", 0.8}, {"c", 1.2}});
    const EmbeddingProvider provider(table);
    const IdeaTree tree = extract(topic, provider);
    const TreeStats stats = tree_stats(tree);
    CHECK(stats.max_depth == 3);
    CHECK(stats.level_sizes == std::vector<std::size_t>{1, 1, 1, 1});
}

TEST_CASE("node left without surviving citations attaches to the seed and is flagged") {
    // a cites the seed via an explicit late effective time, so ingest keeps
    // the edge but loop cutting drops it as a time inversion; a then has no
    // candidate parent left.
    const Corpus corpus = corpus_from(
        "{\"kind\":\"paper\",\"id\":\"S\",\"t\":2010}\n"
        "{\"kind\":\"paper\",\"id\":\"a\",\"t\":2005}\n"
        "{\"kind\":\"paper\",\"id\":\"b\",\"t\":2011}\n"
        "{\"kind\":\"edge\",\"citer\":\"a\",\"cited\":\"S\",\"t\":2009.5}\n"
        "{\"kind\":\"edge\",\"citer\":\"b\",\"cited\":\"S\"}\n");
    const TopicNetwork topic = build_topic(corpus, "S", 0);
    REQUIRE(topic.node_count() == 3);
    const JaccardProvider provider;
    const IdeaTree tree = extract(topic, provider);
    check_tree_invariants(tree, topic);
    const NodeId a = topic.require("a");
    CHECK(tree.parent[a] == tree.root);
    REQUIRE(tree.seed_fallbacks.size() == 1);
    CHECK(tree.seed_fallbacks[0] == a);
    // and the loop cut is on record
    REQUIRE(tree.loopcut.removed_edges.size() == 1);
    CHECK(tree.loopcut.removed_edges[0].reason == LoopCutReason::kTimeInversion);
}

TEST_CASE("property: invariants and tie-break determinism on random topics") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 40; ++trial) {
        // Random citation tangle: n nodes, everyone cites the seed, random
        // internal citations with occasional timestamp ties (cycles allowed).
        const std::size_t n = 2 + gen() % 60;
        std::vector<std::string> rows;
        rows.push_back("{\"kind\":\"paper\",\"id\":\"n000\",\"t\":2000}");
        std::vector<double> times{2000.0};
        for (std::size_t i = 1; i < n; ++i) {
            char id[8];
            std::snprintf(id, sizeof(id), "n%03zu", i);
            const double t = 2000.0 + static_cast<double>(gen() % 20) * 0.5;
            times.push_back(t);
            std::ostringstream row;
            row << "{\"kind\":\"paper\",\"id\":\"" << id << "\",\"t\":" << t << "}";
            rows.push_back(row.str());
            rows.push_back(std::string("{\"kind\":\"edge\",\"citer\":\"") + id +
                           "\",\"cited\":\"n000\"}");
        }
        const std::size_t extra = gen() % (3 * n);
        for (std::size_t k = 0; k < extra; ++k) {
            char a[8], b[8];
            std::snprintf(a, sizeof(a), "n%03llu",
                          static_cast<unsigned long long>(1 + gen() % (n - 1)));
            std::snprintf(b, sizeof(b), "n%03llu",
                          static_cast<unsigned long long>(1 + gen() % (n - 1)));
            if (std::string(a) == b) continue;
            rows.push_back(std::string("{\"kind\":\"edge\",\"citer\":\"") + a +
                           "\",\"cited\":\"" + b + "\"}");
        }

        std::string forward;
        for (const auto& row : rows) forward += row + "\n";
        const Corpus corpus = corpus_from(forward);
        const TopicNetwork topic = build_topic(corpus, "n000", 0);
        const JaccardProvider provider;
        const IdeaTree tree = extract(topic, provider);
        check_tree_invariants(tree, topic);

        // permuting input rows never changes the extracted tree
        std::shuffle(rows.begin(), rows.end(), gen);
        std::string shuffled;
        for (const auto& row : rows) shuffled += row + "\n";
        const Corpus corpus2 = corpus_from(shuffled);
        const TopicNetwork topic2 = build_topic(corpus2, "n000", 0);
        const IdeaTree tree2 = extract(topic2, provider);
        CHECK(tree2.parent == tree.parent);
        CHECK(tree2.depth == tree.depth);
    }
}

TEST_CASE("planted-tree recovery on a generated relay (noiseless)") {
    GeneratorSpec spec;
    spec.scenario = Scenario::kRelay;
    spec.rng_seed = 5;
    const SynthResult synth = generate(spec);
    const TopicNetwork topic = build_topic(synth.corpus, "p00000", 0);
    const EmbeddingProvider provider(synth.embeddings);
    const IdeaTree tree = extract(topic, provider);
    check_tree_invariants(tree, topic);
    for (NodeId v = 0; v < topic.node_count(); ++v) {
        if (v == tree.root) continue;
        CHECK(topic.ids[tree.parent[v]] == synth.truth.parent.at(topic.ids[v]));
    }
}
