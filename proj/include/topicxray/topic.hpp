#pragma once

#include <string>
#include <vector>

#include "topicxray/corpus.hpp"
#include "topicxray/types.hpp"

namespace topicxray {

// A seed-rooted citation-network snapshot: the seed paper, its direct citers
// present at as_of, and all citations among them. Node order is canonical
// (lexicographic by id), so downstream results never depend on input order.
// Immutable after construction.
struct TopicNetwork {
    std::string seed_id;
    NodeId seed = 0;                       // index into the arrays below
    std::vector<std::string> ids;          // sorted lexicographically
    std::vector<double> timestamps;
    std::vector<std::string> disciplines;
    std::vector<std::pair<NodeId, NodeId>> edges;  // citer -> cited, sorted
    std::vector<double> edge_times;                // aligned with edges
    std::vector<std::vector<NodeId>> out;          // cited neighbors per node
    std::vector<std::vector<NodeId>> in;           // citers per node
    std::vector<std::vector<NodeId>> undirected;   // sorted unique neighbor sets
    double as_of = 0.0;

    std::size_t node_count() const { return ids.size(); }
    std::size_t edge_count() const { return edges.size(); }
    NodeId require(const std::string& id) const;  // throws if absent
};

inline constexpr int kDefaultMinSeedCitations = 1000;

// Builds the topic for seed_id: the seed plus its direct citers, with every
// corpus edge internal to that node set. Refuses seeds whose in-corpus citer
// count is below min_seed_citations (pass 0 to disable the gate).
TopicNetwork build_topic(const Corpus& corpus, const std::string& seed_id,
                         int min_seed_citations = kDefaultMinSeedCitations);

// Induced subgraph on nodes with timestamp <= t (edges also require
// effective_time <= t); as_of becomes t. Requires t >= seed timestamp.
TopicNetwork snapshot(const TopicNetwork& topic, double t);

// Snapshots at seed_time, seed_time+step, ...; the final entry is always the
// full topic at as_of. step must be positive.
std::vector<TopicNetwork> snapshot_series(const TopicNetwork& topic, double step = 1.0);

// Snapshot times only (same schedule as snapshot_series).
std::vector<double> snapshot_times(const TopicNetwork& topic, double step = 1.0);

}  // namespace topicxray
