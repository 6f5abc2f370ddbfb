#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "topicxray/similarity.hpp"
#include "topicxray/topic.hpp"

namespace topicxray {

enum class LoopCutReason { kTimeInversion, kCycleBreak };

struct RemovedEdge {
    std::string citer;
    std::string cited;
    LoopCutReason reason;
};

// Removing exactly these edges from the input leaves an acyclic graph.
struct LoopCutReport {
    std::vector<RemovedEdge> removed_edges;
};

// The pruned arborescence: one retained citation per non-seed paper.
// Node indices refer to the topic the tree was extracted from.
struct IdeaTree {
    NodeId root = 0;
    std::vector<NodeId> parent;        // parent[root] == kNoNode
    std::vector<std::uint32_t> depth;  // depth[root] == 0
    std::vector<std::uint32_t> subtree_size;
    std::vector<std::vector<NodeId>> children;  // sorted by node index
    std::vector<NodeId> seed_fallbacks;  // nodes attached to the seed for lack of candidates
    LoopCutReport loopcut;

    std::size_t node_count() const { return parent.size(); }
    std::uint32_t max_depth() const;
    bool is_ancestor(NodeId anc, NodeId v) const;  // true also when anc == v
};

// Removes citation loops: first edges whose cited paper postdates the citer
// beyond the slack, then one edge per residual cycle - the largest diff_idx,
// ties by lexicographic (citer, cited) id. Seed-incident edges survive unless
// a cycle consists of nothing else. Similarity is evaluated on the input
// topic. Pass provider = nullptr to break ties lexicographically only.
std::pair<TopicNetwork, LoopCutReport> cut_loops(const TopicNetwork& topic,
                                                 const SimilarityProvider* provider,
                                                 double slack_years = 1.0);

// Cuts loops, then keeps for each non-seed node the cited neighbor with the
// smallest diff_idx (ties: larger reduction_idx, earlier timestamp,
// lexicographic id). Nodes left without candidates attach to the seed and are
// flagged in seed_fallbacks.
IdeaTree extract(const TopicNetwork& topic, const SimilarityProvider& provider,
                 double slack_years = 1.0);

struct TreeStats {
    std::uint32_t max_depth = 0;
    std::vector<std::size_t> level_sizes;           // index = depth
    std::map<std::size_t, std::size_t> branching;   // child count -> nodes
};

TreeStats tree_stats(const IdeaTree& tree);

}  // namespace topicxray
