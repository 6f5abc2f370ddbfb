#include "topicxray/ideatree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace topicxray {

std::uint32_t IdeaTree::max_depth() const {
    std::uint32_t m = 0;
    for (const auto d : depth) m = std::max(m, d);
    return m;
}

bool IdeaTree::is_ancestor(NodeId anc, NodeId v) const {
    while (true) {
        if (v == anc) return true;
        if (v == root) return false;
        v = parent[v];
    }
}

namespace {

// Iterative DFS; returns the edge list of one directed cycle, or empty.
std::vector<std::pair<NodeId, NodeId>> find_cycle(
    const std::vector<std::vector<NodeId>>& out, std::size_t n) {
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<NodeId> parent(n, kNoNode);
    for (NodeId start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        std::vector<std::pair<NodeId, std::size_t>> stack{{start, 0}};
        state[start] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < out[v].size()) {
                const NodeId w = out[v][next++];
                if (state[w] == 0) {
                    state[w] = 1;
                    parent[w] = v;
                    stack.push_back({w, 0});
                } else if (state[w] == 1) {
                    // walk back from v to w along DFS parents
                    std::vector<std::pair<NodeId, NodeId>> cycle{{v, w}};
                    for (NodeId x = v; x != w; x = parent[x]) {
                        cycle.push_back({parent[x], x});
                    }
                    std::reverse(cycle.begin(), cycle.end());
                    return cycle;
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

}  // namespace

std::pair<TopicNetwork, LoopCutReport> cut_loops(const TopicNetwork& topic,
                                                 const SimilarityProvider* provider,
                                                 double slack_years) {
    LoopCutReport report;
    const std::size_t n = topic.node_count();
    std::vector<char> removed(topic.edges.size(), 0);

    // Pass 1: chronologically impossible citations.
    for (std::size_t k = 0; k < topic.edges.size(); ++k) {
        const auto [citer, cited] = topic.edges[k];
        if (topic.timestamps[cited] > topic.timestamps[citer] + slack_years) {
            removed[k] = 1;
            report.removed_edges.push_back(
                {topic.ids[citer], topic.ids[cited], LoopCutReason::kTimeInversion});
        }
    }

    std::unique_ptr<BoundSimilarity> sim;
    if (provider) sim = provider->bind(topic);

    // Pass 2: residual cycles (timestamp ties within the slack).
    while (true) {
        std::vector<std::vector<NodeId>> out(n);
        std::vector<std::vector<std::size_t>> edge_of(n);
        for (std::size_t k = 0; k < topic.edges.size(); ++k) {
            if (removed[k]) continue;
            out[topic.edges[k].first].push_back(topic.edges[k].second);
            edge_of[topic.edges[k].first].push_back(k);
        }
        const auto cycle = find_cycle(out, n);
        if (cycle.empty()) break;

        auto edge_index = [&](NodeId citer, NodeId cited) {
            for (std::size_t j = 0; j < out[citer].size(); ++j) {
                if (out[citer][j] == cited) return edge_of[citer][j];
            }
            assert(false);
            return std::size_t{0};
        };
        // Candidates exclude seed-incident edges unless the cycle has no others.
        std::vector<std::pair<NodeId, NodeId>> candidates;
        for (const auto& e : cycle) {
            if (e.first != topic.seed && e.second != topic.seed) candidates.push_back(e);
        }
        if (candidates.empty()) candidates = cycle;

        auto better_removal = [&](const std::pair<NodeId, NodeId>& a,
                                  const std::pair<NodeId, NodeId>& b) {
            const double da = sim ? sim->diff(a.first, a.second) : 0.0;
            const double db = sim ? sim->diff(b.first, b.second) : 0.0;
            if (da != db) return da > db;
            if (topic.ids[a.first] != topic.ids[b.first]) {
                return topic.ids[a.first] < topic.ids[b.first];
            }
            return topic.ids[a.second] < topic.ids[b.second];
        };
        const auto victim = *std::min_element(candidates.begin(), candidates.end(),
                                              [&](const auto& a, const auto& b) {
                                                  return better_removal(a, b);
                                              });
        removed[edge_index(victim.first, victim.second)] = 1;
        report.removed_edges.push_back(
            {topic.ids[victim.first], topic.ids[victim.second], LoopCutReason::kCycleBreak});
    }

    // Rebuild the network without the removed edges (same node set).
    TopicNetwork result;
    result.seed_id = topic.seed_id;
    result.seed = topic.seed;
    result.ids = topic.ids;
    result.timestamps = topic.timestamps;
    result.disciplines = topic.disciplines;
    result.as_of = topic.as_of;
    result.out.assign(n, {});
    result.in.assign(n, {});
    result.undirected.assign(n, {});
    for (std::size_t k = 0; k < topic.edges.size(); ++k) {
        if (removed[k]) continue;
        const auto [citer, cited] = topic.edges[k];
        result.edges.push_back(topic.edges[k]);
        result.edge_times.push_back(topic.edge_times[k]);
        result.out[citer].push_back(cited);
        result.in[cited].push_back(citer);
        result.undirected[citer].push_back(cited);
        result.undirected[cited].push_back(citer);
    }
    for (auto& v : result.undirected) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return {std::move(result), std::move(report)};
}

IdeaTree extract(const TopicNetwork& topic, const SimilarityProvider& provider,
                 double slack_years) {
    if (topic.node_count() == 0) throw Error("cannot extract an idea tree from an empty topic");
    auto [acyclic, report] = cut_loops(topic, &provider, slack_years);
    const std::size_t n = topic.node_count();
    // Similarity is a property of the full citation structure; the cut only
    // constrains the candidate set.
    const auto sim = provider.bind(topic);

    IdeaTree tree;
    tree.root = topic.seed;
    tree.loopcut = std::move(report);
    tree.parent.assign(n, kNoNode);
    tree.depth.assign(n, 0);
    tree.subtree_size.assign(n, 1);
    tree.children.assign(n, {});

    for (NodeId v = 0; v < n; ++v) {
        if (v == tree.root) continue;
        NodeId best = kNoNode;
        for (const NodeId w : acyclic.out[v]) {
            if (w == v) continue;
            if (best == kNoNode) {
                best = w;
                continue;
            }
            const double dw = sim->diff(v, w);
            const double db = sim->diff(v, best);
            bool take = false;
            if (dw != db) {
                take = dw < db;
            } else {
                const double rw = sim->reduction(w);
                const double rb = sim->reduction(best);
                if (rw != rb) {
                    take = rw > rb;
                } else if (topic.timestamps[w] != topic.timestamps[best]) {
                    take = topic.timestamps[w] < topic.timestamps[best];
                } else {
                    take = topic.ids[w] < topic.ids[best];
                }
            }
            if (take) best = w;
        }
        if (best == kNoNode) {
            // Data gap: no surviving citation. Attach to the seed and flag.
            best = tree.root;
            tree.seed_fallbacks.push_back(v);
        }
        tree.parent[v] = best;
        tree.children[best].push_back(v);
    }

    // Parent edges follow the acyclic citation order, so chains terminate at
    // the root; compute depths by BFS over children.
    std::vector<NodeId> order{tree.root};
    order.reserve(n);
    for (std::size_t head = 0; head < order.size(); ++head) {
        const NodeId v = order[head];
        for (const NodeId c : tree.children[v]) {
            tree.depth[c] = tree.depth[v] + 1;
            order.push_back(c);
        }
    }
    if (order.size() != n) {
        throw Error("internal error: idea tree is not connected to the seed");
    }
    for (std::size_t i = n; i-- > 1;) {
        const NodeId v = order[i];
        tree.subtree_size[tree.parent[v]] += tree.subtree_size[v];
    }
    return tree;
}

TreeStats tree_stats(const IdeaTree& tree) {
    TreeStats stats;
    stats.max_depth = tree.max_depth();
    stats.level_sizes.assign(stats.max_depth + 1, 0);
    for (const auto d : tree.depth) stats.level_sizes[d]++;
    for (const auto& c : tree.children) stats.branching[c.size()]++;
    return stats;
}

}  // namespace topicxray
