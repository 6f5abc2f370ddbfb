#include "topicxray/topic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace topicxray {

namespace {

struct RawNode {
    std::string id;
    double timestamp;
    std::string discipline;
};

struct RawEdge {
    std::string citer;
    std::string cited;
    double time;
};

// Canonicalize: nodes sorted by id, edges sorted by (citer, cited).
TopicNetwork assemble(std::string seed_id, std::vector<RawNode> nodes, std::vector<RawEdge> edges,
                      double as_of) {
    std::sort(nodes.begin(), nodes.end(),
              [](const RawNode& a, const RawNode& b) { return a.id < b.id; });
    TopicNetwork topic;
    topic.seed_id = std::move(seed_id);
    topic.as_of = as_of;
    std::unordered_map<std::string, NodeId> index;
    index.reserve(nodes.size() * 2);
    for (RawNode& n : nodes) {
        index.emplace(n.id, static_cast<NodeId>(topic.ids.size()));
        topic.ids.push_back(std::move(n.id));
        topic.timestamps.push_back(n.timestamp);
        topic.disciplines.push_back(std::move(n.discipline));
    }
    topic.seed = index.at(topic.seed_id);

    std::vector<std::pair<std::pair<NodeId, NodeId>, double>> resolved;
    resolved.reserve(edges.size());
    for (const RawEdge& e : edges) {
        resolved.push_back({{index.at(e.citer), index.at(e.cited)}, e.time});
    }
    std::sort(resolved.begin(), resolved.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t n = topic.ids.size();
    topic.out.assign(n, {});
    topic.in.assign(n, {});
    topic.undirected.assign(n, {});
    for (const auto& [pair, time] : resolved) {
        topic.edges.push_back(pair);
        topic.edge_times.push_back(time);
        topic.out[pair.first].push_back(pair.second);
        topic.in[pair.second].push_back(pair.first);
        topic.undirected[pair.first].push_back(pair.second);
        topic.undirected[pair.second].push_back(pair.first);
    }
    for (auto& v : topic.undirected) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return topic;
}

}  // namespace

NodeId TopicNetwork::require(const std::string& id) const {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
        throw Error("paper '" + id + "' is not part of topic '" + seed_id + "'");
    }
    return static_cast<NodeId>(it - ids.begin());
}

TopicNetwork build_topic(const Corpus& corpus, const std::string& seed_id,
                         int min_seed_citations) {
    const NodeId seed = corpus.require(seed_id);
    const auto& citers = corpus.citers_of[seed];
    if (min_seed_citations > 0 &&
        citers.size() < static_cast<std::size_t>(min_seed_citations)) {
        std::ostringstream os;
        os << "seed '" << seed_id << "' has " << citers.size()
           << " in-corpus citers, below the gate of " << min_seed_citations
           << " (pass 0 to disable)";
        throw Error(os.str());
    }

    std::unordered_set<NodeId> members;
    members.reserve(citers.size() + 1);
    members.insert(seed);
    for (const NodeId c : citers) members.insert(c);

    std::vector<RawNode> nodes;
    nodes.reserve(members.size());
    double as_of = corpus.papers[seed].timestamp;
    for (const NodeId m : members) {
        const PaperRecord& p = corpus.papers[m];
        nodes.push_back({p.id, p.timestamp, p.discipline});
        as_of = std::max(as_of, p.timestamp);
    }
    std::vector<RawEdge> edges;
    for (const EdgeRef& e : corpus.edges) {
        if (members.count(e.citer) && members.count(e.cited)) {
            edges.push_back(
                {corpus.papers[e.citer].id, corpus.papers[e.cited].id, e.effective_time});
        }
    }
    return assemble(seed_id, std::move(nodes), std::move(edges), as_of);
}

TopicNetwork snapshot(const TopicNetwork& topic, double t) {
    const double seed_time = topic.timestamps[topic.seed];
    if (t < seed_time) {
        std::ostringstream os;
        os << "snapshot time " << t << " precedes the seed timestamp " << seed_time;
        throw Error(os.str());
    }
    std::vector<RawNode> nodes;
    std::vector<char> keep(topic.node_count(), 0);
    for (std::size_t i = 0; i < topic.node_count(); ++i) {
        if (topic.timestamps[i] <= t) {
            keep[i] = 1;
            nodes.push_back({topic.ids[i], topic.timestamps[i], topic.disciplines[i]});
        }
    }
    std::vector<RawEdge> edges;
    for (std::size_t k = 0; k < topic.edges.size(); ++k) {
        const auto [citer, cited] = topic.edges[k];
        if (keep[citer] && keep[cited] && topic.edge_times[k] <= t) {
            edges.push_back({topic.ids[citer], topic.ids[cited], topic.edge_times[k]});
        }
    }
    return assemble(topic.seed_id, std::move(nodes), std::move(edges), t);
}

std::vector<double> snapshot_times(const TopicNetwork& topic, double step) {
    if (!(step > 0.0)) throw Error("snapshot step must be positive");
    const double start = topic.timestamps[topic.seed];
    std::vector<double> times;
    for (std::size_t k = 0;; ++k) {
        const double t = start + static_cast<double>(k) * step;
        if (t >= topic.as_of - 1e-12) break;
        times.push_back(t);
    }
    times.push_back(topic.as_of);
    return times;
}

std::vector<TopicNetwork> snapshot_series(const TopicNetwork& topic, double step) {
    std::vector<TopicNetwork> series;
    for (const double t : snapshot_times(topic, step)) series.push_back(snapshot(topic, t));
    return series;
}

}  // namespace topicxray
