#include "topicxray/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace topicxray {

double EntropyMeasure::proportional_surprisal(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x);
}

double subtree_entropy(NodeId v, const IdeaTree& tree, const TopicNetwork& topic,
                       const EntropyMeasure& measure) {
    const double p = static_cast<double>(tree.subtree_size[v]) /
                     static_cast<double>(topic.node_count());
    return measure.weight(p);
}

namespace {

// Number of original-network edges with one endpoint in subtree(a) and the
// other in subtree(b), either direction.
std::size_t cross_edges(NodeId a, NodeId b, const IdeaTree& tree, const TopicNetwork& topic) {
    std::size_t count = 0;
    for (const auto& [citer, cited] : topic.edges) {
        const bool ab = tree.is_ancestor(a, citer) && tree.is_ancestor(b, cited);
        const bool ba = tree.is_ancestor(b, citer) && tree.is_ancestor(a, cited);
        if (ab || ba) ++count;
    }
    return count;
}

}  // namespace

double mutual_subtree_entropy(NodeId v_i, NodeId v_j, const IdeaTree& tree,
                              const TopicNetwork& topic, const EntropyMeasure& measure) {
    if (v_i == v_j) throw Error("mutual subtree entropy requires distinct children");
    if (tree.parent[v_i] != tree.parent[v_j]) {
        throw Error("mutual subtree entropy requires children of a common parent");
    }
    if (topic.edge_count() == 0) return 0.0;
    const double q = static_cast<double>(cross_edges(v_i, v_j, tree, topic)) /
                     static_cast<double>(topic.edge_count());
    return measure.weight(q);
}

double knowledge_entropy(NodeId v, const IdeaTree& tree, const TopicNetwork& topic,
                         const EntropyMeasure& measure) {
    if (v == tree.root) {
        throw Error("knowledge entropy is undefined for the seminal work '" +
                    topic.ids[tree.root] + "'");
    }
    double acc = subtree_entropy(v, tree, topic, measure);
    const auto& children = tree.children[v];
    for (const NodeId c : children) acc -= subtree_entropy(c, tree, topic, measure);
    for (std::size_t i = 0; i < children.size(); ++i) {
        for (std::size_t j = i + 1; j < children.size(); ++j) {
            acc += mutual_subtree_entropy(children[i], children[j], tree, topic, measure);
        }
    }
    return std::abs(acc);
}

std::vector<double> knowledge_entropy_all(const IdeaTree& tree, const TopicNetwork& topic,
                                          const EntropyMeasure& measure) {
    const std::size_t n = topic.node_count();
    std::vector<double> ke(n, 0.0);
    if (n == 0) return ke;
    ke[tree.root] = std::numeric_limits<double>::quiet_NaN();

    // Aggregate cross-subtree edge counts in one pass: each network edge
    // couples exactly one sibling pair - the two children of the endpoints'
    // lowest common ancestor - unless one endpoint is an ancestor of the
    // other (then it couples none).
    std::map<std::pair<NodeId, NodeId>, std::size_t> pair_counts;
    for (const auto& [citer, cited] : topic.edges) {
        NodeId a = citer, b = cited;
        if (a == b) continue;
        while (tree.depth[a] > tree.depth[b]) a = tree.parent[a];
        while (tree.depth[b] > tree.depth[a]) b = tree.parent[b];
        if (a == b) continue;  // one endpoint was an ancestor of the other
        while (tree.parent[a] != tree.parent[b]) {
            a = tree.parent[a];
            b = tree.parent[b];
        }
        if (a > b) std::swap(a, b);
        pair_counts[{a, b}]++;
    }

    const double edge_total = static_cast<double>(topic.edge_count());
    for (NodeId v = 0; v < n; ++v) {
        if (v == tree.root) continue;
        double acc = subtree_entropy(v, tree, topic, measure);
        for (const NodeId c : tree.children[v]) acc -= subtree_entropy(c, tree, topic, measure);
        ke[v] = acc;
    }
    for (const auto& [pair, count] : pair_counts) {
        const NodeId p = tree.parent[pair.first];
        if (p == tree.root) continue;  // root KE stays undefined
        ke[p] += measure.weight(static_cast<double>(count) / edge_total);
    }
    for (NodeId v = 0; v < n; ++v) {
        if (v != tree.root) ke[v] = std::abs(ke[v]);
    }
    return ke;
}

VisibleDepth visible_depth(const IdeaTree& tree, const std::vector<double>& ke, double M) {
    std::vector<char> level_visible(tree.max_depth() + 1, 0);
    for (NodeId v = 0; v < tree.node_count(); ++v) {
        if (v == tree.root) continue;
        if (std::isfinite(ke[v]) && ke[v] >= M) level_visible[tree.depth[v]] = 1;
    }
    VisibleDepth result;
    for (std::size_t level = 1; level < level_visible.size(); ++level) {
        if (level_visible[level]) {
            result.vd++;
            result.max_visible_level = static_cast<int>(level);
        }
    }
    return result;
}

double NodeTrack::ke_at(double t_query) const {
    double value = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= t_query + 1e-12) value = ke[i];
    }
    return value;
}

SeriesAnalysis analyze_series(const TopicNetwork& topic, const SimilarityProvider& provider,
                              const EntropyMeasure& measure, double ke_threshold, double step) {
    SeriesAnalysis analysis;
    analysis.ke_threshold = ke_threshold;
    for (const double t : snapshot_times(topic, step)) {
        SnapshotAnalysis snap;
        snap.t = t;
        snap.net = snapshot(topic, t);
        snap.tree = extract(snap.net, provider);
        snap.ke = knowledge_entropy_all(snap.tree, snap.net, measure);
        snap.visibility = visible_depth(snap.tree, snap.ke, ke_threshold);
        analysis.stl = std::max(analysis.stl, snap.visibility.vd);

        for (NodeId v = 0; v < snap.net.node_count(); ++v) {
            if (v == snap.tree.root) continue;
            NodeTrack& track = analysis.tracks[snap.net.ids[v]];
            track.t.push_back(t);
            track.ke.push_back(snap.ke[v]);
            const int level = static_cast<int>(snap.tree.depth[v]);
            track.level.push_back(level);
            if (snap.ke[v] >= ke_threshold) {
                if (!track.first_visible) track.first_visible = t;
                // Levels can also turn visible when a visible node relocates
                // after re-extraction, so record per snapshot, not per crossing.
                if (!analysis.layer_first_visible.count(level)) {
                    analysis.layer_first_visible[level] = t;
                }
            }
        }
        analysis.snaps.push_back(std::move(snap));
    }
    return analysis;
}

DepthSeries depth_series_of(const SeriesAnalysis& analysis) {
    DepthSeries series;
    series.stl = analysis.stl;
    series.layer_first_visible = analysis.layer_first_visible;
    for (const SnapshotAnalysis& snap : analysis.snaps) {
        series.points.push_back({snap.t, snap.visibility.vd, snap.visibility.max_visible_level});
    }
    return series;
}

DepthSeries depth_series(const TopicNetwork& topic, const SimilarityProvider& provider,
                         const EntropyMeasure& measure, double ke_threshold, double step) {
    return depth_series_of(analyze_series(topic, provider, measure, ke_threshold, step));
}

std::vector<LayerIntervalRow> layer_interval_stats(const std::vector<DepthSeries>& series) {
    std::map<int, std::vector<double>> intervals_by_class;
    std::map<int, std::size_t> topics_by_class;
    for (const DepthSeries& s : series) {
        if (s.stl < 1 || s.points.empty()) continue;
        topics_by_class[s.stl]++;
        double prev = s.points.front().t;  // topic birth
        for (const auto& [level, t] : s.layer_first_visible) {
            intervals_by_class[s.stl].push_back(t - prev);
            prev = t;
        }
    }
    std::vector<LayerIntervalRow> rows;
    for (auto& [cls, intervals] : intervals_by_class) {
        LayerIntervalRow row;
        row.stl_class = cls;
        row.topics = topics_by_class[cls];
        row.intervals = intervals.size();
        double sum = 0.0;
        for (const double x : intervals) sum += x;
        row.mean = sum / static_cast<double>(intervals.size());
        std::sort(intervals.begin(), intervals.end());
        const std::size_t m = intervals.size();
        row.median = (m % 2 == 1) ? intervals[m / 2]
                                  : 0.5 * (intervals[m / 2 - 1] + intervals[m / 2]);
        rows.push_back(row);
    }
    return rows;
}

double calibrate_threshold(const std::vector<CalibrationSample>& samples) {
    std::size_t planted_total = 0;
    for (const auto& s : samples) planted_total += s.planted ? 1 : 0;
    if (samples.empty() || planted_total == 0) {
        throw Error("calibration requires a corpus with planted high-value nodes");
    }
    std::vector<double> grid;
    grid.reserve(samples.size());
    for (const auto& s : samples) grid.push_back(s.ke);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    for (const double m : grid) {
        std::size_t tp = 0, fp = 0;
        for (const auto& s : samples) {
            if (s.ke >= m) (s.planted ? tp : fp)++;
        }
        if (tp + fp == 0) continue;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        if (precision >= 0.95 && tp > 0) return m;
    }
    double max_background = -std::numeric_limits<double>::infinity();
    double min_planted = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (s.planted) {
            min_planted = std::min(min_planted, s.ke);
        } else {
            max_background = std::max(max_background, s.ke);
        }
    }
    std::ostringstream os;
    os << "calibration corpus is inseparable at 95% precision: background KE reaches "
       << max_background << " while planted KE starts at " << min_planted;
    throw Error(os.str());
}

}  // namespace topicxray
