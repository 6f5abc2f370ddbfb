#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicxray/ideatree.hpp"
#include "topicxray/similarity.hpp"
#include "topicxray/topic.hpp"

namespace topicxray {

// Entropy weight applied to subtree proportions (H) and cross-citation
// fractions (I). The default is proportional surprisal, -x * log2(x),
// with the boundary convention H(0) = H(1) = 0. Pluggable for experiments;
// the log base for the default form is fixed at 2.
struct EntropyMeasure {
    std::function<double(double)> weight = proportional_surprisal;
    static double proportional_surprisal(double x);
};

inline constexpr double kDefaultKeThreshold = 0.1;  // shipped M

// Subtree entropy H(v): weight of |subtree(v)| / |topic nodes|.
double subtree_entropy(NodeId v, const IdeaTree& tree, const TopicNetwork& topic,
                       const EntropyMeasure& measure = {});

// Mutual subtree entropy I(v_i, v_j) for distinct children of one parent:
// weight of the fraction of original-network edges crossing between the two
// subtrees (either direction). 0 for a zero-edge topic.
double mutual_subtree_entropy(NodeId v_i, NodeId v_j, const IdeaTree& tree,
                              const TopicNetwork& topic, const EntropyMeasure& measure = {});

// Knowledge entropy KE(v) = |H(v) - sum_c H(c) + sum_{ci != cj} I(ci, cj)|.
// Undefined for the root (the seminal work): throws.
double knowledge_entropy(NodeId v, const IdeaTree& tree, const TopicNetwork& topic,
                         const EntropyMeasure& measure = {});

// KE for every node at once (root entry is NaN). Cross-subtree edge counts
// are aggregated once per topic instead of per query.
std::vector<double> knowledge_entropy_all(const IdeaTree& tree, const TopicNetwork& topic,
                                          const EntropyMeasure& measure = {});

struct VisibleDepth {
    int vd = 0;                 // number of visible layers (levels >= 1)
    int max_visible_level = 0;  // deepest visible level; equals vd when contiguous
};

// A level >= 1 is visible when it holds at least one node with KE >= M.
VisibleDepth visible_depth(const IdeaTree& tree, const std::vector<double>& ke, double M);

struct SnapshotAnalysis {
    double t = 0.0;
    TopicNetwork net;
    IdeaTree tree;
    std::vector<double> ke;  // aligned with net node indices; NaN at the root
    VisibleDepth visibility;
};

// Per-node knowledge-entropy trajectory across a snapshot series.
struct NodeTrack {
    std::vector<double> t;
    std::vector<double> ke;
    std::vector<int> level;
    std::optional<double> first_visible;  // t0
    double ke_at(double t_query) const;   // latest sample at or before t_query
};

struct SeriesAnalysis {
    std::vector<SnapshotAnalysis> snaps;
    std::unordered_map<std::string, NodeTrack> tracks;  // keyed by paper id
    std::map<int, double> layer_first_visible;          // level -> first visible t
    int stl = 0;
    double ke_threshold = kDefaultKeThreshold;

    double birth_time() const { return snaps.front().t; }
    double end_time() const { return snaps.back().t; }
};

struct DepthPoint {
    double t;
    int vd;
    int max_visible_level;
};

struct DepthSeries {
    std::vector<DepthPoint> points;
    int stl = 0;
    std::map<int, double> layer_first_visible;
};

// Full per-snapshot pipeline: snapshot -> extract -> KE ledger -> visibility.
SeriesAnalysis analyze_series(const TopicNetwork& topic, const SimilarityProvider& provider,
                              const EntropyMeasure& measure, double ke_threshold,
                              double step = 1.0);

DepthSeries depth_series_of(const SeriesAnalysis& analysis);

// One-call form when only the depth series is needed.
DepthSeries depth_series(const TopicNetwork& topic, const SimilarityProvider& provider,
                         const EntropyMeasure& measure, double ke_threshold, double step = 1.0);

struct LayerIntervalRow {
    int stl_class = 0;        // topics whose series max depth equals this
    std::size_t topics = 0;
    std::size_t intervals = 0;
    double mean = 0.0;
    double median = 0.0;
};

// Time between successive first-visible layer events (birth -> layer 1 is the
// first interval), grouped by each series' limit depth.
std::vector<LayerIntervalRow> layer_interval_stats(const std::vector<DepthSeries>& series);

struct CalibrationSample {
    double ke = 0.0;
    bool planted = false;  // true for planted high-value nodes
};

// Smallest observed-KE threshold that keeps precision >= 0.95 for the
// planted class. Throws with an overlap report when inseparable or empty.
double calibrate_threshold(const std::vector<CalibrationSample>& samples);

}  // namespace topicxray
