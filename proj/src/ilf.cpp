#include "topicxray/ilf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace topicxray {

double delta_d(double ke, double t, double t0, const IlfModel& model) {
    if (!(ke > 0.0)) {
        std::ostringstream os;
        os << "delta_d requires positive knowledge entropy (got " << ke << ")";
        throw Error(os.str());
    }
    if (!(t > t0)) {
        std::ostringstream os;
        os << "delta_d requires t > t0 (got t=" << t << ", t0=" << t0 << ")";
        throw Error(os.str());
    }
    const double dt = std::max(t - t0, model.min_dt);
    return std::log(ke / std::pow(dt, model.beta)) / std::log(model.log_base);
}

UpperBound delta_d_upper(const NodeTrack& track, double t_now, const IlfModel& model) {
    if (!track.first_visible) {
        throw Error("delta_d upper bound is undefined for a node that never became visible");
    }
    UpperBound out;
    out.t0 = *track.first_visible;
    out.ke_now = track.ke_at(t_now);
    if (out.ke_now > 0.0) {
        // The clamp inside delta_d realizes "elapsed time at least min_dt",
        // which is also the most favorable admissible evaluation point for
        // the current KE; now and upper therefore coincide under this rule.
        const double t_eval = std::max(t_now, out.t0 + model.min_dt);
        out.delta_d_now = delta_d(out.ke_now, t_eval, out.t0, model);
        out.delta_d_upper = out.delta_d_now;
    } else {
        out.delta_d_now = -std::numeric_limits<double>::infinity();
        out.delta_d_upper = out.delta_d_now;
    }
    return out;
}

FitResult fit_exponent(std::span<const IlfSample> samples) {
    if (samples.size() < 3) throw Error("fit_exponent requires at least 3 samples");
    for (const IlfSample& s : samples) {
        if (!(s.dt > 0.0)) throw Error("fit_exponent requires dt > 0 for every sample");
        if (!(s.ke > 0.0)) throw Error("fit_exponent requires ke > 0 for every sample");
    }
    const double dt0 = samples.front().dt;
    bool distinct = false;
    for (const IlfSample& s : samples) {
        if (s.dt != dt0) {
            distinct = true;
            break;
        }
    }
    if (!distinct) throw Error("degenerate design: all samples share the same dt");

    // delta_d = log10(ke) - beta * log10(dt): single-parameter least squares.
    double num = 0.0, den = 0.0;
    for (const IlfSample& s : samples) {
        const double x = std::log10(s.dt);
        const double y = std::log10(s.ke) - s.delta_d;
        num += x * y;
        den += x * x;
    }
    if (den == 0.0) throw Error("degenerate design: every sample has dt = 1");
    FitResult fit;
    fit.beta = num / den;
    fit.n = samples.size();
    double ss = 0.0;
    for (const IlfSample& s : samples) {
        const double r = s.delta_d - (std::log10(s.ke) - fit.beta * std::log10(s.dt));
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(samples.size()));
    return fit;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::kTooSmallKe:
            return "too-small-KE";
        case Regime::kDecayedStagnant:
            return "decayed-stagnant";
        case Regime::kHighPotential:
            return "high-potential";
        case Regime::kOverpowered:
            return "overpowered";
    }
    return "?";
}

namespace {

NodeId find_node(const TopicNetwork& net, const std::string& id) {
    const auto it = std::lower_bound(net.ids.begin(), net.ids.end(), id);
    if (it == net.ids.end() || *it != id) return kNoNode;
    return static_cast<NodeId>(it - net.ids.begin());
}

// Max delta_d_upper the node ever exhibited along its history.
double peak_upper(const NodeTrack& track, const IlfModel& model) {
    if (!track.first_visible) return -std::numeric_limits<double>::infinity();
    const double t0 = *track.first_visible;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < track.t.size(); ++i) {
        if (track.t[i] < t0 || !(track.ke[i] > 0.0)) continue;
        const double t_eval = std::max(track.t[i], t0 + model.min_dt);
        peak = std::max(peak, delta_d(track.ke[i], t_eval, t0, model));
    }
    return peak;
}

double last_vd_increase(const SeriesAnalysis& analysis) {
    double when = analysis.birth_time();
    int prev = 0;
    for (const SnapshotAnalysis& snap : analysis.snaps) {
        if (snap.visibility.vd > prev) when = snap.t;
        prev = std::max(prev, snap.visibility.vd);
    }
    return when;
}

// Top two level-1 knowledge entropies of one snapshot.
struct LevelOneCeiling {
    double top = 0.0;
    double second = 0.0;
    NodeId top_node = kNoNode;
    int rivals = 0;

    double excluding(NodeId self) const { return self == top_node ? second : top; }
};

LevelOneCeiling level_one_ceiling(const SnapshotAnalysis& snap) {
    LevelOneCeiling c;
    for (NodeId v = 0; v < snap.net.node_count(); ++v) {
        if (v == snap.tree.root || snap.tree.depth[v] != 1) continue;
        c.rivals++;
        if (snap.ke[v] > c.top || c.top_node == kNoNode) {
            c.second = c.top;
            c.top = snap.ke[v];
            c.top_node = v;
        } else if (snap.ke[v] > c.second) {
            c.second = snap.ke[v];
        }
    }
    return c;
}

}  // namespace

int depth_contribution(const SeriesAnalysis& analysis, const std::string& node_id) {
    const auto it = analysis.tracks.find(node_id);
    if (it == analysis.tracks.end()) {
        throw Error("node '" + node_id + "' does not appear in the series");
    }
    if (!it->second.first_visible) return 0;
    const double t0 = *it->second.first_visible;
    int contributed = 0;
    for (const auto& [level, t_vis] : analysis.layer_first_visible) {
        if (t_vis <= t0) continue;
        const SnapshotAnalysis* snap = nullptr;
        for (const SnapshotAnalysis& s : analysis.snaps) {
            if (s.t >= t_vis) {
                snap = &s;
                break;
            }
        }
        if (!snap) continue;
        const NodeId self = find_node(snap->net, node_id);
        if (self == kNoNode) continue;
        for (NodeId u = 0; u < snap->net.node_count(); ++u) {
            if (u == snap->tree.root || static_cast<int>(snap->tree.depth[u]) != level) continue;
            if (!(snap->ke[u] >= analysis.ke_threshold)) continue;
            if (snap->tree.is_ancestor(self, u)) {
                ++contributed;
                break;
            }
        }
    }
    return contributed;
}

PotentialReport classify_regimes(const SeriesAnalysis& analysis, const IlfModel& model,
                                 double stagnation_window) {
    PotentialReport report;
    report.model = model;
    report.ke_threshold = analysis.ke_threshold;
    report.stagnation_window = stagnation_window;
    const SnapshotAnalysis& last = analysis.snaps.back();
    report.t_now = last.t;

    std::vector<LevelOneCeiling> ceilings;
    ceilings.reserve(analysis.snaps.size());
    for (const SnapshotAnalysis& snap : analysis.snaps) {
        ceilings.push_back(level_one_ceiling(snap));
    }
    const double vd_flat_since = last_vd_increase(analysis);

    std::vector<std::string> candidates;
    for (const auto& [id, track] : analysis.tracks) {
        if (track.first_visible) candidates.push_back(id);
    }
    std::sort(candidates.begin(), candidates.end());

    for (const std::string& id : candidates) {
        const NodeTrack& track = analysis.tracks.at(id);
        NodePotential item;
        item.node = id;
        item.t0 = *track.first_visible;
        item.level = track.level.back();
        item.ke = track.ke_at(report.t_now);
        const UpperBound ub = delta_d_upper(track, report.t_now, model);
        item.delta_d_now = ub.delta_d_now;
        item.delta_d_upper = ub.delta_d_upper;
        item.peak_upper = peak_upper(track, model);
        item.attributed_increase = depth_contribution(analysis, id) > 0;

        // Overtake: first snapshot where the node is visible and its KE
        // reaches the level-1 ceiling (excluding itself). The rule needs at
        // least one rival so a lone child cannot overtake vacuously.
        double overtake = -1.0;
        bool ceiling_now = false;
        for (std::size_t k = 0; k < analysis.snaps.size(); ++k) {
            const SnapshotAnalysis& snap = analysis.snaps[k];
            const NodeId self = find_node(snap.net, id);
            if (self == kNoNode || self == snap.tree.root) continue;
            if (!(snap.ke[self] >= analysis.ke_threshold)) continue;
            const LevelOneCeiling& c = ceilings[k];
            const bool self_is_l1 = snap.tree.depth[self] == 1;
            const int rivals = c.rivals - (self_is_l1 ? 1 : 0);
            if (rivals < 1) continue;
            if (snap.ke[self] >= c.excluding(self)) {
                if (overtake < 0.0) overtake = snap.t;
                if (k + 1 == analysis.snaps.size()) ceiling_now = true;
            }
        }

        const double stagnant_since = std::max(overtake, vd_flat_since);
        if (overtake >= 0.0 && ceiling_now &&
            report.t_now - stagnant_since >= stagnation_window) {
            item.regime = Regime::kOverpowered;
        } else if (item.delta_d_upper > 1.0) {
            item.regime = Regime::kHighPotential;
        } else if (item.peak_upper >= 1.0) {
            item.regime = Regime::kDecayedStagnant;
        } else {
            item.regime = Regime::kTooSmallKe;
        }
        report.items.push_back(std::move(item));
    }
    return report;
}

}  // namespace topicxray
