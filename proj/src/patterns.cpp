#include "topicxray/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace topicxray {

const char* confidence_name(Confidence c) {
    switch (c) {
        case Confidence::kNotMet:
            return "not-met";
        case Confidence::kRuleMet:
            return "rule-met";
        case Confidence::kPartial:
            return "partial";
    }
    return "?";
}

namespace {

NodeId find_node(const TopicNetwork& net, const std::string& id) {
    const auto it = std::lower_bound(net.ids.begin(), net.ids.end(), id);
    if (it == net.ids.end() || *it != id) return kNoNode;
    return static_cast<NodeId>(it - net.ids.begin());
}

// Relative KE slope per year across [t_from, t_from + window], measured on
// the recorded samples nearest those times.
std::optional<double> relative_slope(const NodeTrack& track, double t_from, double window) {
    const double t_to = t_from + window;
    std::optional<double> ke_from, ke_to;
    double best_from = -std::numeric_limits<double>::infinity();
    double best_to = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < track.t.size(); ++i) {
        if (track.t[i] <= t_from + 1e-9 && track.t[i] > best_from) {
            best_from = track.t[i];
            ke_from = track.ke[i];
        }
        if (track.t[i] <= t_to + 1e-9 && track.t[i] > best_to) {
            best_to = track.t[i];
            ke_to = track.ke[i];
        }
    }
    if (!ke_from || !ke_to || best_to <= best_from) return std::nullopt;
    const double base = std::max(*ke_from, 1e-9);
    return (*ke_to - *ke_from) / ((best_to - best_from) * base);
}

std::size_t node_count_at(const SeriesAnalysis& analysis, double t) {
    std::size_t count = 0;
    for (const SnapshotAnalysis& snap : analysis.snaps) {
        if (snap.t <= t + 1e-9) count = snap.net.node_count();
    }
    return count;
}

}  // namespace

PatternFinding detect_p1_summative(const SeriesAnalysis& analysis, const PatternParams& p) {
    PatternFinding finding;
    finding.pattern_id = "P1";
    finding.thresholds = {{"growth_factor", p.p1_growth_factor},
                          {"ke_threshold", analysis.ke_threshold}};
    if (analysis.snaps.empty() || analysis.stl > 1) return finding;
    const auto it = analysis.layer_first_visible.find(1);
    if (it == analysis.layer_first_visible.end()) return finding;  // never broke 0 -> 1
    const double t_vis = it->second;
    const std::size_t scale_then = node_count_at(analysis, t_vis);
    const std::size_t scale_now = analysis.snaps.back().net.node_count();
    if (scale_then == 0) return finding;
    const double growth =
        static_cast<double>(scale_now) / static_cast<double>(scale_then);
    if (growth >= p.p1_growth_factor) {
        finding.confidence = Confidence::kRuleMet;
        finding.evidence.push_back({t_vis, analysis.snaps.back().net.seed_id,
                                    static_cast<double>(scale_then)});
        finding.evidence.push_back({analysis.end_time(), analysis.snaps.back().net.seed_id,
                                    static_cast<double>(scale_now)});
    }
    return finding;
}

std::vector<DriverAttribution> detect_p2_driver(const SeriesAnalysis& analysis) {
    std::vector<DriverAttribution> events;
    for (const auto& [level, t_vis] : analysis.layer_first_visible) {
        const SnapshotAnalysis* snap = nullptr;
        for (const SnapshotAnalysis& s : analysis.snaps) {
            if (s.t >= t_vis) {
                snap = &s;
                break;
            }
        }
        if (!snap) continue;
        DriverAttribution event;
        event.t = t_vis;
        event.level = level;
        std::vector<std::string> fresh, relocated;
        for (NodeId v = 0; v < snap->net.node_count(); ++v) {
            if (v == snap->tree.root) continue;
            if (static_cast<int>(snap->tree.depth[v]) != level) continue;
            if (!(snap->ke[v] >= analysis.ke_threshold)) continue;
            const NodeTrack& track = analysis.tracks.at(snap->net.ids[v]);
            if (track.first_visible && *track.first_visible >= t_vis) {
                fresh.push_back(snap->net.ids[v]);
            } else {
                relocated.push_back(snap->net.ids[v]);
            }
        }
        // Fresh KE crossings explain the new layer; a re-extracted tree can
        // also relocate an already-visible node into it.
        event.nodes = fresh.empty() ? relocated : fresh;
        event.tie = event.nodes.size() > 1;
        if (!event.nodes.empty()) events.push_back(std::move(event));
    }
    std::sort(events.begin(), events.end(), [](const DriverAttribution& a,
                                               const DriverAttribution& b) {
        return a.t != b.t ? a.t < b.t : a.level < b.level;
    });
    return events;
}

PatternFinding detect_p3_relay(const SeriesAnalysis& analysis, const PatternParams& p) {
    PatternFinding finding;
    finding.pattern_id = "P3";
    finding.thresholds = {{"flatten_eps", p.flatten_eps},
                          {"ke_threshold", analysis.ke_threshold}};
    const auto events = detect_p2_driver(analysis);
    for (std::size_t i = 0; i < events.size(); ++i) {
        for (std::size_t j = i + 1; j < events.size(); ++j) {
            if (!(events[j].t > events[i].t && events[j].level > events[i].level)) continue;
            for (const std::string& earlier : events[i].nodes) {
                const NodeTrack& track = analysis.tracks.at(earlier);
                // Growth of the earlier driver must have flattened by the
                // time the later driver appears.
                const auto slope = relative_slope(track, events[j].t - 1.0, 1.0);
                if (slope && *slope < p.flatten_eps) {
                    finding.confidence = Confidence::kRuleMet;
                    finding.evidence.push_back({events[i].t, earlier,
                                                static_cast<double>(events[i].level)});
                    finding.evidence.push_back({events[j].t, events[j].nodes.front(),
                                                static_cast<double>(events[j].level)});
                    return finding;
                }
            }
        }
    }
    return finding;
}

PatternFinding detect_p4_overpowered(const SeriesAnalysis& analysis, const PatternParams& p) {
    PatternFinding finding;
    finding.pattern_id = "P4";
    finding.thresholds = {{"stagnation_window", p.stagnation_window},
                          {"ke_threshold", analysis.ke_threshold}};
    if (analysis.snaps.empty()) return finding;

    double vd_flat_since = analysis.birth_time();
    {
        int prev = 0;
        for (const SnapshotAnalysis& snap : analysis.snaps) {
            if (snap.visibility.vd > prev) vd_flat_since = snap.t;
            prev = std::max(prev, snap.visibility.vd);
        }
    }
    const double t_end = analysis.end_time();

    std::vector<std::string> candidates;
    for (const auto& [id, track] : analysis.tracks) {
        if (track.first_visible) candidates.push_back(id);
    }
    std::sort(candidates.begin(), candidates.end());

    for (const std::string& id : candidates) {
        double overtake = -1.0;
        bool ceiling_at_end = false;
        for (const SnapshotAnalysis& snap : analysis.snaps) {
            const NodeId self = find_node(snap.net, id);
            if (self == kNoNode || self == snap.tree.root) continue;
            if (!(snap.ke[self] >= analysis.ke_threshold)) continue;
            double ceiling = 0.0;
            int rivals = 0;
            for (NodeId v = 0; v < snap.net.node_count(); ++v) {
                if (v == snap.tree.root || v == self || snap.tree.depth[v] != 1) continue;
                ceiling = std::max(ceiling, snap.ke[v]);
                rivals++;
            }
            if (rivals < 1) continue;
            if (snap.ke[self] >= ceiling) {
                if (overtake < 0.0) overtake = snap.t;
                if (&snap == &analysis.snaps.back()) ceiling_at_end = true;
            }
        }
        if (overtake < 0.0 || !ceiling_at_end) continue;
        const double stagnant_since = std::max(overtake, vd_flat_since);
        if (t_end - stagnant_since >= p.stagnation_window) {
            finding.confidence = Confidence::kRuleMet;
            finding.evidence.push_back({overtake, id, analysis.tracks.at(id).ke_at(overtake)});
            finding.evidence.push_back({t_end, id, analysis.tracks.at(id).ke_at(t_end)});
            return finding;
        }
    }
    return finding;
}

PatternFinding detect_p5_branch_inhibition(const SeriesAnalysis& analysis,
                                           const PatternParams& p) {
    PatternFinding finding;
    finding.pattern_id = "P5";
    finding.thresholds = {{"flatten_eps", p.flatten_eps},
                          {"inhibition_window", p.inhibition_window},
                          {"ke_threshold", analysis.ke_threshold}};
    if (analysis.snaps.empty()) return finding;
    const SnapshotAnalysis& last = analysis.snaps.back();

    for (NodeId parent = 0; parent < last.net.node_count(); ++parent) {
        const auto& kids = last.tree.children[parent];
        for (std::size_t x = 0; x < kids.size(); ++x) {
            for (std::size_t y = 0; y < kids.size(); ++y) {
                if (x == y) continue;
                const std::string& a_id = last.net.ids[kids[x]];  // overtaken branch
                const std::string& b_id = last.net.ids[kids[y]];  // overtaking branch
                const auto a_it = analysis.tracks.find(a_id);
                const auto b_it = analysis.tracks.find(b_id);
                if (a_it == analysis.tracks.end() || b_it == analysis.tracks.end()) continue;
                const NodeTrack& a = a_it->second;
                const NodeTrack& b = b_it->second;
                if (!a.first_visible || !b.first_visible) continue;

                // Crossover: a led strictly while visible, then b moved
                // strictly ahead.
                bool a_led = false;
                double t_cross = -1.0;
                for (const SnapshotAnalysis& snap : analysis.snaps) {
                    const double ka = a.ke_at(snap.t);
                    const double kb = b.ke_at(snap.t);
                    if (!a_led) {
                        if (ka > kb && ka >= analysis.ke_threshold) a_led = true;
                    } else if (kb > ka) {
                        t_cross = snap.t;
                        break;
                    }
                }
                if (t_cross < 0.0) continue;
                const auto slope = relative_slope(a, t_cross, p.inhibition_window);
                if (slope && *slope < p.flatten_eps) {
                    finding.confidence = Confidence::kRuleMet;
                    finding.evidence.push_back({t_cross, b_id, b.ke_at(t_cross)});
                    finding.evidence.push_back(
                        {t_cross + p.inhibition_window, a_id, *slope});
                    return finding;
                }
            }
        }
    }
    return finding;
}

PatternFinding detect_p6_interdisciplinary(const SeriesAnalysis& analysis,
                                           const PatternParams&) {
    PatternFinding finding;
    finding.pattern_id = "P6";
    finding.thresholds = {{"ke_threshold", analysis.ke_threshold}};
    if (analysis.snaps.empty()) return finding;
    const SnapshotAnalysis& last = analysis.snaps.back();
    const std::string& seed_disc = last.net.disciplines[last.tree.root];

    bool missing_tags = false;
    for (const DriverAttribution& event : detect_p2_driver(analysis)) {
        for (const std::string& node : event.nodes) {
            const NodeId v = find_node(last.net, node);
            if (v == kNoNode) continue;
            const std::string& disc = last.net.disciplines[v];
            if (disc.empty() || seed_disc.empty()) {
                missing_tags = true;
                finding.evidence.push_back({event.t, node, static_cast<double>(event.level)});
                continue;
            }
            if (disc != seed_disc) {
                finding.confidence = Confidence::kRuleMet;
                finding.evidence.clear();
                finding.evidence.push_back({event.t, node, static_cast<double>(event.level)});
                return finding;
            }
        }
    }
    if (missing_tags) finding.confidence = Confidence::kPartial;
    return finding;
}

RateComparison compare_p7_rates(const DepthSeries& a, const DepthSeries& b) {
    auto times = [](const DepthSeries& s) {
        std::vector<std::optional<double>> out;
        if (s.points.empty()) return out;
        const double birth = s.points.front().t;
        int max_depth = 0;
        for (const DepthPoint& p : s.points) max_depth = std::max(max_depth, p.vd);
        out.assign(max_depth, std::nullopt);
        for (int k = 1; k <= max_depth; ++k) {
            for (const DepthPoint& p : s.points) {
                if (p.vd >= k) {
                    out[k - 1] = p.t - birth;
                    break;
                }
            }
        }
        return out;
    };
    RateComparison cmp;
    cmp.time_to_depth_a = times(a);
    cmp.time_to_depth_b = times(b);
    const std::size_t n = std::max(cmp.time_to_depth_a.size(), cmp.time_to_depth_b.size());
    cmp.ratio.assign(n, std::nullopt);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < cmp.time_to_depth_a.size() && k < cmp.time_to_depth_b.size() &&
            cmp.time_to_depth_a[k] && cmp.time_to_depth_b[k] && *cmp.time_to_depth_b[k] > 0.0) {
            cmp.ratio[k] = *cmp.time_to_depth_a[k] / *cmp.time_to_depth_b[k];
        }
    }
    return cmp;
}

std::vector<PatternFinding> detect_all(const SeriesAnalysis& analysis, const PatternParams& p) {
    std::vector<PatternFinding> findings;
    findings.push_back(detect_p1_summative(analysis, p));

    PatternFinding p2;
    p2.pattern_id = "P2";
    p2.thresholds = {{"ke_threshold", analysis.ke_threshold}};
    const auto events = detect_p2_driver(analysis);
    bool any_tie = false;
    for (const DriverAttribution& e : events) {
        for (const std::string& node : e.nodes) {
            p2.evidence.push_back({e.t, node, static_cast<double>(e.level)});
        }
        any_tie = any_tie || e.tie;
    }
    if (!events.empty()) p2.confidence = any_tie ? Confidence::kPartial : Confidence::kRuleMet;
    findings.push_back(std::move(p2));

    findings.push_back(detect_p3_relay(analysis, p));
    findings.push_back(detect_p4_overpowered(analysis, p));
    findings.push_back(detect_p5_branch_inhibition(analysis, p));
    findings.push_back(detect_p6_interdisciplinary(analysis, p));
    return findings;
}

}  // namespace topicxray
