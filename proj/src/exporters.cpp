#include "topicxray/exporters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace topicxray {

std::string format_sig6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double sig6(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_sig6(v).c_str(), nullptr);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

void write_tree_dot(const IdeaTree& tree, const TopicNetwork& topic,
                    const std::vector<double>* ke, std::ostream& out) {
    out << "digraph ideatree {\n";
    out << "  rankdir=TB;\n  node [shape=box];\n";
    for (NodeId v = 0; v < topic.node_count(); ++v) {
        out << "  \"" << dot_escape(topic.ids[v]) << "\" [tooltip=\"depth=" << tree.depth[v];
        if (ke && v != tree.root && std::isfinite((*ke)[v])) {
            out << " ke=" << format_sig6((*ke)[v]);
        }
        out << "\"];\n";
    }
    for (NodeId v = 0; v < topic.node_count(); ++v) {
        if (v == tree.root) continue;
        out << "  \"" << dot_escape(topic.ids[tree.parent[v]]) << "\" -> \""
            << dot_escape(topic.ids[v]) << "\";\n";
    }
    out << "}\n";
}

nlohmann::json tree_json(const IdeaTree& tree, const TopicNetwork& topic) {
    nlohmann::json parents = nlohmann::json::object();
    nlohmann::json depths = nlohmann::json::object();
    for (NodeId v = 0; v < topic.node_count(); ++v) {
        depths[topic.ids[v]] = tree.depth[v];
        if (v != tree.root) parents[topic.ids[v]] = topic.ids[tree.parent[v]];
    }
    nlohmann::json j;
    j["root"] = topic.ids[tree.root];
    j["parents"] = std::move(parents);
    j["depths"] = std::move(depths);
    if (!tree.seed_fallbacks.empty()) {
        nlohmann::json fallbacks = nlohmann::json::array();
        for (const NodeId v : tree.seed_fallbacks) fallbacks.push_back(topic.ids[v]);
        j["seed_fallbacks"] = std::move(fallbacks);
    }
    return j;
}

nlohmann::json loopcut_json(const LoopCutReport& report) {
    nlohmann::json removed = nlohmann::json::array();
    for (const RemovedEdge& e : report.removed_edges) {
        removed.push_back({{"citer", e.citer},
                           {"cited", e.cited},
                           {"reason", e.reason == LoopCutReason::kTimeInversion
                                          ? "time-inversion"
                                          : "cycle-break"}});
    }
    return nlohmann::json{{"removed_edges", std::move(removed)}};
}

void write_ledger_csv(const SeriesAnalysis& analysis, std::ostream& out) {
    out << "t,node_id,ke,level,visible\n";
    for (const SnapshotAnalysis& snap : analysis.snaps) {
        for (NodeId v = 0; v < snap.net.node_count(); ++v) {
            if (v == snap.tree.root) continue;
            out << format_sig6(snap.t) << ',' << snap.net.ids[v] << ','
                << format_sig6(snap.ke[v]) << ',' << snap.tree.depth[v] << ','
                << (snap.ke[v] >= analysis.ke_threshold ? 1 : 0) << '\n';
        }
    }
}

void write_depth_csv(const DepthSeries& series, std::ostream& out) {
    out << "t,vd,max_visible_level\n";
    for (const DepthPoint& p : series.points) {
        out << format_sig6(p.t) << ',' << p.vd << ',' << p.max_visible_level << '\n';
    }
}

nlohmann::json depth_json(const DepthSeries& series) {
    nlohmann::json points = nlohmann::json::array();
    for (const DepthPoint& p : series.points) {
        points.push_back(
            {{"t", sig6(p.t)}, {"vd", p.vd}, {"max_visible_level", p.max_visible_level}});
    }
    nlohmann::json layers = nlohmann::json::object();
    for (const auto& [level, t] : series.layer_first_visible) {
        layers[std::to_string(level)] = sig6(t);
    }
    return nlohmann::json{
        {"stl", series.stl}, {"points", std::move(points)}, {"layer_first_visible", layers}};
}

nlohmann::json potential_json(const PotentialReport& report) {
    nlohmann::json items = nlohmann::json::array();
    for (const NodePotential& item : report.items) {
        items.push_back({{"node", item.node},
                         {"level", item.level},
                         {"ke", sig6(item.ke)},
                         {"t0", sig6(item.t0)},
                         {"delta_d_now", sig6(item.delta_d_now)},
                         {"delta_d_upper", sig6(item.delta_d_upper)},
                         {"regime", regime_name(item.regime)}});
    }
    return nlohmann::json{{"t_now", sig6(report.t_now)},
                          {"ke_threshold", sig6(report.ke_threshold)},
                          {"beta", sig6(report.model.beta)},
                          {"log_base", sig6(report.model.log_base)},
                          {"min_dt", sig6(report.model.min_dt)},
                          {"stagnation_window", sig6(report.stagnation_window)},
                          {"nodes", std::move(items)}};
}

nlohmann::json findings_json(const std::vector<PatternFinding>& findings) {
    nlohmann::json out = nlohmann::json::array();
    for (const PatternFinding& f : findings) {
        nlohmann::json evidence = nlohmann::json::array();
        for (const Evidence& e : f.evidence) {
            evidence.push_back({{"t", sig6(e.t)}, {"node", e.node}, {"metric", sig6(e.metric)}});
        }
        nlohmann::json thresholds = nlohmann::json::object();
        for (const auto& [name, value] : f.thresholds) thresholds[name] = sig6(value);
        out.push_back({{"pattern", f.pattern_id},
                       {"confidence", confidence_name(f.confidence)},
                       {"evidence", std::move(evidence)},
                       {"thresholds", std::move(thresholds)}});
    }
    return out;
}

void write_findings_csv(const std::vector<PatternFinding>& findings, std::ostream& out) {
    out << "pattern,confidence,t,node,metric\n";
    for (const PatternFinding& f : findings) {
        for (const Evidence& e : f.evidence) {
            out << f.pattern_id << ',' << confidence_name(f.confidence) << ','
                << format_sig6(e.t) << ',' << e.node << ',' << format_sig6(e.metric) << '\n';
        }
    }
}

nlohmann::json fit_json(const FitResult& fit) {
    return nlohmann::json{{"beta", sig6(fit.beta)}, {"rms", sig6(fit.rms)}, {"n", fit.n}};
}

nlohmann::json rates_json(const RateComparison& cmp) {
    auto vec = [](const std::vector<std::optional<double>>& xs) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& x : xs) {
            if (x) {
                out.push_back(sig6(*x));
            } else {
                out.push_back(nullptr);
            }
        }
        return out;
    };
    return nlohmann::json{{"time_to_depth_a", vec(cmp.time_to_depth_a)},
                          {"time_to_depth_b", vec(cmp.time_to_depth_b)},
                          {"ratio", vec(cmp.ratio)}};
}

nlohmann::json topic_json(const TopicNetwork& topic) {
    nlohmann::json nodes = nlohmann::json::array();
    for (NodeId v = 0; v < topic.node_count(); ++v) {
        nlohmann::json n{{"id", topic.ids[v]}, {"t", topic.timestamps[v]}};
        if (!topic.disciplines[v].empty()) n["disc"] = topic.disciplines[v];
        nodes.push_back(std::move(n));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [citer, cited] : topic.edges) {
        edges.push_back({{"citer", topic.ids[citer]}, {"cited", topic.ids[cited]}});
    }
    return nlohmann::json{{"seed_id", topic.seed_id},
                          {"as_of", topic.as_of},
                          {"nodes", std::move(nodes)},
                          {"edges", std::move(edges)}};
}

nlohmann::json ingest_report_json(const IngestReport& report) {
    nlohmann::json errors = nlohmann::json::array();
    for (const RowError& e : report.row_errors) {
        errors.push_back({{"line", e.line}, {"message", e.message}});
    }
    return nlohmann::json{{"rows_in", report.rows_in},
                          {"rows_kept", report.rows_kept()},
                          {"rows_dropped", report.rows_dropped()},
                          {"papers_kept", report.papers_kept},
                          {"edges_kept", report.edges_kept},
                          {"embeddings_kept", report.embeddings_kept},
                          {"dropped_malformed", report.dropped_malformed},
                          {"dropped_duplicate_papers", report.dropped_duplicate_papers},
                          {"dropped_self_loops", report.dropped_self_loops},
                          {"dropped_duplicate_edges", report.dropped_duplicate_edges},
                          {"dropped_unknown_endpoint", report.dropped_unknown_endpoint},
                          {"dropped_time_slack", report.dropped_time_slack},
                          {"dropped_embeddings", report.dropped_embeddings},
                          {"row_errors", std::move(errors)}};
}

}  // namespace topicxray
