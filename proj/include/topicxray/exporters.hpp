#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "topicxray/entropy.hpp"
#include "topicxray/ideatree.hpp"
#include "topicxray/ilf.hpp"
#include "topicxray/patterns.hpp"

namespace topicxray {

// All numeric output is printed with 6 significant digits.
double sig6(double v);
std::string format_sig6(double v);

// DOT: edges run parent -> child (direction of knowledge flow), node labels
// are paper ids, tooltips carry depth and KE when available.
void write_tree_dot(const IdeaTree& tree, const TopicNetwork& topic,
                    const std::vector<double>* ke, std::ostream& out);

// `{root, parents: {...}, depths: {...}}`
nlohmann::json tree_json(const IdeaTree& tree, const TopicNetwork& topic);

nlohmann::json loopcut_json(const LoopCutReport& report);

// CSV `t,node_id,ke,level,visible`, sorted by (t, node_id).
void write_ledger_csv(const SeriesAnalysis& analysis, std::ostream& out);

// CSV `t,vd,max_visible_level`.
void write_depth_csv(const DepthSeries& series, std::ostream& out);

nlohmann::json depth_json(const DepthSeries& series);
nlohmann::json potential_json(const PotentialReport& report);
nlohmann::json findings_json(const std::vector<PatternFinding>& findings);
void write_findings_csv(const std::vector<PatternFinding>& findings, std::ostream& out);
nlohmann::json fit_json(const FitResult& fit);
nlohmann::json rates_json(const RateComparison& cmp);
nlohmann::json topic_json(const TopicNetwork& topic);
nlohmann::json ingest_report_json(const IngestReport& report);

}  // namespace topicxray
