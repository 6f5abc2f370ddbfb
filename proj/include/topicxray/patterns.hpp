#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topicxray/entropy.hpp"
#include "topicxray/ilf.hpp"

namespace topicxray {

struct Evidence {
    double t = 0.0;
    std::string node;
    double metric = 0.0;
};

enum class Confidence { kNotMet, kRuleMet, kPartial };

const char* confidence_name(Confidence c);

// One detector outcome. Thresholds that shaped the decision are carried along
// so findings can be audited without re-running the pipeline.
struct PatternFinding {
    std::string pattern_id;
    Confidence confidence = Confidence::kNotMet;
    std::vector<Evidence> evidence;
    std::vector<std::pair<std::string, double>> thresholds;

    bool rule_met() const { return confidence == Confidence::kRuleMet; }
};

struct PatternParams {
    double flatten_eps = 0.01;        // relative KE slope per year counted as flat
    double stagnation_window = 3.0;   // years of flat visible depth (P4)
    double inhibition_window = 2.0;   // years after a crossover to observe flattening (P5)
    double p1_growth_factor = 5.0;    // scale growth with depth stuck at one
};

// A visible-depth increase event with the nodes whose appearance at the newly
// visible level explains it. Simultaneous multi-node crossings are ties.
struct DriverAttribution {
    double t = 0.0;
    int level = 0;
    std::vector<std::string> nodes;
    bool tie = false;
};

// P1: topic pioneered by summative work - scale keeps growing while the
// visible depth never exceeds one.
PatternFinding detect_p1_summative(const SeriesAnalysis& analysis, const PatternParams& p = {});

// P2: attribution of every visible-depth increase to its driver nodes.
std::vector<DriverAttribution> detect_p2_driver(const SeriesAnalysis& analysis);

// P3: influence relay - drivers at strictly increasing levels where the
// earlier driver's KE growth flattens before the later driver appears.
PatternFinding detect_p3_relay(const SeriesAnalysis& analysis, const PatternParams& p = {});

// P4: an overpowered child - KE overtakes every level-1 rival while the
// topic's visible depth stagnates afterwards.
PatternFinding detect_p4_overpowered(const SeriesAnalysis& analysis, const PatternParams& p = {});

// P5: branch inhibition - a sibling KE crossover followed by flattening of
// the overtaken branch within the window.
PatternFinding detect_p5_branch_inhibition(const SeriesAnalysis& analysis,
                                           const PatternParams& p = {});

// P6: a driver whose discipline tag differs from the seed's.
PatternFinding detect_p6_interdisciplinary(const SeriesAnalysis& analysis,
                                           const PatternParams& p = {});

// P7: relative pace of two topics, as time-to-depth-k vectors and ratios.
struct RateComparison {
    std::vector<std::optional<double>> time_to_depth_a;  // index k-1 = depth k
    std::vector<std::optional<double>> time_to_depth_b;
    std::vector<std::optional<double>> ratio;            // a / b where defined
};

RateComparison compare_p7_rates(const DepthSeries& a, const DepthSeries& b);

std::vector<PatternFinding> detect_all(const SeriesAnalysis& analysis, const PatternParams& p = {});

}  // namespace topicxray
