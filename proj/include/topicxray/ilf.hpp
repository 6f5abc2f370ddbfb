#pragma once

#include <span>
#include <string>
#include <vector>

#include "topicxray/entropy.hpp"

namespace topicxray {

// Idea Limit Formula parameters:
//   delta_d = log_base( ke / max(t - t0, min_dt)^beta )
// The elapsed-time clamp keeps the bound finite right after a node turns
// visible; both the exponent and the base are fitted/configurable fields.
struct IlfModel {
    double beta = 1.8803;
    double log_base = 10.0;
    double min_dt = 1.0;  // years
};

// Depth a visible node can still stimulate after elapsed time t - t0.
// Requires ke > 0 and t > t0.
double delta_d(double ke, double t, double t0, const IlfModel& model = {});

struct UpperBound {
    double t0 = 0.0;
    double ke_now = 0.0;
    double delta_d_now = 0.0;
    double delta_d_upper = 0.0;
};

// Upper bound of delta_d for a node's KE history: current KE evaluated at the
// most favorable admissible elapsed time (clamped at min_dt when t_now - t0
// falls short of it). Throws if the node never turned visible.
UpperBound delta_d_upper(const NodeTrack& track, double t_now, const IlfModel& model);

struct IlfSample {
    double delta_d = 0.0;
    double ke = 0.0;
    double dt = 0.0;
};

struct FitResult {
    double beta = 0.0;
    double rms = 0.0;
    std::size_t n = 0;
};

// Least-squares fit of beta in delta_d = log10(ke) - beta * log10(dt).
// Requires >= 3 samples, positive ke and dt, and at least two distinct dt.
FitResult fit_exponent(std::span<const IlfSample> samples);

enum class Regime { kTooSmallKe, kDecayedStagnant, kHighPotential, kOverpowered };

const char* regime_name(Regime r);

struct NodePotential {
    std::string node;
    int level = 0;
    double ke = 0.0;
    double t0 = 0.0;
    double delta_d_now = 0.0;
    double delta_d_upper = 0.0;
    double peak_upper = 0.0;           // max delta_d_upper over the history
    bool attributed_increase = false;  // lit a new layer through its subtree
    Regime regime = Regime::kTooSmallKe;
};

struct PotentialReport {
    double t_now = 0.0;
    double ke_threshold = 0.0;
    IlfModel model;
    double stagnation_window = 3.0;
    std::vector<NodePotential> items;  // every ever-visible node, exactly one regime each
};

// Deterministic regime cascade over all ever-visible nodes, evaluated at the
// final snapshot:
//   1. overpowered: KE >= every level-1 KE and the topic's visible depth has
//      been flat for >= stagnation_window years since the overtake;
//   2. high-potential: delta_d_upper > 1 now;
//   3. decayed-stagnant: delta_d_upper reached 1 at some point but is below
//      it now;
//   4. too-small-KE: everything else.
PotentialReport classify_regimes(const SeriesAnalysis& analysis, const IlfModel& model,
                                 double stagnation_window = 3.0);

// Distinct new visible levels inside v's subtree first lit strictly after
// v's own visibility time, attributed via the ancestor chain at that snapshot.
int depth_contribution(const SeriesAnalysis& analysis, const std::string& node_id);

}  // namespace topicxray
