#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicxray/corpus.hpp"
#include "topicxray/ilf.hpp"

namespace topicxray {

// Scenario library mirroring the evolution patterns, so each detector and
// regime has positive and negative fixtures with known ground truth.
enum class Scenario { kStar, kRelay, kOverpowered, kCrossover, kFlat };

Scenario parse_scenario(const std::string& name);
const char* scenario_name(Scenario s);

struct NoiseSpec {
    double extra_citation_rate = 0.0;  // expected non-tree citations per node
    double diff_sigma = 0.0;           // embedding perturbation scale
};

struct GeneratorSpec {
    std::uint64_t rng_seed = 1;
    Scenario scenario = Scenario::kStar;
    int n_nodes = 150;             // corpus size budget (scenarios may round up)
    double birth_rate = 15.0;      // background nodes per year
    int relay_stages = 3;          // relay only
    int stage_size = 14;           // children per stage / branch
    int final_burst = 0;           // relay: extra children for the last stage,
                                   // compressed into the final year
    double post_quiet_years = 0.0;  // background-only coda after the last event
    bool crossover_parallel = false;  // crossover: equal growth, no takeover
    std::string driver_discipline;    // tag for focal nodes ("" = seed's)
    NoiseSpec noise;
    double seed_year = 2000.0;
    int embed_dim = 16;
};

// Everything the generator knows that analysis must rediscover.
// Schedule values come from simulating knowledge entropy directly on the
// planted tree, never through the extraction pipeline.
struct GroundTruth {
    std::unordered_map<std::string, std::string> parent;  // planted idea tree
    std::vector<std::string> focal_nodes;                 // planted drivers / branch roots
    std::unordered_map<std::string, double> first_visible;
    std::map<int, double> layer_schedule;  // level -> first visible snapshot
    std::unordered_map<std::string, std::string> planted_regime;
    std::vector<std::string> high_value_nodes;  // calibration positives
    int planted_stl = 0;
    double ke_threshold = 0.1;  // M used for the simulated schedule
    double step = 1.0;
};

struct SynthResult {
    Corpus corpus;
    std::shared_ptr<EmbeddingTable> embeddings;
    GroundTruth truth;
    GeneratorSpec spec;
};

// Deterministic: the same spec yields a byte-identical corpus. The emitted
// corpus passes ingest sanitization with zero drops, and with zero noise the
// planted parent strictly wins the extraction comparator for every node.
SynthResult generate(const GeneratorSpec& spec);

// Samples satisfying delta_d = log10(ke) - beta*log10(dt), with multiplicative
// KE noise folded into delta_d when noise_sigma > 0.
std::vector<IlfSample> generate_ilf_samples(double beta, std::size_t n, double noise_sigma,
                                            std::uint64_t rng_seed = 1);

void write_ground_truth(const GroundTruth& truth, std::ostream& out);

}  // namespace topicxray
