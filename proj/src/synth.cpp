#include "topicxray/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace topicxray {

namespace {

// mt19937_64 is specified bit-exactly by the standard; the mappings below
// avoid std::uniform_* distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0, v = 0.0, s = 0.0;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    int poisson_like(double rate) {
        int k = static_cast<int>(rate);
        if (uniform() < rate - static_cast<double>(k)) ++k;
        return k;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

struct PlannedNode {
    double t = 0.0;
    int parent = -1;  // index into the plan; -1 for the seed
    std::string disc;
    bool focal = false;
};

struct Plan {
    std::vector<PlannedNode> nodes;  // strictly increasing t; [0] is the seed
    std::vector<int> focal;
};

std::string node_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%05u", static_cast<unsigned>(index % 100000));
    return buf;
}

// Background prelude: enough level-1 leaves inside the first year that
// h1 = log2(N)/N stays below the visibility threshold afterwards, keeping
// plain leaves out of the visible-layer bookkeeping.
constexpr int kPrelude = 80;

void add_children(Plan& plan, Rng& rng, int parent, int count, double from, double to,
                  const std::string& disc) {
    for (int i = 0; i < count; ++i) {
        const double lo = from + (to - from) * static_cast<double>(i) / count;
        const double hi = from + (to - from) * static_cast<double>(i + 1) / count;
        plan.nodes.push_back({rng.uniform(lo, hi), parent, disc, false});
    }
}

Plan plan_star(const GeneratorSpec& spec, Rng& rng, bool fast_start) {
    Plan plan;
    plan.nodes.push_back({spec.seed_year, -1, "cs", false});
    int remaining = std::max(spec.n_nodes - 1, fast_start ? kPrelude + 20 : 20);
    double t = spec.seed_year;
    if (fast_start) {
        add_children(plan, rng, 0, kPrelude, spec.seed_year + 0.01, spec.seed_year + 0.98, "cs");
        remaining -= kPrelude;
        t = spec.seed_year + 1.0;
    }
    const double dt = 1.0 / std::max(spec.birth_rate, 1.0);
    for (int i = 0; i < remaining; ++i) {
        t += dt * rng.uniform(0.8, 1.2);
        plan.nodes.push_back({t, 0, "cs", false});
    }
    return plan;
}

Plan plan_relay(const GeneratorSpec& spec, Rng& rng) {
    if (spec.relay_stages < 1) throw Error("relay scenario requires at least one stage");
    if (spec.relay_stages > spec.n_nodes) {
        throw Error("infeasible spec: more relay stages than nodes");
    }
    Plan plan;
    plan.nodes.push_back({spec.seed_year, -1, "cs", false});
    add_children(plan, rng, 0, kPrelude, spec.seed_year + 0.01, spec.seed_year + 0.98, "cs");

    const double gap = 2.0;
    int prev_stage = 0;  // seed
    double t_cursor = spec.seed_year + 1.0;
    for (int stage = 1; stage <= spec.relay_stages; ++stage) {
        const bool last = stage == spec.relay_stages;
        const double t_stage = spec.seed_year + 1.0 + (stage - 1) * gap;
        const int node_index = static_cast<int>(plan.nodes.size());
        const std::string disc =
            spec.driver_discipline.empty() ? "cs" : spec.driver_discipline;
        plan.nodes.push_back({t_stage + 0.02, prev_stage, disc, true});
        plan.focal.push_back(node_index);

        int children = std::max(spec.stage_size - 2 * (stage - 1), 8);
        double burst_end = t_stage + 1.5;
        if (last && spec.final_burst > 0) {
            children = spec.final_burst;
            burst_end = t_stage + 0.95;
        }
        add_children(plan, rng, node_index, children, t_stage + 0.05, burst_end, "cs");
        prev_stage = node_index;
        t_cursor = burst_end;
    }
    // Slow background trickle keeps snapshots moving through the coda.
    const double end = t_cursor + 0.5 + spec.post_quiet_years;
    for (double t = spec.seed_year + 1.2; t < end; t += rng.uniform(0.45, 0.55)) {
        plan.nodes.push_back({t, 0, "cs", false});
    }
    return plan;
}

Plan plan_overpowered(const GeneratorSpec& spec, Rng& rng) {
    Plan plan;
    plan.nodes.push_back({spec.seed_year, -1, "cs", false});
    add_children(plan, rng, 0, kPrelude, spec.seed_year + 0.01, spec.seed_year + 0.98, "cs");
    const int absorber = static_cast<int>(plan.nodes.size());
    plan.nodes.push_back({spec.seed_year + 1.05,
                          0,
                          spec.driver_discipline.empty() ? "cs" : spec.driver_discipline,
                          true});
    plan.focal.push_back(absorber);

    const int remaining = std::max(spec.n_nodes - absorber - 1, 120);
    const double span = 9.0;
    double t = spec.seed_year + 1.1;
    for (int i = 0; i < remaining; ++i) {
        t += span / remaining * rng.uniform(0.7, 1.3);
        // The absorber swallows most of the topic's growth.
        const int parent = rng.uniform() < 0.85 ? absorber : 0;
        plan.nodes.push_back({t, parent, "cs", false});
    }
    return plan;
}

Plan plan_crossover(const GeneratorSpec& spec, Rng& rng) {
    Plan plan;
    plan.nodes.push_back({spec.seed_year, -1, "cs", false});
    add_children(plan, rng, 0, kPrelude, spec.seed_year + 0.01, spec.seed_year + 0.98, "cs");
    const int branch_a = static_cast<int>(plan.nodes.size());
    plan.nodes.push_back({spec.seed_year + 1.02, 0, "cs", true});
    const int branch_b = branch_a + 1;
    plan.nodes.push_back({spec.seed_year + 1.07,
                          0,
                          spec.driver_discipline.empty() ? "cs" : spec.driver_discipline,
                          true});
    plan.focal.push_back(branch_a);
    plan.focal.push_back(branch_b);

    const int growth = std::max(spec.n_nodes - branch_b - 1, 120);
    double t = spec.seed_year + 1.1;
    if (spec.crossover_parallel) {
        // Equal alternating growth: no takeover, no flattening.
        const double span = 6.0;
        for (int i = 0; i < growth; ++i) {
            t += span / growth * rng.uniform(0.8, 1.2);
            const int parent = (i % 10 == 9) ? 0 : (i % 2 == 0 ? branch_a : branch_b);
            plan.nodes.push_back({t, parent, "cs", false});
        }
    } else {
        // Phase 1: branch A flourishes. Phase 2: B outgrows it and A stalls.
        const int phase1 = growth * 2 / 5;
        const int phase2 = growth - phase1;
        for (int i = 0; i < phase1; ++i) {
            t += 2.9 / phase1 * rng.uniform(0.8, 1.2);
            const int parent = (i % 10 == 9) ? 0 : branch_a;
            plan.nodes.push_back({t, parent, "cs", false});
        }
        t = std::max(t, spec.seed_year + 4.0);
        for (int i = 0; i < phase2; ++i) {
            t += 3.0 / phase2 * rng.uniform(0.8, 1.2);
            const int parent = (i % 10 == 9) ? 0 : branch_b;
            plan.nodes.push_back({t, parent, "cs", false});
        }
    }
    return plan;
}

Plan make_plan(const GeneratorSpec& spec, Rng& rng) {
    switch (spec.scenario) {
        case Scenario::kStar:
            return plan_star(spec, rng, /*fast_start=*/false);
        case Scenario::kFlat:
            return plan_star(spec, rng, /*fast_start=*/true);
        case Scenario::kRelay:
            return plan_relay(spec, rng);
        case Scenario::kOverpowered:
            return plan_overpowered(spec, rng);
        case Scenario::kCrossover:
            return plan_crossover(spec, rng);
    }
    throw Error("unknown scenario");
}

// --- planted-truth simulation ------------------------------------------------
//
// Knowledge entropy evaluated directly on the planted tree (depths are static;
// the tree is the ground truth, not an extraction result).

struct PlantedSim {
    const Plan& plan;
    const std::vector<std::pair<int, int>>& extra_edges;  // (citer, cited)

    std::vector<std::vector<int>> children;
    std::vector<int> depth;

    PlantedSim(const Plan& p, const std::vector<std::pair<int, int>>& extras)
        : plan(p), extra_edges(extras) {
        const std::size_t n = plan.nodes.size();
        children.assign(n, {});
        depth.assign(n, 0);
        for (std::size_t i = 1; i < n; ++i) {
            children[plan.nodes[i].parent].push_back(static_cast<int>(i));
            depth[i] = depth[plan.nodes[i].parent] + 1;
        }
    }

    static double surprisal(double x) {
        return (x <= 0.0 || x >= 1.0) ? 0.0 : -x * std::log2(x);
    }

    // KE of every node among the first `active` (birth-prefix) nodes.
    std::vector<double> ke_at(std::size_t active) const {
        std::vector<double> size(active, 1.0);
        for (std::size_t i = active; i-- > 1;) {
            size[plan.nodes[i].parent] += size[i];
        }
        const double n_active = static_cast<double>(active);
        auto h_of = [&](std::size_t v) { return surprisal(size[v] / n_active); };

        std::vector<double> ke(active, 0.0);
        for (std::size_t v = 1; v < active; ++v) {
            double acc = h_of(v);
            for (const int c : children[v]) {
                if (static_cast<std::size_t>(c) < active) acc -= h_of(c);
            }
            ke[v] = acc;
        }
        // Cross-subtree couplings: planted citations to the seed or the
        // parent never couple siblings; only extra citations can.
        std::size_t edge_total = 0;
        for (std::size_t v = 1; v < active; ++v) {
            edge_total += 1;                                        // v -> seed
            if (plan.nodes[v].parent != 0) edge_total += 1;         // v -> parent
        }
        std::map<std::pair<int, int>, std::size_t> pair_counts;
        for (const auto& [citer, cited] : extra_edges) {
            if (static_cast<std::size_t>(citer) >= active) continue;
            edge_total += 1;
            int a = citer, b = cited;
            while (depth[a] > depth[b]) a = plan.nodes[a].parent;
            while (depth[b] > depth[a]) b = plan.nodes[b].parent;
            if (a == b) continue;
            while (plan.nodes[a].parent != plan.nodes[b].parent) {
                a = plan.nodes[a].parent;
                b = plan.nodes[b].parent;
            }
            if (a > b) std::swap(a, b);
            pair_counts[{a, b}]++;
        }
        for (const auto& [pair, count] : pair_counts) {
            const int p = plan.nodes[pair.first].parent;
            if (p == 0) continue;  // KE of the seed stays undefined
            ke[p] += surprisal(static_cast<double>(count) / static_cast<double>(edge_total));
        }
        for (std::size_t v = 1; v < active; ++v) ke[v] = std::abs(ke[v]);
        return ke;
    }
};

// --- embeddings ---------------------------------------------------------------

std::vector<float> to_unit(std::vector<double> v) {
    double norm2 = 0.0;
    for (const double x : v) norm2 += x * x;
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<float> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv);
    return out;
}

std::vector<double> random_unit(Rng& rng, int dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

double diff_of(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return std::clamp((1.0 - dot) / 2.0, 0.0, 1.0);
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "star") return Scenario::kStar;
    if (name == "relay") return Scenario::kRelay;
    if (name == "overpowered") return Scenario::kOverpowered;
    if (name == "crossover") return Scenario::kCrossover;
    if (name == "flat") return Scenario::kFlat;
    throw Error("unknown scenario '" + name + "'");
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::kStar:
            return "star";
        case Scenario::kRelay:
            return "relay";
        case Scenario::kOverpowered:
            return "overpowered";
        case Scenario::kCrossover:
            return "crossover";
        case Scenario::kFlat:
            return "flat";
    }
    return "?";
}

SynthResult generate(const GeneratorSpec& spec) {
    if (spec.n_nodes < 2) throw Error("infeasible spec: need at least two nodes");
    if (spec.embed_dim < 2) throw Error("infeasible spec: embedding dimension too small");
    Rng rng(spec.rng_seed);
    Plan raw = make_plan(spec, rng);

    // Reorder into birth order (stable on planner order for ties) and remap
    // parent links through the permutation. Parents are planned at earlier
    // times than their children, so the remap keeps them at lower indices.
    const std::size_t n = raw.nodes.size();
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return raw.nodes[a].t < raw.nodes[b].t; });
    std::vector<int> position(n);
    for (std::size_t k = 0; k < n; ++k) position[order[k]] = static_cast<int>(k);

    Plan plan;
    plan.nodes.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        PlannedNode node = raw.nodes[order[k]];
        if (node.parent >= 0) node.parent = position[node.parent];
        plan.nodes.push_back(std::move(node));
    }
    for (const int f : raw.focal) plan.focal.push_back(position[f]);
    std::sort(plan.focal.begin(), plan.focal.end());
    for (std::size_t i = 1; i < n; ++i) {
        if (plan.nodes[i].parent >= static_cast<int>(i)) {
            throw Error("internal generator error: parent scheduled after child");
        }
        // Births must be strictly increasing so snapshots and candidate sets
        // are unambiguous; nudge collisions apart deterministically.
        if (plan.nodes[i].t <= plan.nodes[i - 1].t) {
            plan.nodes[i].t = plan.nodes[i - 1].t + 1e-4;
        }
    }

    // Extra (non-tree) citations.
    std::vector<std::pair<int, int>> extras;
    std::set<std::pair<int, int>> used;
    if (spec.noise.extra_citation_rate > 0.0) {
        for (std::size_t v = 2; v < n; ++v) {
            const int count = rng.poisson_like(spec.noise.extra_citation_rate);
            for (int k = 0; k < count; ++k) {
                const int target = static_cast<int>(1 + rng.below(v - 1));
                if (target == plan.nodes[v].parent || target == 0) continue;
                const auto key = std::make_pair(static_cast<int>(v), target);
                if (used.insert(key).second) extras.push_back(key);
            }
        }
    }

    // Hierarchical embeddings: each node drifts a small step away from its
    // planted parent, so the parent is strictly the nearest cited candidate.
    const double kStep = 0.4;
    std::vector<std::vector<float>> emb(n);
    emb[0] = to_unit(random_unit(rng, spec.embed_dim));
    std::vector<std::vector<int>> extra_of(n);
    for (const auto& [citer, cited] : extras) extra_of[citer].push_back(cited);

    for (std::size_t v = 1; v < n; ++v) {
        const int parent = plan.nodes[v].parent;
        for (int attempt = 0;; ++attempt) {
            std::vector<double> work(spec.embed_dim);
            const auto dir = random_unit(rng, spec.embed_dim);
            for (int d = 0; d < spec.embed_dim; ++d) {
                work[d] = static_cast<double>(emb[parent][d]) + kStep * dir[d];
            }
            emb[v] = to_unit(std::move(work));
            // The planted parent must win the comparator with margin among
            // every cited candidate (seed, parent, extras).
            const double d_parent = diff_of(emb[v], emb[parent]);
            double d_rival = 2.0;
            if (parent != 0) d_rival = std::min(d_rival, diff_of(emb[v], emb[0]));
            for (const int ex : extra_of[v]) {
                d_rival = std::min(d_rival, diff_of(emb[v], emb[ex]));
            }
            if (d_parent + 1e-4 < d_rival) break;
            if (attempt >= 60) {
                // A crowding extra citation; drop the offenders instead.
                extra_of[v].clear();
                std::erase_if(extras, [&](const auto& e) {
                    return e.first == static_cast<int>(v);
                });
            }
            if (attempt >= 80) {
                throw Error("generator could not separate a planted parent");
            }
        }
    }
    if (spec.noise.diff_sigma > 0.0) {
        // sigma is the total displacement scale of a vector, not per
        // component, so score perturbations stay on the order of sigma.
        const double component = spec.noise.diff_sigma / std::sqrt(spec.embed_dim);
        for (std::size_t v = 1; v < n; ++v) {
            std::vector<double> work(spec.embed_dim);
            for (int d = 0; d < spec.embed_dim; ++d) {
                work[d] = static_cast<double>(emb[v][d]) + component * rng.gaussian();
            }
            emb[v] = to_unit(std::move(work));
        }
    }

    // Assemble the corpus (already sanitized by construction).
    SynthResult result;
    result.spec = spec;
    Corpus& corpus = result.corpus;
    corpus.papers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PaperRecord rec;
        rec.id = node_id(i);
        rec.timestamp = plan.nodes[i].t;
        rec.discipline = plan.nodes[i].disc;
        corpus.index.emplace(rec.id, static_cast<NodeId>(i));
        corpus.papers.push_back(std::move(rec));
    }
    auto push_edge = [&](int citer, int cited) {
        corpus.edges.push_back({static_cast<NodeId>(citer), static_cast<NodeId>(cited),
                                plan.nodes[citer].t});
    };
    for (std::size_t v = 1; v < n; ++v) {
        push_edge(static_cast<int>(v), 0);  // topic membership: every node cites the seed
        if (plan.nodes[v].parent != 0) push_edge(static_cast<int>(v), plan.nodes[v].parent);
    }
    for (const auto& [citer, cited] : extras) push_edge(citer, cited);
    corpus.cites_of.assign(n, {});
    corpus.citers_of.assign(n, {});
    for (const EdgeRef& e : corpus.edges) {
        corpus.cites_of[e.citer].push_back(e.cited);
        corpus.citers_of[e.cited].push_back(e.citer);
    }
    for (auto& v : corpus.cites_of) std::sort(v.begin(), v.end());
    for (auto& v : corpus.citers_of) std::sort(v.begin(), v.end());
    corpus.report.rows_in = n + corpus.edges.size();
    corpus.report.paper_rows = n;
    corpus.report.papers_kept = n;
    corpus.report.edge_rows = corpus.edges.size();
    corpus.report.edges_kept = corpus.edges.size();

    auto table = std::make_shared<EmbeddingTable>();
    for (std::size_t i = 0; i < n; ++i) {
        table->insert(corpus.papers[i].id, emb[i]);
    }
    corpus.embeddings = *table;
    corpus.report.embedding_rows = n;
    corpus.report.embeddings_kept = n;
    corpus.report.rows_in += n;
    result.embeddings = std::move(table);

    // Ground truth: planted tree plus the simulated visibility schedule.
    GroundTruth& truth = result.truth;
    for (std::size_t v = 1; v < n; ++v) {
        truth.parent.emplace(corpus.papers[v].id, corpus.papers[plan.nodes[v].parent].id);
    }
    for (const int f : plan.focal) {
        truth.focal_nodes.push_back(corpus.papers[f].id);
        truth.high_value_nodes.push_back(corpus.papers[f].id);
    }
    // Scenario fixtures carry a planted regime for their focal nodes.
    if (spec.scenario == Scenario::kOverpowered && !truth.focal_nodes.empty()) {
        truth.planted_regime.emplace(truth.focal_nodes.front(), "overpowered");
    } else if (spec.scenario == Scenario::kRelay && spec.final_burst > 0) {
        truth.planted_regime.emplace(truth.focal_nodes.back(), "high-potential");
    } else if (spec.scenario == Scenario::kRelay && spec.post_quiet_years >= 4.0) {
        for (std::size_t i = 1; i < truth.focal_nodes.size(); ++i) {
            truth.planted_regime.emplace(truth.focal_nodes[i], "too-small-KE");
        }
    }

    const PlantedSim sim(plan, extras);
    const double as_of = plan.nodes.back().t;
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double t = spec.seed_year + static_cast<double>(k) * truth.step;
        if (t >= as_of - 1e-12) break;
        grid.push_back(t);
    }
    grid.push_back(as_of);
    for (const double t : grid) {
        std::size_t active = 0;
        while (active < n && plan.nodes[active].t <= t) ++active;
        if (active == 0) continue;
        const auto ke = sim.ke_at(active);
        std::vector<char> level_visible(1, 0);
        for (std::size_t v = 1; v < active; ++v) {
            if (ke[v] >= truth.ke_threshold) {
                const int level = sim.depth[v];
                if (static_cast<std::size_t>(level) >= level_visible.size()) {
                    level_visible.resize(level + 1, 0);
                }
                level_visible[level] = 1;
                const std::string& id = corpus.papers[v].id;
                if (plan.nodes[v].focal && !truth.first_visible.count(id)) {
                    truth.first_visible.emplace(id, t);
                }
                if (!truth.layer_schedule.count(level)) truth.layer_schedule.emplace(level, t);
            }
        }
        int vd = 0;
        for (std::size_t level = 1; level < level_visible.size(); ++level) {
            vd += level_visible[level] ? 1 : 0;
        }
        truth.planted_stl = std::max(truth.planted_stl, vd);
    }
    return result;
}

std::vector<IlfSample> generate_ilf_samples(double beta, std::size_t n, double noise_sigma,
                                            std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    std::vector<IlfSample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        IlfSample s;
        s.dt = std::pow(10.0, rng.uniform(0.0, 1.5));
        s.ke = std::pow(10.0, rng.uniform(-1.0, 2.0));
        double noisy_ke = s.ke;
        if (noise_sigma > 0.0) noisy_ke = s.ke * std::max(1.0 + noise_sigma * rng.gaussian(), 1e-6);
        s.delta_d = std::log10(noisy_ke) - beta * std::log10(s.dt);
        samples.push_back(s);
    }
    return samples;
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
    nlohmann::json j;
    j["parent"] = truth.parent;
    j["focal_nodes"] = truth.focal_nodes;
    j["first_visible"] = truth.first_visible;
    j["planted_regime"] = truth.planted_regime;
    j["high_value_nodes"] = truth.high_value_nodes;
    j["planted_stl"] = truth.planted_stl;
    j["ke_threshold"] = truth.ke_threshold;
    j["step"] = truth.step;
    nlohmann::json layers = nlohmann::json::object();
    for (const auto& [level, t] : truth.layer_schedule) {
        layers[std::to_string(level)] = t;
    }
    j["layer_schedule"] = layers;
    out << j.dump(2) << '\n';
}

}  // namespace topicxray
