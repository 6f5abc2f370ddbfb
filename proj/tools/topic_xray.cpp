// topic-xray: reconstructs the evolution of scientific topics from citation
// data. Subcommands are thin shells over the library; pipelines compose via
// files (or stdin/stdout) only, and every output directory carries a run.json
// with the exact configuration that produced it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "topicxray/corpus.hpp"
#include "topicxray/exporters.hpp"
#include "topicxray/ideatree.hpp"
#include "topicxray/ilf.hpp"
#include "topicxray/kernels.hpp"
#include "topicxray/patterns.hpp"
#include "topicxray/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topicxray;

namespace {

struct Options {
    std::string in = "-";
    std::string out;
    std::string seed_id;            // empty: most-cited paper in the corpus
    std::string provider = "auto";  // auto | jaccard | embeddings[:PATH]
    std::string format;             // json | csv | dot (command-specific default)
    std::string kernel = "auto";    // auto | scalar | avx2
    int min_seed_citations = 0;     // CLI default: gate off (desk-scale corpora)
    double ke_threshold = kDefaultKeThreshold;
    double step = 1.0;
    double beta = 1.8803;
    double log_base = 10.0;
    double min_dt = 1.0;
    double slack = 1.0;
    double flatten_eps = 0.01;
    double stagnation_window = 3.0;
    double inhibition_window = 2.0;
    double growth_factor = 5.0;
    std::string compare;  // patterns: second corpus for P7

    // synth
    std::string scenario = "star";
    std::uint64_t rng_seed = 1;
    int n_nodes = 150;
    double birth_rate = 15.0;
    int stages = 3;
    int stage_size = 14;
    int final_burst = 0;
    double quiet_years = 0.0;
    bool parallel = false;
    std::string driver_disc;
    double extra_rate = 0.0;
    double diff_sigma = 0.0;
    std::size_t ilf_samples = 0;
    double noise = 0.0;
};

void add_common_flags(CLI::App* cmd, Options& opt, bool with_analysis) {
    cmd->add_option("--in", opt.in, "input path ('-' = stdin)");
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_option("--kernel", opt.kernel, "similarity kernel isa: auto|scalar|avx2");
    if (with_analysis) {
        cmd->add_option("--seed-id", opt.seed_id, "seed paper id (default: most-cited)");
        cmd->add_option("--provider", opt.provider,
                        "similarity provider: auto|jaccard|embeddings:PATH");
        cmd->add_option("--min-seed-citations", opt.min_seed_citations,
                        "seed citation gate (0 disables)");
        cmd->add_option("--ke-threshold", opt.ke_threshold, "visibility threshold M");
        cmd->add_option("--step", opt.step, "snapshot step in years");
        cmd->add_option("--slack", opt.slack, "citation time slack in years");
    }
}

void add_ilf_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--beta", opt.beta, "ILF exponent");
    cmd->add_option("--log-base", opt.log_base, "ILF log base");
    cmd->add_option("--min-dt", opt.min_dt, "minimum elapsed time in years");
}

json options_json(const std::string& command, const Options& opt) {
    return json{{"command", command},
                {"in", opt.in},
                {"out", opt.out},
                {"seed_id", opt.seed_id},
                {"provider", opt.provider},
                {"format", opt.format},
                {"kernel", opt.kernel},
                {"min_seed_citations", opt.min_seed_citations},
                {"ke_threshold", opt.ke_threshold},
                {"step", opt.step},
                {"beta", opt.beta},
                {"log_base", opt.log_base},
                {"min_dt", opt.min_dt},
                {"slack", opt.slack},
                {"flatten_eps", opt.flatten_eps},
                {"stagnation_window", opt.stagnation_window},
                {"inhibition_window", opt.inhibition_window},
                {"growth_factor", opt.growth_factor},
                {"compare", opt.compare},
                {"scenario", opt.scenario},
                {"rng_seed", opt.rng_seed},
                {"n_nodes", opt.n_nodes},
                {"birth_rate", opt.birth_rate},
                {"stages", opt.stages},
                {"stage_size", opt.stage_size},
                {"final_burst", opt.final_burst},
                {"quiet_years", opt.quiet_years},
                {"parallel", opt.parallel},
                {"driver_disc", opt.driver_disc},
                {"extra_rate", opt.extra_rate},
                {"diff_sigma", opt.diff_sigma},
                {"ilf_samples", opt.ilf_samples},
                {"noise", opt.noise}};
}

fs::path ensure_out_dir(const Options& opt, const std::string& command) {
    const fs::path dir(opt.out);
    fs::create_directories(dir);
    std::ofstream run(dir / "run.json");
    run << options_json(command, opt).dump(2) << '\n';
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

Corpus load_corpus(const Options& opt) {
    const bool csv = opt.format == "csv" ||
                     (opt.format.empty() && opt.in.size() > 4 &&
                      opt.in.substr(opt.in.size() - 4) == ".csv");
    const CorpusFormat format = csv ? CorpusFormat::kCsv : CorpusFormat::kJsonl;
    IngestOptions ingest_opts;
    ingest_opts.citation_slack_years = opt.slack;
    if (opt.in == "-") return ingest_corpus(std::cin, format, ingest_opts);
    return ingest_corpus_file(opt.in, format, ingest_opts);
}

std::string auto_seed(const Corpus& corpus) {
    if (corpus.papers.empty()) throw Error("empty corpus: no seed candidate");
    std::size_t best_count = 0;
    std::string best_id;
    for (const PaperRecord& p : corpus.papers) {
        const std::size_t count = corpus.citers_of[corpus.index.at(p.id)].size();
        if (count > best_count || (count == best_count && (best_id.empty() || p.id < best_id))) {
            best_count = count;
            best_id = p.id;
        }
    }
    return best_id;
}

struct ProviderHandle {
    std::shared_ptr<const EmbeddingTable> table;  // keeps embeddings alive
    std::unique_ptr<SimilarityProvider> provider;
};

ProviderHandle resolve_provider(const Options& opt, const Corpus& corpus) {
    ProviderHandle handle;
    if (opt.provider == "jaccard") {
        handle.provider = std::make_unique<JaccardProvider>();
        return handle;
    }
    if (opt.provider.rfind("embeddings:", 0) == 0) {
        const std::string path = opt.provider.substr(11);
        handle.table = std::make_shared<EmbeddingTable>(load_embeddings(path));
        handle.provider = std::make_unique<EmbeddingProvider>(handle.table, path);
        return handle;
    }
    if (opt.provider == "embeddings" || opt.provider == "auto") {
        if (corpus.embeddings) {
            handle.table = std::make_shared<EmbeddingTable>(*corpus.embeddings);
            handle.provider = std::make_unique<EmbeddingProvider>(handle.table, "inline");
            return handle;
        }
        if (opt.provider == "embeddings") {
            throw Error("--provider embeddings requires inline embedding rows or a :PATH");
        }
        handle.provider = std::make_unique<JaccardProvider>();
        return handle;
    }
    throw Error("unknown provider '" + opt.provider + "' (jaccard|embeddings[:PATH])");
}

struct Analysis {
    Corpus corpus;
    TopicNetwork topic;
    ProviderHandle provider;
    SeriesAnalysis series;
};

Analysis run_analysis(const Options& opt) {
    Analysis a;
    a.corpus = load_corpus(opt);
    if (a.corpus.papers.empty()) throw Error("empty corpus");
    const std::string seed = opt.seed_id.empty() ? auto_seed(a.corpus) : opt.seed_id;
    a.topic = build_topic(a.corpus, seed, opt.min_seed_citations);
    a.provider = resolve_provider(opt, a.corpus);
    a.series = analyze_series(a.topic, *a.provider.provider, {}, opt.ke_threshold, opt.step);
    return a;
}

PatternParams pattern_params(const Options& opt) {
    PatternParams p;
    p.flatten_eps = opt.flatten_eps;
    p.stagnation_window = opt.stagnation_window;
    p.inhibition_window = opt.inhibition_window;
    p.p1_growth_factor = opt.growth_factor;
    return p;
}

IlfModel ilf_model(const Options& opt) {
    IlfModel model;
    model.beta = opt.beta;
    model.log_base = opt.log_base;
    model.min_dt = opt.min_dt;
    return model;
}

// ---- commands -----------------------------------------------------------

int cmd_ingest(const Options& opt) {
    const Corpus corpus = load_corpus(opt);
    std::ostringstream body;
    write_corpus_jsonl(corpus, body);
    const json report = ingest_report_json(corpus.report);
    if (opt.out.empty()) {
        std::cout << body.str();
        std::cerr << report.dump() << '\n';
    } else {
        const fs::path dir = ensure_out_dir(opt, "ingest");
        write_text(dir / "corpus.jsonl", body.str());
        write_text(dir / "report.json", report.dump(2) + "\n");
        std::cout << report.dump() << '\n';
    }
    return 0;
}

int cmd_topic(const Options& opt) {
    const Corpus corpus = load_corpus(opt);
    const std::string seed = opt.seed_id.empty() ? auto_seed(corpus) : opt.seed_id;
    const TopicNetwork topic = build_topic(corpus, seed, opt.min_seed_citations);
    const json j = topic_json(topic);
    if (opt.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        const fs::path dir = ensure_out_dir(opt, "topic");
        write_text(dir / "topic.json", j.dump(2) + "\n");
        std::cout << "topic " << seed << ": " << topic.node_count() << " nodes, "
                  << topic.edge_count() << " edges\n";
    }
    return 0;
}

int cmd_tree(const Options& opt) {
    const Corpus corpus = load_corpus(opt);
    if (corpus.papers.empty()) throw Error("empty corpus");
    const std::string seed = opt.seed_id.empty() ? auto_seed(corpus) : opt.seed_id;
    const TopicNetwork topic = build_topic(corpus, seed, opt.min_seed_citations);
    const ProviderHandle provider = resolve_provider(opt, corpus);
    const IdeaTree tree = extract(topic, *provider.provider, opt.slack);
    const auto ke = knowledge_entropy_all(tree, topic);

    std::ostringstream dot;
    write_tree_dot(tree, topic, &ke, dot);
    const json tree_j = tree_json(tree, topic);
    const bool want_dot = opt.format == "dot";
    if (opt.out.empty()) {
        if (want_dot) {
            std::cout << dot.str();
        } else {
            std::cout << tree_j.dump(2) << '\n';
        }
    } else {
        const fs::path dir = ensure_out_dir(opt, "tree");
        write_text(dir / "tree.json", tree_j.dump(2) + "\n");
        write_text(dir / "tree.dot", dot.str());
        write_text(dir / "loopcut.json", loopcut_json(tree.loopcut).dump(2) + "\n");
        const TreeStats stats = tree_stats(tree);
        std::cout << "idea tree: " << topic.node_count() << " nodes, max depth "
                  << stats.max_depth << ", " << tree.loopcut.removed_edges.size()
                  << " loop edges removed\n";
    }
    return 0;
}

int cmd_entropy(const Options& opt) {
    const Analysis a = run_analysis(opt);
    std::ostringstream csv;
    write_ledger_csv(a.series, csv);
    if (opt.out.empty()) {
        std::cout << csv.str();
    } else {
        const fs::path dir = ensure_out_dir(opt, "entropy");
        write_text(dir / "ledger.csv", csv.str());
        std::cout << "ledger: " << a.series.snaps.size() << " snapshots, stl "
                  << a.series.stl << '\n';
    }
    return 0;
}

int cmd_depth(const Options& opt) {
    const Analysis a = run_analysis(opt);
    const DepthSeries series = depth_series_of(a.series);
    const json j = depth_json(series);
    std::ostringstream csv;
    write_depth_csv(series, csv);
    if (!opt.out.empty()) {
        const fs::path dir = ensure_out_dir(opt, "depth");
        write_text(dir / "depth.csv", csv.str());
        write_text(dir / "depth.json", j.dump(2) + "\n");
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_ilf_fit(const Options& opt) {
    std::vector<IlfSample> samples;
    auto parse_stream = [&](std::istream& in) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                const json row = json::parse(line);
                samples.push_back({row.at("delta_d").get<double>(), row.at("ke").get<double>(),
                                   row.at("dt").get<double>()});
            } catch (const json::exception& e) {
                std::ostringstream os;
                os << "samples line " << lineno << ": " << e.what();
                throw Error(os.str());
            }
        }
    };
    if (opt.in == "-") {
        parse_stream(std::cin);
    } else {
        std::ifstream in(opt.in);
        if (!in) throw Error("cannot open input file '" + opt.in + "'");
        parse_stream(in);
    }
    const FitResult fit = fit_exponent(samples);
    const json j = fit_json(fit);
    if (!opt.out.empty()) {
        const fs::path dir = ensure_out_dir(opt, "ilf-fit");
        write_text(dir / "fit.json", j.dump(2) + "\n");
    }
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_screen(const Options& opt) {
    const Analysis a = run_analysis(opt);
    const PotentialReport report =
        classify_regimes(a.series, ilf_model(opt), opt.stagnation_window);
    const json j = potential_json(report);
    if (!opt.out.empty()) {
        const fs::path dir = ensure_out_dir(opt, "screen");
        write_text(dir / "screen.json", j.dump(2) + "\n");
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_patterns(const Options& opt) {
    const Analysis a = run_analysis(opt);
    const auto findings = detect_all(a.series, pattern_params(opt));
    json j = findings_json(findings);

    if (!opt.compare.empty()) {
        Options other = opt;
        other.in = opt.compare;
        other.seed_id.clear();
        const Analysis b = run_analysis(other);
        j = json{{"findings", std::move(j)},
                 {"p7_rates", rates_json(compare_p7_rates(depth_series_of(a.series),
                                                          depth_series_of(b.series)))}};
    }
    std::ostringstream csv;
    write_findings_csv(findings, csv);
    if (!opt.out.empty()) {
        const fs::path dir = ensure_out_dir(opt, "patterns");
        write_text(dir / "findings.json", j.dump(2) + "\n");
        write_text(dir / "evidence.csv", csv.str());
    }
    if (opt.format == "csv") {
        std::cout << csv.str();
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_synth(const Options& opt) {
    if (opt.ilf_samples > 0) {
        const auto samples =
            generate_ilf_samples(opt.beta, opt.ilf_samples, opt.noise, opt.rng_seed);
        std::ostringstream body;
        for (const IlfSample& s : samples) {
            body << json{{"delta_d", s.delta_d}, {"ke", s.ke}, {"dt", s.dt}}.dump() << '\n';
        }
        if (opt.out.empty()) {
            std::cout << body.str();
        } else {
            const fs::path dir = ensure_out_dir(opt, "synth");
            write_text(dir / "ilf_samples.jsonl", body.str());
        }
        return 0;
    }

    GeneratorSpec spec;
    spec.rng_seed = opt.rng_seed;
    spec.scenario = parse_scenario(opt.scenario);
    spec.n_nodes = opt.n_nodes;
    spec.birth_rate = opt.birth_rate;
    spec.relay_stages = opt.stages;
    spec.stage_size = opt.stage_size;
    spec.final_burst = opt.final_burst;
    spec.post_quiet_years = opt.quiet_years;
    spec.crossover_parallel = opt.parallel;
    spec.driver_discipline = opt.driver_disc;
    spec.noise.extra_citation_rate = opt.extra_rate;
    spec.noise.diff_sigma = opt.diff_sigma;
    const SynthResult synth = generate(spec);

    std::ostringstream corpus_body;
    write_corpus_jsonl(synth.corpus, corpus_body);
    if (opt.out.empty()) {
        std::cout << corpus_body.str();
    } else {
        const fs::path dir = ensure_out_dir(opt, "synth");
        write_text(dir / "corpus.jsonl", corpus_body.str());
        std::ostringstream embeddings;
        save_embeddings(*synth.embeddings, embeddings);
        write_text(dir / "embeddings.tsv", embeddings.str());
        std::ostringstream truth;
        write_ground_truth(synth.truth, truth);
        write_text(dir / "groundtruth.json", truth.str());
        std::cout << "synth " << scenario_name(spec.scenario) << ": " << synth.corpus.size()
                  << " papers, planted stl " << synth.truth.planted_stl << '\n';
    }
    return 0;
}

int cmd_export(const Options& opt) {
    // Converts a stored tree.json into DOT (or re-emits normalized JSON).
    json stored;
    if (opt.in == "-") {
        std::cin >> stored;
    } else {
        std::ifstream in(opt.in);
        if (!in) throw Error("cannot open input file '" + opt.in + "'");
        in >> stored;
    }
    if (!stored.contains("root") || !stored.contains("parents") || !stored.contains("depths")) {
        throw Error("input is not a stored idea tree (expected root/parents/depths)");
    }
    const auto& parents = stored.at("parents");
    const auto& depths = stored.at("depths");
    std::ostringstream dot;
    dot << "digraph ideatree {\n  rankdir=TB;\n  node [shape=box];\n";
    for (const auto& [id, depth] : depths.items()) {
        dot << "  \"" << id << "\" [tooltip=\"depth=" << depth.get<int>() << "\"];\n";
    }
    for (const auto& [child, parent] : parents.items()) {
        dot << "  \"" << parent.get<std::string>() << "\" -> \"" << child << "\";\n";
    }
    dot << "}\n";

    const bool want_json = opt.format == "json";
    const std::string body = want_json ? stored.dump(2) + "\n" : dot.str();
    if (opt.out.empty()) {
        std::cout << body;
    } else {
        const fs::path dir = ensure_out_dir(opt, "export");
        write_text(dir / (want_json ? "tree.json" : "tree.dot"), body);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topic x-ray: idea trees, knowledge entropy, and topic limits "
                 "from citation data"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* ingest = app.add_subcommand("ingest", "sanitize and index a corpus");
    add_common_flags(ingest, opt, false);
    ingest->add_option("--format", opt.format, "input format: jsonl|csv");
    ingest->add_option("--slack", opt.slack, "citation time slack in years");

    CLI::App* topic = app.add_subcommand("topic", "assemble a seed-rooted topic network");
    add_common_flags(topic, opt, true);

    CLI::App* tree = app.add_subcommand("tree", "extract the idea tree");
    add_common_flags(tree, opt, true);
    tree->add_option("--format", opt.format, "output format: json|dot");

    CLI::App* entropy = app.add_subcommand("entropy", "knowledge-entropy ledger over snapshots");
    add_common_flags(entropy, opt, true);

    CLI::App* depth = app.add_subcommand("depth", "visible-depth series and topic limit");
    add_common_flags(depth, opt, true);

    CLI::App* fit = app.add_subcommand("ilf-fit", "fit the ILF exponent from samples");
    add_common_flags(fit, opt, false);

    CLI::App* screen = app.add_subcommand("screen", "classify development regimes per node");
    add_common_flags(screen, opt, true);
    add_ilf_flags(screen, opt);
    screen->add_option("--stagnation-window", opt.stagnation_window, "years of flat depth");

    CLI::App* patterns = app.add_subcommand("patterns", "run the evolution-pattern detectors");
    add_common_flags(patterns, opt, true);
    patterns->add_option("--format", opt.format, "output format: json|csv");
    patterns->add_option("--compare", opt.compare, "second corpus for rate comparison (P7)");
    patterns->add_option("--flatten-eps", opt.flatten_eps, "relative KE slope counted as flat");
    patterns->add_option("--stagnation-window", opt.stagnation_window, "years of flat depth");
    patterns->add_option("--inhibition-window", opt.inhibition_window,
                         "years to observe post-crossover flattening");
    patterns->add_option("--growth-factor", opt.growth_factor, "P1 scale growth threshold");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
    synth->add_option("--out", opt.out, "output directory");
    synth->add_option("--scenario", opt.scenario, "star|relay|overpowered|crossover|flat");
    synth->add_option("--seed", opt.rng_seed, "generator rng seed");
    synth->add_option("--n", opt.n_nodes, "corpus size budget");
    synth->add_option("--birth-rate", opt.birth_rate, "background nodes per year");
    synth->add_option("--stages", opt.stages, "relay stages");
    synth->add_option("--stage-size", opt.stage_size, "children per stage");
    synth->add_option("--final-burst", opt.final_burst, "last-stage burst size");
    synth->add_option("--quiet-years", opt.quiet_years, "background-only coda years");
    synth->add_flag("--parallel", opt.parallel, "crossover: equal parallel growth");
    synth->add_option("--driver-disc", opt.driver_disc, "discipline tag for focal nodes");
    synth->add_option("--extra-rate", opt.extra_rate, "extra citations per node");
    synth->add_option("--diff-sigma", opt.diff_sigma, "embedding noise scale");
    synth->add_option("--ilf-samples", opt.ilf_samples, "emit N ILF samples instead");
    synth->add_option("--beta", opt.beta, "exponent for --ilf-samples");
    synth->add_option("--noise", opt.noise, "multiplicative ke noise for --ilf-samples");

    CLI::App* exp = app.add_subcommand("export", "convert a stored tree.json (dot|json)");
    add_common_flags(exp, opt, false);
    exp->add_option("--format", opt.format, "output format: dot|json");

    CLI11_PARSE(app, argc, argv);

    try {
        kernels::force(kernels::parse_isa(opt.kernel));
        if (ingest->parsed()) return cmd_ingest(opt);
        if (topic->parsed()) return cmd_topic(opt);
        if (tree->parsed()) return cmd_tree(opt);
        if (entropy->parsed()) return cmd_entropy(opt);
        if (depth->parsed()) return cmd_depth(opt);
        if (fit->parsed()) return cmd_ilf_fit(opt);
        if (screen->parsed()) return cmd_screen(opt);
        if (patterns->parsed()) return cmd_patterns(opt);
        if (synth->parsed()) return cmd_synth(opt);
        if (exp->parsed()) return cmd_export(opt);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
