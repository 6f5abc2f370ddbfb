#include "topicxray/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace topicxray {

using nlohmann::json;

namespace {

int wall_clock_year() {
    const auto now = std::chrono::system_clock::now();
    const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(now)};
    return static_cast<int>(ymd.year());
}

struct PendingEdge {
    std::string citer;
    std::string cited;
    std::optional<double> time;
    std::size_t line;
};

struct PendingEmbedding {
    std::string id;
    std::vector<float> vec;
    std::size_t line;
};

struct IngestState {
    Corpus corpus;
    std::vector<PendingEdge> edges;
    std::vector<PendingEmbedding> embeddings;
    double max_year = 0.0;
    IngestOptions opts;

    void reject(std::size_t line, const std::string& msg) {
        corpus.report.dropped_malformed++;
        corpus.report.row_errors.push_back({line, msg});
    }

    bool valid_timestamp(double t) const {
        return std::isfinite(t) && t >= opts.min_year && t <= max_year;
    }

    void add_paper(PaperRecord record, std::size_t line) {
        if (record.id.empty()) {
            reject(line, "paper row with empty id");
            return;
        }
        if (!valid_timestamp(record.timestamp)) {
            std::ostringstream os;
            os << "paper '" << record.id << "' timestamp " << record.timestamp
               << " outside [" << opts.min_year << ", " << max_year << "]";
            reject(line, os.str());
            return;
        }
        if (record.citation_count && *record.citation_count < 0) {
            reject(line, "paper '" + record.id + "' has negative citation count");
            return;
        }
        auto it = corpus.index.find(record.id);
        if (it != corpus.index.end()) {
            const PaperRecord& prev = corpus.papers[it->second];
            const bool identical = prev.timestamp == record.timestamp &&
                                   prev.discipline == record.discipline &&
                                   prev.citation_count == record.citation_count &&
                                   prev.title == record.title;
            if (!identical) {
                throw Error("duplicate paper id '" + record.id + "' with conflicting fields");
            }
            corpus.report.paper_rows++;
            corpus.report.dropped_duplicate_papers++;
            return;
        }
        corpus.report.paper_rows++;
        corpus.report.papers_kept++;
        corpus.index.emplace(record.id, static_cast<NodeId>(corpus.papers.size()));
        corpus.papers.push_back(std::move(record));
    }

    void add_edge(PendingEdge edge) {
        if (edge.citer.empty() || edge.cited.empty()) {
            reject(edge.line, "edge row with empty endpoint id");
            return;
        }
        if (edge.time && !std::isfinite(*edge.time)) {
            reject(edge.line, "edge row with non-finite time");
            return;
        }
        edges.push_back(std::move(edge));
    }

    void finish() {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(edges.size() * 2);
        auto& rpt = corpus.report;
        for (const PendingEdge& e : edges) {
            rpt.edge_rows++;
            if (e.citer == e.cited) {
                rpt.dropped_self_loops++;
                continue;
            }
            const auto citer = corpus.find(e.citer);
            const auto cited = corpus.find(e.cited);
            if (!citer || !cited) {
                rpt.dropped_unknown_endpoint++;
                rpt.row_errors.push_back(
                    {e.line, "edge references unknown paper '" + (!citer ? e.citer : e.cited) + "'"});
                continue;
            }
            const double eff = e.time ? *e.time : corpus.papers[*citer].timestamp;
            if (eff < corpus.papers[*cited].timestamp - opts.citation_slack_years) {
                rpt.dropped_time_slack++;
                continue;
            }
            const std::uint64_t key =
                (static_cast<std::uint64_t>(*citer) << 32) | static_cast<std::uint64_t>(*cited);
            if (!seen.insert(key).second) {
                rpt.dropped_duplicate_edges++;
                continue;
            }
            rpt.edges_kept++;
            corpus.edges.push_back({*citer, *cited, eff});
        }
        if (!embeddings.empty()) {
            EmbeddingTable table;
            for (PendingEmbedding& row : embeddings) {
                rpt.embedding_rows++;
                if (table.insert(row.id, std::move(row.vec))) {
                    rpt.embeddings_kept++;
                } else {
                    rpt.dropped_embeddings++;
                    rpt.row_errors.push_back({row.line, "embedding row for '" + row.id +
                                                            "' rejected (dimension/value check)"});
                }
            }
            corpus.embeddings = std::move(table);
        }
        corpus.cites_of.assign(corpus.papers.size(), {});
        corpus.citers_of.assign(corpus.papers.size(), {});
        for (const EdgeRef& e : corpus.edges) {
            corpus.cites_of[e.citer].push_back(e.cited);
            corpus.citers_of[e.cited].push_back(e.citer);
        }
        for (auto& v : corpus.cites_of) std::sort(v.begin(), v.end());
        for (auto& v : corpus.citers_of) std::sort(v.begin(), v.end());
    }
};

void ingest_jsonl_line(IngestState& state, const std::string& line, std::size_t lineno) {
    json row;
    try {
        row = json::parse(line);
    } catch (const json::exception& e) {
        state.reject(lineno, std::string("json parse error: ") + e.what());
        return;
    }
    try {
        if (!row.is_object() || !row.contains("kind")) {
            state.reject(lineno, "row is not an object with a 'kind' field");
            return;
        }
        const std::string kind = row.at("kind").get<std::string>();
        if (kind == "paper") {
            PaperRecord rec;
            rec.id = row.at("id").get<std::string>();
            rec.timestamp = row.at("t").get<double>();
            if (row.contains("disc") && !row["disc"].is_null())
                rec.discipline = row["disc"].get<std::string>();
            if (row.contains("cites") && !row["cites"].is_null())
                rec.citation_count = row["cites"].get<std::int64_t>();
            if (row.contains("title") && !row["title"].is_null())
                rec.title = row["title"].get<std::string>();
            state.add_paper(std::move(rec), lineno);
        } else if (kind == "edge") {
            PendingEdge edge;
            edge.citer = row.at("citer").get<std::string>();
            edge.cited = row.at("cited").get<std::string>();
            if (row.contains("t") && !row["t"].is_null()) edge.time = row["t"].get<double>();
            edge.line = lineno;
            state.add_edge(std::move(edge));
        } else if (kind == "embedding") {
            PendingEmbedding emb;
            emb.id = row.at("id").get<std::string>();
            emb.vec = row.at("vec").get<std::vector<float>>();
            emb.line = lineno;
            if (emb.id.empty()) {
                state.reject(lineno, "embedding row with empty id");
                return;
            }
            state.embeddings.push_back(std::move(emb));
        } else {
            state.reject(lineno, "unknown row kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        state.reject(lineno, std::string("schema error: ") + e.what());
    }
}

// RFC-4180 style field splitting (quotes, doubled quotes); single-line rows.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::optional<double> parse_double_field(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
}

void ingest_csv_line(IngestState& state, const std::vector<std::string>& header,
                     const std::string& line, std::size_t lineno) {
    const auto fields = split_csv(line);
    auto get = [&](const char* name) -> std::string {
        for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) {
            if (header[i] == name) return fields[i];
        }
        return {};
    };
    try {
        const std::string kind = get("kind");
        if (kind == "paper") {
            PaperRecord rec;
            rec.id = get("id");
            const auto t = parse_double_field(get("t"));
            if (!t) {
                state.reject(lineno, "paper row missing 't'");
                return;
            }
            rec.timestamp = *t;
            rec.discipline = get("disc");
            const std::string cites = get("cites");
            if (!cites.empty()) rec.citation_count = std::stoll(cites);
            rec.title = get("title");
            state.add_paper(std::move(rec), lineno);
        } else if (kind == "edge") {
            PendingEdge edge;
            edge.citer = get("citer");
            edge.cited = get("cited");
            edge.time = parse_double_field(get("t"));
            edge.line = lineno;
            state.add_edge(std::move(edge));
        } else {
            state.reject(lineno, "unknown row kind '" + kind + "'");
        }
    } catch (const std::exception& e) {
        state.reject(lineno, std::string("csv field error: ") + e.what());
    }
}

}  // namespace

NodeId Corpus::require(const std::string& id) const {
    const auto it = index.find(id);
    if (it == index.end()) throw Error("unknown paper id '" + id + "'");
    return it->second;
}

std::optional<NodeId> Corpus::find(const std::string& id) const {
    const auto it = index.find(id);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

Corpus ingest_corpus(std::istream& in, CorpusFormat format, const IngestOptions& opts) {
    IngestState state;
    state.opts = opts;
    state.max_year = static_cast<double>(wall_clock_year() + 1);

    std::string line;
    std::size_t lineno = 0;
    bool header_read = false;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (format == CorpusFormat::kCsv && !header_read) {
            header = split_csv(line);
            header_read = true;
            continue;
        }
        state.corpus.report.rows_in++;
        if (format == CorpusFormat::kJsonl) {
            ingest_jsonl_line(state, line, lineno);
        } else {
            ingest_csv_line(state, header, line, lineno);
        }
    }
    state.finish();
    return std::move(state.corpus);
}

Corpus ingest_corpus_file(const std::string& path, CorpusFormat format,
                          const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file '" + path + "'");
    return ingest_corpus(in, format, opts);
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const PaperRecord& p : corpus.papers) {
        json row{{"kind", "paper"}, {"id", p.id}, {"t", p.timestamp}};
        if (!p.discipline.empty()) row["disc"] = p.discipline;
        if (p.citation_count) row["cites"] = *p.citation_count;
        if (!p.title.empty()) row["title"] = p.title;
        out << row.dump() << '\n';
    }
    for (const EdgeRef& e : corpus.edges) {
        json row{{"kind", "edge"},
                 {"citer", corpus.papers[e.citer].id},
                 {"cited", corpus.papers[e.cited].id},
                 {"t", e.effective_time}};
        out << row.dump() << '\n';
    }
    if (corpus.embeddings) {
        std::vector<std::string> ids;
        ids.reserve(corpus.embeddings->size());
        for (const auto& [id, _] : corpus.embeddings->rows()) ids.push_back(id);
        std::sort(ids.begin(), ids.end());
        for (const std::string& id : ids) {
            json row{{"kind", "embedding"}, {"id", id}, {"vec", *corpus.embeddings->find(id)}};
            out << row.dump() << '\n';
        }
    }
}

}  // namespace topicxray
