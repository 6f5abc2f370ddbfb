#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace topicxray {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

// Hard failures (unknown ids, schema violations, infeasible requests).
// Row-level data problems are collected in reports instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// One publication. Timestamps are fractional years (2009.5 = mid-2009);
// intra-year ordering is preserved when finer-grained data exists.
struct PaperRecord {
    std::string id;
    double timestamp = 0.0;
    std::string discipline;                    // empty = untagged
    std::optional<std::int64_t> citation_count;
    std::string title;
};

// citer cites cited; effective_time defaults to the citer's timestamp.
struct CitationEdge {
    std::string citer;
    std::string cited;
    double effective_time = 0.0;
};

struct RowError {
    std::size_t line = 0;
    std::string message;
};

struct IngestReport {
    std::size_t rows_in = 0;
    std::size_t paper_rows = 0;
    std::size_t edge_rows = 0;
    std::size_t embedding_rows = 0;
    std::size_t papers_kept = 0;
    std::size_t edges_kept = 0;
    std::size_t embeddings_kept = 0;
    std::size_t dropped_malformed = 0;
    std::size_t dropped_duplicate_papers = 0;   // byte-identical re-statements
    std::size_t dropped_self_loops = 0;
    std::size_t dropped_duplicate_edges = 0;
    std::size_t dropped_unknown_endpoint = 0;
    std::size_t dropped_time_slack = 0;
    std::size_t dropped_embeddings = 0;
    std::vector<RowError> row_errors;

    std::size_t rows_kept() const { return papers_kept + edges_kept + embeddings_kept; }
    std::size_t rows_dropped() const {
        return dropped_malformed + dropped_duplicate_papers + dropped_self_loops +
               dropped_duplicate_edges + dropped_unknown_endpoint + dropped_time_slack +
               dropped_embeddings;
    }
};

// Data-sanity gates for ingest.
struct IngestOptions {
    double citation_slack_years = 1.0;  // tolerated citer-before-cited inversion
    double min_year = 1500.0;
    // Papers timestamped after wall-clock year + 1 are rejected.
};

}  // namespace topicxray
