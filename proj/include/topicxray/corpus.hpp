#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicxray/embedding.hpp"
#include "topicxray/types.hpp"

namespace topicxray {

// Citation edge resolved to dense corpus indices.
struct EdgeRef {
    NodeId citer = 0;
    NodeId cited = 0;
    double effective_time = 0.0;
};

// Immutable after ingest; safe to share across threads.
struct Corpus {
    std::vector<PaperRecord> papers;               // dense index order = first-seen order
    std::unordered_map<std::string, NodeId> index;  // id -> dense index
    std::vector<EdgeRef> edges;                     // deduplicated, self-loop free
    std::vector<std::vector<NodeId>> cites_of;      // forward index: papers this one cites
    std::vector<std::vector<NodeId>> citers_of;     // backward index: papers citing this one
    std::optional<EmbeddingTable> embeddings;       // inline "embedding" rows, when present
    IngestReport report;

    NodeId require(const std::string& id) const;
    std::optional<NodeId> find(const std::string& id) const;
    std::size_t size() const { return papers.size(); }
};

enum class CorpusFormat { kJsonl, kCsv };

// Streams PaperRecord / CitationEdge / embedding rows into an indexed corpus.
// Malformed rows are skipped and reported with their line number; a duplicate
// paper id with conflicting fields is a hard error naming the id.
Corpus ingest_corpus(std::istream& in, CorpusFormat format, const IngestOptions& opts = {});
Corpus ingest_corpus_file(const std::string& path, CorpusFormat format,
                          const IngestOptions& opts = {});

// Canonical JSONL serialization (papers by index order, then edges, then
// embeddings by id). Re-ingesting the output reproduces the corpus.
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

}  // namespace topicxray
