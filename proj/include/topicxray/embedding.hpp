#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicxray/types.hpp"

namespace topicxray {

// Unit-normalized per-paper vectors, all of one dimension.
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    // Inserts a vector, normalizing it to unit L2 norm.
    // Rejects (returns false) non-finite values, zero vectors, rows whose
    // dimension disagrees with the table, and duplicate ids.
    bool insert(const std::string& id, std::vector<float> values);

    const std::vector<float>* find(const std::string& id) const;
    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    const std::unordered_map<std::string, std::vector<float>>& rows() const { return rows_; }

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<float>> rows_;
};

struct EmbeddingLoadReport {
    std::size_t rows_in = 0;
    std::size_t rows_kept = 0;
    std::vector<RowError> row_errors;
};

// File format: one line per paper, `id<TAB>f1 f2 ... fd`, ASCII floats.
// Bad rows are rejected and reported; the load continues.
EmbeddingTable load_embeddings(const std::string& path, EmbeddingLoadReport* report = nullptr);
EmbeddingTable load_embeddings(std::istream& in, EmbeddingLoadReport* report = nullptr);

void save_embeddings(const EmbeddingTable& table, std::ostream& out);

}  // namespace topicxray
