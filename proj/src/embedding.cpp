#include "topicxray/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace topicxray {

bool EmbeddingTable::insert(const std::string& id, std::vector<float> values) {
    if (values.empty()) return false;
    if (dim_ == 0) dim_ = values.size();
    if (values.size() != dim_) return false;
    double norm2 = 0.0;
    for (const float v : values) {
        if (!std::isfinite(v)) return false;
        norm2 += static_cast<double>(v) * static_cast<double>(v);
    }
    if (norm2 <= 0.0) return false;
    const double inv = 1.0 / std::sqrt(norm2);
    for (float& v : values) v = static_cast<float>(v * inv);
    return rows_.emplace(id, std::move(values)).second;
}

const std::vector<float>* EmbeddingTable::find(const std::string& id) const {
    const auto it = rows_.find(id);
    return it == rows_.end() ? nullptr : &it->second;
}

EmbeddingTable load_embeddings(std::istream& in, EmbeddingLoadReport* report) {
    EmbeddingTable table;
    EmbeddingLoadReport local;
    EmbeddingLoadReport& rpt = report ? *report : local;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        rpt.rows_in++;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            rpt.row_errors.push_back({lineno, "expected `id<TAB>floats`"});
            continue;
        }
        const std::string id = line.substr(0, tab);
        std::istringstream values(line.substr(tab + 1));
        std::vector<float> vec;
        double v = 0.0;
        while (values >> v) vec.push_back(static_cast<float>(v));
        if (!values.eof()) {
            rpt.row_errors.push_back({lineno, "non-numeric value in row for '" + id + "'"});
            continue;
        }
        if (!table.insert(id, std::move(vec))) {
            rpt.row_errors.push_back(
                {lineno, "row for '" + id + "' rejected (dimension, norm, or value check)"});
            continue;
        }
        rpt.rows_kept++;
    }
    return table;
}

EmbeddingTable load_embeddings(const std::string& path, EmbeddingLoadReport* report) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embedding file '" + path + "'");
    return load_embeddings(in, report);
}

void save_embeddings(const EmbeddingTable& table, std::ostream& out) {
    std::vector<std::string> ids;
    ids.reserve(table.size());
    for (const auto& [id, _] : table.rows()) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    char buf[64];
    for (const std::string& id : ids) {
        out << id;
        char sep = '\t';
        for (const float v : *table.find(id)) {
            std::snprintf(buf, sizeof(buf), "%.8g", static_cast<double>(v));
            out << sep << buf;
            sep = ' ';
        }
        out << '\n';
    }
}

}  // namespace topicxray
