#include "topicxray/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "topicxray/kernels.hpp"

namespace topicxray {

double BoundSimilarity::reduction(NodeId v) const {
    const std::size_t n = topic_.node_count();
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (reduction_cache_.empty()) reduction_cache_.assign(n, -1.0);
        if (reduction_cache_[v] >= 0.0) return reduction_cache_[v];
    }
    double value = 1.0;
    if (n > 1) {
        double sum = 0.0;
        for (NodeId w = 0; w < n; ++w) {
            if (w != v) sum += diff(v, w);
        }
        value = 1.0 - sum / static_cast<double>(n - 1);
    }
    std::lock_guard<std::mutex> lock(cache_mutex_);
    reduction_cache_[v] = value;
    return value;
}

namespace {

class BoundJaccard final : public BoundSimilarity {
public:
    BoundJaccard(const TopicNetwork& topic, const kernels::Ops& ops)
        : BoundSimilarity(topic), ops_(ops) {}

    double diff(NodeId u, NodeId v) const override {
        if (u == v) return 0.0;
        const auto& nu = topic_.undirected[u];
        const auto& nv = topic_.undirected[v];
        if (nu.empty() && nv.empty()) return 0.0;  // Jaccard(empty, empty) = 1
        const std::size_t inter = ops_.intersect_sorted_u32(nu.data(), nu.size(), nv.data(), nv.size());
        const std::size_t uni = nu.size() + nv.size() - inter;
        return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
    }

private:
    const kernels::Ops& ops_;
};

class BoundEmbedding final : public BoundSimilarity {
public:
    BoundEmbedding(const TopicNetwork& topic, const EmbeddingTable& table, const kernels::Ops& ops)
        : BoundSimilarity(topic), ops_(ops), dim_(table.dimension()) {
        matrix_.resize(topic.node_count() * dim_);
        for (NodeId i = 0; i < topic.node_count(); ++i) {
            const std::vector<float>* row = table.find(topic.ids[i]);
            if (!row) throw Error("no embedding for paper '" + topic.ids[i] + "'");
            std::copy(row->begin(), row->end(), matrix_.begin() + i * dim_);
        }
    }

    double diff(NodeId u, NodeId v) const override {
        if (u == v) return 0.0;
        const float cosine =
            ops_.dot_f32(matrix_.data() + u * dim_, matrix_.data() + v * dim_, dim_);
        return std::clamp((1.0 - static_cast<double>(cosine)) / 2.0, 0.0, 1.0);
    }

private:
    const kernels::Ops& ops_;
    std::size_t dim_;
    std::vector<float> matrix_;
};

}  // namespace

std::unique_ptr<BoundSimilarity> JaccardProvider::bind(const TopicNetwork& topic) const {
    return std::make_unique<BoundJaccard>(topic, kernels::active());
}

EmbeddingProvider::EmbeddingProvider(std::shared_ptr<const EmbeddingTable> table, std::string label)
    : table_(std::move(table)), label_(std::move(label)) {
    if (!table_) throw Error("embedding provider requires a table");
}

std::unique_ptr<BoundSimilarity> EmbeddingProvider::bind(const TopicNetwork& topic) const {
    return std::make_unique<BoundEmbedding>(topic, *table_, kernels::active());
}

std::string EmbeddingProvider::describe() const {
    return label_.empty() ? "embeddings" : "embeddings:" + label_;
}

double diff_idx(const std::string& u, const std::string& v, const TopicNetwork& topic,
                const SimilarityProvider& provider) {
    const NodeId ui = topic.require(u);
    const NodeId vi = topic.require(v);
    return provider.bind(topic)->diff(ui, vi);
}

double reduction_idx(const std::string& v, const TopicNetwork& topic,
                     const SimilarityProvider& provider) {
    const NodeId vi = topic.require(v);
    return provider.bind(topic)->reduction(vi);
}

}  // namespace topicxray
