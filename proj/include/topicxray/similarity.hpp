#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "topicxray/embedding.hpp"
#include "topicxray/topic.hpp"

namespace topicxray {

// Pairwise article difference scores bound to one topic snapshot.
// diff() is symmetric, deterministic, and lies in [0, 1]
// (0 = indistinguishable, 1 = maximally different).
class BoundSimilarity {
public:
    virtual ~BoundSimilarity() = default;
    virtual double diff(NodeId u, NodeId v) const = 0;

    // 1 - mean diff against every other node; 1 for a single-node topic.
    // Memoized under a lock so views can be queried from many threads.
    double reduction(NodeId v) const;

protected:
    explicit BoundSimilarity(const TopicNetwork& topic) : topic_(topic) {}
    const TopicNetwork& topic_;

private:
    mutable std::mutex cache_mutex_;
    mutable std::vector<double> reduction_cache_;
};

// Factory for per-snapshot score views. Providers are immutable after
// construction; queries may be issued from many threads.
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    virtual std::unique_ptr<BoundSimilarity> bind(const TopicNetwork& topic) const = 0;
    virtual std::string describe() const = 0;
};

// Structural default: diff = 1 - Jaccard(N(u), N(v)) over undirected
// neighbor sets within the topic. Jaccard(empty, empty) = 1 for u != v.
class JaccardProvider final : public SimilarityProvider {
public:
    std::unique_ptr<BoundSimilarity> bind(const TopicNetwork& topic) const override;
    std::string describe() const override { return "jaccard"; }
};

// External path: diff = (1 - cosine(e_u, e_v)) / 2, clamped to [0, 1].
// Missing embeddings are an error naming the id.
class EmbeddingProvider final : public SimilarityProvider {
public:
    explicit EmbeddingProvider(std::shared_ptr<const EmbeddingTable> table, std::string label = "");
    std::unique_ptr<BoundSimilarity> bind(const TopicNetwork& topic) const override;
    std::string describe() const override;

private:
    std::shared_ptr<const EmbeddingTable> table_;
    std::string label_;
};

// Spec-level entry points (u, v addressed by paper id).
double diff_idx(const std::string& u, const std::string& v, const TopicNetwork& topic,
                const SimilarityProvider& provider);
double reduction_idx(const std::string& v, const TopicNetwork& topic,
                     const SimilarityProvider& provider);

}  // namespace topicxray
