#include "topicxray/kernels.hpp"

namespace topicxray::kernels {

namespace {

float dot_f32_scalar(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

std::size_t intersect_scalar(const std::uint32_t* a, std::size_t na,
                             const std::uint32_t* b, std::size_t nb) {
    std::size_t i = 0, j = 0, count = 0;
    while (i < na && j < nb) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{dot_f32_scalar, intersect_scalar, "scalar"};
    return ops;
}

}  // namespace topicxray::kernels
