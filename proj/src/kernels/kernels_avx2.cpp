// AVX2 variants of the similarity kernels. Compiled with -mavx2 -mfma;
// only reached through the runtime dispatch in kernels_dispatch.cpp.

#include "topicxray/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace topicxray::kernels {

namespace {

float dot_f32_avx2(const float* a, const float* b, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    }
    acc0 = _mm256_add_ps(acc0, acc1);
    __m128 lo = _mm256_castps256_ps128(acc0);
    __m128 hi = _mm256_extractf128_ps(acc0, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_hadd_ps(lo, lo);
    lo = _mm_hadd_ps(lo, lo);
    float acc = _mm_cvtss_f32(lo);
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

// Block intersection of strictly increasing arrays: compare an 8-lane block
// of a against all rotations of an 8-lane block of b, then advance the block
// whose max is smaller. Uniqueness guarantees each a-lane matches at most once.
std::size_t intersect_avx2(const std::uint32_t* a, std::size_t na,
                           const std::uint32_t* b, std::size_t nb) {
    static const __m256i kRot[7] = {
        _mm256_set_epi32(0, 7, 6, 5, 4, 3, 2, 1), _mm256_set_epi32(1, 0, 7, 6, 5, 4, 3, 2),
        _mm256_set_epi32(2, 1, 0, 7, 6, 5, 4, 3), _mm256_set_epi32(3, 2, 1, 0, 7, 6, 5, 4),
        _mm256_set_epi32(4, 3, 2, 1, 0, 7, 6, 5), _mm256_set_epi32(5, 4, 3, 2, 1, 0, 7, 6),
        _mm256_set_epi32(6, 5, 4, 3, 2, 1, 0, 7)};
    std::size_t i = 0, j = 0, count = 0;
    while (i + 8 <= na && j + 8 <= nb) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + j));
        __m256i match = _mm256_cmpeq_epi32(va, vb);
        for (const __m256i& rot : kRot) {
            match = _mm256_or_si256(match, _mm256_cmpeq_epi32(va, _mm256_permutevar8x32_epi32(vb, rot)));
        }
        count += static_cast<std::size_t>(
            _mm_popcnt_u32(static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(match)))));
        const std::uint32_t amax = a[i + 7], bmax = b[j + 7];
        if (amax <= bmax) i += 8;
        if (bmax <= amax) j += 8;
    }
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

const Ops& avx2_ops() {
    static const Ops ops{dot_f32_avx2, intersect_avx2, "avx2"};
    return ops;
}

}  // namespace topicxray::kernels

#else

namespace topicxray::kernels {

// Non-x86 build: the dispatcher never selects this table.
const Ops& avx2_ops() { return scalar_ops(); }

}  // namespace topicxray::kernels

#endif
