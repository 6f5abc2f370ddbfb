#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace topicxray::kernels {

// Data-parallel primitives behind the similarity scoring hot loops.
// Each op has a scalar reference implementation and an AVX2 variant;
// the active table is picked at runtime (cpuid) and can be forced for
// reproducibility or testing. Integer results are identical across
// variants; float dot products may differ in the last bits due to
// reordered accumulation, so callers fixing a variant get bit-stable
// outputs.
struct Ops {
    // Dot product of two float vectors of length n.
    float (*dot_f32)(const float* a, const float* b, std::size_t n);
    // Size of the intersection of two strictly increasing uint32 arrays.
    std::size_t (*intersect_sorted_u32)(const std::uint32_t* a, std::size_t na,
                                        const std::uint32_t* b, std::size_t nb);
    const char* name;
};

enum class Isa { kAuto, kScalar, kAvx2 };

bool cpu_has_avx2();

const Ops& scalar_ops();
const Ops& avx2_ops();  // valid to call only when cpu_has_avx2()

// Active table: AVX2 when available unless overridden via force().
const Ops& active();

// Override the dispatch (kAuto restores runtime detection).
// Throws if an unavailable ISA is requested.
void force(Isa isa);

Isa parse_isa(const std::string& name);  // "auto" | "scalar" | "avx2"

}  // namespace topicxray::kernels
