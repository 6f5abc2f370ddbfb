#include "topicxray/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace topicxray::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
std::atomic<Isa> g_forced{Isa::kAuto};
}

const Ops& active() {
    switch (g_forced.load(std::memory_order_relaxed)) {
        case Isa::kScalar:
            return scalar_ops();
        case Isa::kAvx2:
            return avx2_ops();
        case Isa::kAuto:
            break;
    }
    return cpu_has_avx2() ? avx2_ops() : scalar_ops();
}

void force(Isa isa) {
    if (isa == Isa::kAvx2 && !cpu_has_avx2()) {
        throw std::runtime_error("kernel isa 'avx2' not supported on this cpu");
    }
    g_forced.store(isa, std::memory_order_relaxed);
}

Isa parse_isa(const std::string& name) {
    if (name == "auto") return Isa::kAuto;
    if (name == "scalar") return Isa::kScalar;
    if (name == "avx2") return Isa::kAvx2;
    throw std::runtime_error("unknown kernel isa '" + name + "' (expected auto|scalar|avx2)");
}

}  // namespace topicxray::kernels
