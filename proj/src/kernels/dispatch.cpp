#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mnoma/kernels.hpp"

namespace mnoma::kernels {

namespace detail {
#if !defined(MNOMA_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !defined(MNOMA_HAVE_NEON)
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(MNOMA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool force_scalar() {
    const char* env = std::getenv("MNOMA_FORCE_SCALAR");
    return env != nullptr && std::string(env) != "0" && std::string(env) != "";
}

const KernelTable& select() {
    if (!force_scalar()) {
        if (isa_available(Isa::kAvx2)) return *detail::avx2_table();
        if (isa_available(Isa::kNeon)) return *detail::neon_table();
    }
    return detail::scalar_table();
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::kScalar: return "scalar";
        case Isa::kAvx2: return "avx2";
        case Isa::kNeon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::kScalar: return true;
        case Isa::kAvx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
        // AArch64 always carries Advanced SIMD.
        case Isa::kNeon: return detail::neon_table() != nullptr;
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!isa_available(isa)) {
        throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
    }
    switch (isa) {
        case Isa::kAvx2: return *detail::avx2_table();
        case Isa::kNeon: return *detail::neon_table();
        default: return detail::scalar_table();
    }
}

const KernelTable& active() {
    static const KernelTable& t = select();
    return t;
}

}  // namespace mnoma::kernels
