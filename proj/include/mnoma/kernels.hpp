#pragma once

// Data-parallel inner loops shared by the INI table builder, the rate model
// and the power allocators.
//
// Every kernel has a scalar reference implementation. Vector variants
// (AVX2+FMA on x86-64, NEON on AArch64) are selected once at startup from
// the CPU feature bits; MNOMA_FORCE_SCALAR=1 in the environment pins the
// scalar table. Vector variants reassociate sums, so results agree with the
// reference to rounding, not bit-for-bit.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace mnoma::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    // sum_k a[k] * b[k]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[r] += sum_c A[r * ld + c] * x[c]   for r < rows
    void (*gemv_accumulate)(const double* a, std::size_t rows, std::size_t cols,
                            std::size_t ld, const double* x, double* y);
    // out[k] += scale * |z[k]|^2
    void (*accumulate_abs2)(const std::complex<double>* z, std::size_t n, double scale,
                            double* out);
    // out[k] = a[k] * b[k]
    void (*multiply)(const double* a, const double* b, std::size_t n, double* out);
};

bool isa_available(Isa isa);

// Table for a specific ISA. Throws std::invalid_argument when the ISA is not
// compiled in or not supported by this CPU.
const KernelTable& table(Isa isa);

// Table chosen at startup.
const KernelTable& active();

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();  // nullptr when not compiled in
}  // namespace detail

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void accumulate_abs2(std::span<const std::complex<double>> z, double scale,
                            std::span<double> out) {
    active().accumulate_abs2(z.data(), z.size() < out.size() ? z.size() : out.size(), scale,
                             out.data());
}

}  // namespace mnoma::kernels
