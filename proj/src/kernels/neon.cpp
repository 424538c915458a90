#include <arm_neon.h>

#include "mnoma/kernels.hpp"

namespace mnoma::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

void gemv_accumulate_neon(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                          const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_neon(a + r * ld, x, cols);
}

void accumulate_abs2_neon(const std::complex<double>* z, std::size_t n, double scale,
                          double* out) {
    const double* zd = reinterpret_cast<const double*>(z);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t z0 = vld1q_f64(zd + 2 * k);
        const float64x2_t z1 = vld1q_f64(zd + 2 * k + 2);
        const float64x2_t m = vpaddq_f64(vmulq_f64(z0, z0), vmulq_f64(z1, z1));
        vst1q_f64(out + k, vfmaq_n_f64(vld1q_f64(out + k), m, scale));
    }
    for (; k < n; ++k) {
        const double re = z[k].real();
        const double im = z[k].imag();
        out[k] += scale * (re * re + im * im);
    }
}

void multiply_neon(const double* a, const double* b, std::size_t n, double* out) {
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) vst1q_f64(out + k, vmulq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
    for (; k < n; ++k) out[k] = a[k] * b[k];
}

}  // namespace

const KernelTable* neon_table() {
    static const KernelTable t{Isa::kNeon, dot_neon, gemv_accumulate_neon, accumulate_abs2_neon,
                               multiply_neon};
    return &t;
}

}  // namespace mnoma::kernels::detail
