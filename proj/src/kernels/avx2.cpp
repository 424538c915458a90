// Compiled with -mavx2 -mfma; only reached through the dispatch table after a
// CPUID check.

#include <immintrin.h>

#include "mnoma/kernels.hpp"

namespace mnoma::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 16 <= n; k += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 8), _mm256_loadu_pd(b + k + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 12), _mm256_loadu_pd(b + k + 12), acc3);
    }
    for (; k + 4 <= n; k += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    }
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

void gemv_accumulate_avx2(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                          const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_avx2(a + r * ld, x, cols);
}

void accumulate_abs2_avx2(const std::complex<double>* z, std::size_t n, double scale,
                          double* out) {
    const double* zd = reinterpret_cast<const double*>(z);
    const __m256d vscale = _mm256_set1_pd(scale);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d z01 = _mm256_loadu_pd(zd + 2 * k);
        const __m256d z23 = _mm256_loadu_pd(zd + 2 * k + 4);
        // hadd -> [|z0|^2, |z2|^2, |z1|^2, |z3|^2]
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(z01, z01), _mm256_mul_pd(z23, z23));
        const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
        _mm256_storeu_pd(out + k, _mm256_fmadd_pd(vscale, ordered, _mm256_loadu_pd(out + k)));
    }
    for (; k < n; ++k) {
        const double re = z[k].real();
        const double im = z[k].imag();
        out[k] += scale * (re * re + im * im);
    }
}

void multiply_avx2(const double* a, const double* b, std::size_t n, double* out) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    }
    for (; k < n; ++k) out[k] = a[k] * b[k];
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable t{Isa::kAvx2, dot_avx2, gemv_accumulate_avx2, accumulate_abs2_avx2,
                               multiply_avx2};
    return &t;
}

}  // namespace mnoma::kernels::detail
