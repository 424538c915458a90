#include "mnoma/kernels.hpp"

namespace mnoma::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

void gemv_accumulate_scalar(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                            const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(a + r * ld, x, cols);
}

void accumulate_abs2_scalar(const std::complex<double>* z, std::size_t n, double scale,
                            double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        const double re = z[k].real();
        const double im = z[k].imag();
        out[k] += scale * (re * re + im * im);
    }
}

void multiply_scalar(const double* a, const double* b, std::size_t n, double* out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * b[k];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{Isa::kScalar, dot_scalar, gemv_accumulate_scalar,
                               accumulate_abs2_scalar, multiply_scalar};
    return t;
}

}  // namespace mnoma::kernels::detail
