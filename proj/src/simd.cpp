#include "genlab/simd.hpp"

#include <cmath>
#include <stdexcept>

#include "simd_kernels.hpp"

namespace genlab::simd {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace scalar

namespace detail {
#ifndef GENLAB_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef GENLAB_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

const detail::KernelTable kScalarTable{scalar::dot, scalar::sum, scalar::axpy,
                                       scalar::max_abs_diff};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const detail::KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return &kScalarTable;
        case Backend::avx2: return cpu_has_avx2() ? detail::avx2_table() : nullptr;
        case Backend::neon: return detail::neon_table();
    }
    return nullptr;
}

struct Dispatch {
    Backend backend = Backend::scalar;
    const detail::KernelTable* table = &kScalarTable;
    Dispatch() {
        for (Backend b : {Backend::avx2, Backend::neon}) {
            if (const auto* t = table_for(b)) {
                backend = b;
                table = t;
                break;
            }
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_available(Backend b) { return table_for(b) != nullptr; }

void set_backend(Backend b) {
    const auto* t = table_for(b);
    if (!t) throw std::invalid_argument("simd backend not available: " + backend_name(b));
    dispatch().backend = b;
    dispatch().table = t;
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

double dot(const double* a, const double* b, std::size_t n) { return dispatch().table->dot(a, b, n); }
double sum(const double* a, std::size_t n) { return dispatch().table->sum(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch().table->axpy(alpha, x, y, n);
}
double max_abs_diff(const double* a, const double* b, std::size_t n) {
    return dispatch().table->max_abs_diff(a, b, n);
}

}  // namespace genlab::simd
