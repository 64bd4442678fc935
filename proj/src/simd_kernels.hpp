#pragma once

#include <cstddef>

namespace genlab::simd::detail {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
};

const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();

}  // namespace genlab::simd::detail
