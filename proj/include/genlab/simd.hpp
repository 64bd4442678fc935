#pragma once

#include <cstddef>
#include <string>

// Dense vector kernels used by the grid quadrature and particle loops.
// Each kernel has a scalar reference version; a vectorized version is
// chosen at runtime when the CPU supports it.
namespace genlab::simd {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
bool backend_available(Backend b);
// Forces a backend (tests use this to compare implementations).
// Throws std::invalid_argument if the backend is not available.
void set_backend(Backend b);
std::string backend_name(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

}  // namespace genlab::simd
