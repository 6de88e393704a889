#pragma once

#include <cstddef>
#include <cstdint>

// AVX2 variants live in kernels_avx2.cpp, compiled with -mavx2 -mfma only.
// Call them only after a runtime cpuid check.
namespace sst::kernels {

#if SST_HAVE_AVX2
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double* y, const double* x, double a, std::size_t n);
void coord_squared_distances_avx2(double r, double c, const double* rows, const double* cols,
                                  double* out, std::size_t n);
std::size_t indices_at_most_avx2(const double* values, std::size_t n, double threshold,
                                 std::int32_t* out);
#endif

}  // namespace sst::kernels
