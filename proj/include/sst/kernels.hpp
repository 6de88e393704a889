#pragma once

#include <cstddef>
#include <cstdint>

namespace sst::kernels {

enum class Backend {
    kAuto,    // pick the widest backend the CPU supports
    kScalar,  // portable reference kernels
    kAvx2,    // AVX2 + FMA variants
};

/// Table of the arithmetic inner-loop kernels used by the distance and
/// aggregation hot paths. All entries are interchangeable with the scalar
/// reference implementations to 1e-12 relative (vector lane reduction changes
/// rounding, nothing else).
struct Dispatch {
    /// Sum of squared differences over n entries.
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    /// y[i] += a * x[i] for i in [0, n)
    void (*axpy)(double* y, const double* x, double a, std::size_t n);
    /// out[i] = (r - rows[i])^2 + (c - cols[i])^2
    void (*coord_squared_distances)(double r, double c, const double* rows, const double* cols,
                                    double* out, std::size_t n);
    /// Writes the indices i with values[i] <= threshold in ascending order;
    /// returns how many were written. `out` must hold n entries.
    std::size_t (*indices_at_most)(const double* values, std::size_t n, double threshold,
                                   std::int32_t* out);
};

/// Active kernel table. Resolved once on first use: AVX2+FMA when compiled in
/// and supported by the CPU, scalar otherwise. The SST_KERNELS environment
/// variable ("scalar" or "avx2") overrides the automatic pick. select() is not
/// thread-safe; call it before spawning workers.
const Dispatch& active();
void select(Backend backend);
Backend active_backend();
const char* backend_name();

bool avx2_compiled();
bool avx2_supported();

// Reference implementations, always available. Equivalence tests compare the
// selected backend against these.
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double* y, const double* x, double a, std::size_t n);
void coord_squared_distances_scalar(double r, double c, const double* rows, const double* cols,
                                    double* out, std::size_t n);
std::size_t indices_at_most_scalar(const double* values, std::size_t n, double threshold,
                                   std::int32_t* out);

}  // namespace sst::kernels
