#include "sst/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace sst::kernels {

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void coord_squared_distances_scalar(double r, double c, const double* rows, const double* cols,
                                    double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = r - rows[i];
        const double dc = c - cols[i];
        out[i] = dr * dr + dc * dc;
    }
}

std::size_t indices_at_most_scalar(const double* values, std::size_t n, double threshold,
                                   std::int32_t* out) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (values[i] <= threshold) out[count++] = static_cast<std::int32_t>(i);
    return count;
}

bool avx2_compiled() {
#if SST_HAVE_AVX2
    return true;
#else
    return false;
#endif
}

bool avx2_supported() {
#if SST_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

struct State {
    Backend backend = Backend::kScalar;
    Dispatch table{&squared_distance_scalar, &axpy_scalar, &coord_squared_distances_scalar,
                   &indices_at_most_scalar};
};

Backend resolve(Backend requested) {
    if (requested == Backend::kAuto) {
        if (const char* env = std::getenv("SST_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
            if (std::strcmp(env, "avx2") == 0) requested = Backend::kAvx2;
        }
        if (requested == Backend::kAuto)
            return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
    }
    if (requested == Backend::kAvx2 && !avx2_supported()) return Backend::kScalar;
    return requested;
}

State make_state(Backend requested) {
    State s;
    s.backend = resolve(requested);
#if SST_HAVE_AVX2
    if (s.backend == Backend::kAvx2)
        s.table = Dispatch{&squared_distance_avx2, &axpy_avx2, &coord_squared_distances_avx2,
                           &indices_at_most_avx2};
#endif
    return s;
}

State& state() {
    static State s = make_state(Backend::kAuto);
    return s;
}

}  // namespace

const Dispatch& active() { return state().table; }

void select(Backend backend) { state() = make_state(backend); }

Backend active_backend() { return state().backend; }

const char* backend_name() {
    switch (state().backend) {
        case Backend::kAvx2: return "avx2";
        case Backend::kScalar: return "scalar";
        default: return "scalar";
    }
}

}  // namespace sst::kernels
