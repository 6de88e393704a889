// AVX2 + FMA kernel variants. This translation unit is the only one built
// with -mavx2 -mfma; callers must gate on avx2_supported().

#if SST_HAVE_AVX2

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

namespace sst::kernels {

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc0);
    double acc = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy_avx2(double* y, const double* x, double a, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4),
                                                    _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

// No FMA here: the per-lane arithmetic must round exactly like the scalar
// reference (mul, mul, add), so both backends produce bit-identical spatial
// terms and mask selections.
void coord_squared_distances_avx2(double r, double c, const double* rows, const double* cols,
                                  double* out, std::size_t n) {
    const __m256d rv = _mm256_set1_pd(r);
    const __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dr = _mm256_sub_pd(rv, _mm256_loadu_pd(rows + i));
        const __m256d dc = _mm256_sub_pd(cv, _mm256_loadu_pd(cols + i));
        _mm256_storeu_pd(out + i,
                         _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(dc, dc)));
    }
    for (; i < n; ++i) {
        const double dr = r - rows[i];
        const double dc = c - cols[i];
        out[i] = dr * dr + dc * dc;
    }
}

std::size_t indices_at_most_avx2(const double* values, std::size_t n, double threshold,
                                 std::int32_t* out) {
    const __m256d tv = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(values + i);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, tv, _CMP_LE_OQ));
        if (mask == 0) continue;  // common case: the whole chunk is above
        for (int lane = 0; lane < 4; ++lane)
            if (mask & (1 << lane)) out[count++] = static_cast<std::int32_t>(i + lane);
    }
    for (; i < n; ++i)
        if (values[i] <= threshold) out[count++] = static_cast<std::int32_t>(i);
    return count;
}

}  // namespace sst::kernels

#endif  // SST_HAVE_AVX2
