// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA variants. This file is compiled with -mavx2 -mfma and must only be
// entered after the dispatcher has confirmed CPU support. Keep it free of
// heavyweight headers so no inline template code built for AVX2 can leak into
// the scalar path through COMDAT folding.

#include "wpt/simd/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace wpt::simd::avx2 {

namespace {

inline double horizontal_sum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Re-anchor the rotation recurrence with exact sin/cos every this many
// vectors so rounding drift stays at a few ulp.
constexpr std::size_t kAnchorVectors = 64;

}  // namespace

void affine_rows(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 const double* offset, double* out)
{
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = matrix + r * cols;
        __m256d acc = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
        double tail = 0.0;
        for (; c < cols; ++c) tail += row[c] * x[c];
        out[r] = offset[r] + (horizontal_sum(acc) + tail);
    }
}

void weighted_row_sum(const double* matrix, std::size_t rows, std::size_t cols,
                      const double* weights, double* out)
{
    for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = matrix + r * cols;
        const __m256d w = _mm256_set1_pd(weights[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            const __m256d o = _mm256_loadu_pd(out + c);
            _mm256_storeu_pd(out + c, _mm256_fmadd_pd(w, _mm256_loadu_pd(row + c), o));
        }
        for (; c < cols; ++c) out[c] += weights[r] * row[c];
    }
}

void accumulate_cosine(double* out, std::size_t count, double amplitude, double phase,
                       double step)
{
    const double rot_c = std::cos(4.0 * step);
    const double rot_s = std::sin(4.0 * step);
    const __m256d vc = _mm256_set1_pd(rot_c);
    const __m256d vs = _mm256_set1_pd(rot_s);
    const __m256d va = _mm256_set1_pd(amplitude);

    std::size_t k = 0;
    while (k + 4 <= count) {
        alignas(32) double re0[4];
        alignas(32) double im0[4];
        for (int lane = 0; lane < 4; ++lane) {
            const double arg = phase + static_cast<double>(k + lane) * step;
            re0[lane] = std::cos(arg);
            im0[lane] = std::sin(arg);
        }
        __m256d re = _mm256_load_pd(re0);
        __m256d im = _mm256_load_pd(im0);
        for (std::size_t v = 0; v < kAnchorVectors && k + 4 <= count; ++v, k += 4) {
            const __m256d o = _mm256_loadu_pd(out + k);
            _mm256_storeu_pd(out + k, _mm256_fmadd_pd(va, re, o));
            const __m256d next_re = _mm256_fmsub_pd(re, vc, _mm256_mul_pd(im, vs));
            const __m256d next_im = _mm256_fmadd_pd(re, vs, _mm256_mul_pd(im, vc));
            re = next_re;
            im = next_im;
        }
    }
    for (; k < count; ++k)
        out[k] += amplitude * std::cos(phase + static_cast<double>(k) * step);
}

std::array<double, 3> even_power_sums(const double* y, std::size_t count)
{
    __m256d a2 = _mm256_setzero_pd();
    __m256d a4 = _mm256_setzero_pd();
    __m256d a6 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        const __m256d v = _mm256_loadu_pd(y + k);
        const __m256d v2 = _mm256_mul_pd(v, v);
        const __m256d v4 = _mm256_mul_pd(v2, v2);
        a2 = _mm256_add_pd(a2, v2);
        a4 = _mm256_add_pd(a4, v4);
        a6 = _mm256_fmadd_pd(v4, v2, a6);
    }
    double s2 = horizontal_sum(a2), s4 = horizontal_sum(a4), s6 = horizontal_sum(a6);
    for (; k < count; ++k) {
        const double y2 = y[k] * y[k];
        s2 += y2;
        s4 += y2 * y2;
        s6 += y2 * y2 * y2;
    }
    return {s2, s4, s6};
}

}  // namespace wpt::simd::avx2
