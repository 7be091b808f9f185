// SPDX-License-Identifier: Apache-2.0

#include "wpt/simd/kernels.hpp"

#include <cmath>

namespace wpt::simd::scalar {

void affine_rows(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 const double* offset, double* out)
{
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = matrix + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        out[r] = offset[r] + acc;
    }
}

void weighted_row_sum(const double* matrix, std::size_t rows, std::size_t cols,
                      const double* weights, double* out)
{
    for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = matrix + r * cols;
        const double w = weights[r];
        for (std::size_t c = 0; c < cols; ++c) out[c] += w * row[c];
    }
}

void accumulate_cosine(double* out, std::size_t count, double amplitude, double phase,
                       double step)
{
    for (std::size_t k = 0; k < count; ++k)
        out[k] += amplitude * std::cos(phase + static_cast<double>(k) * step);
}

std::array<double, 3> even_power_sums(const double* y, std::size_t count)
{
    double s2 = 0.0, s4 = 0.0, s6 = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double y2 = y[k] * y[k];
        s2 += y2;
        s4 += y2 * y2;
        s6 += y2 * y2 * y2;
    }
    return {s2, s4, s6};
}

}  // namespace wpt::simd::scalar
