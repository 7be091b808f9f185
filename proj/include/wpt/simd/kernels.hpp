// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops shared by the rectenna model, the GP solver and
// the circuit simulator. Every kernel has a scalar reference implementation
// and, on x86-64, an AVX2/FMA variant selected once at runtime.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace wpt::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by both the build and the running CPU.
Isa detected_isa();

/// ISA used by kernels(). Defaults to detected_isa(); the environment
/// variable WPT_FORCE_SCALAR=1 pins it to the scalar path.
Isa active_isa();

struct KernelTable {
    // out[r] = offset[r] + sum_c matrix[r * cols + c] * x[c]   (row-major)
    void (*affine_rows)(const double* matrix, std::size_t rows, std::size_t cols,
                        const double* x, const double* offset, double* out);

    // out[c] = sum_r weights[r] * matrix[r * cols + c]
    void (*weighted_row_sum)(const double* matrix, std::size_t rows, std::size_t cols,
                             const double* weights, double* out);

    // out[k] += amplitude * cos(phase + k * step),  k = 0 .. count-1
    void (*accumulate_cosine)(double* out, std::size_t count, double amplitude,
                              double phase, double step);

    // {sum y^2, sum y^4, sum y^6}
    std::array<double, 3> (*even_power_sums)(const double* y, std::size_t count);
};

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

namespace scalar {
void affine_rows(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 const double* offset, double* out);
void weighted_row_sum(const double* matrix, std::size_t rows, std::size_t cols,
                      const double* weights, double* out);
void accumulate_cosine(double* out, std::size_t count, double amplitude, double phase,
                       double step);
std::array<double, 3> even_power_sums(const double* y, std::size_t count);
}  // namespace scalar

namespace avx2 {
void affine_rows(const double* matrix, std::size_t rows, std::size_t cols, const double* x,
                 const double* offset, double* out);
void weighted_row_sum(const double* matrix, std::size_t rows, std::size_t cols,
                      const double* weights, double* out);
void accumulate_cosine(double* out, std::size_t count, double amplitude, double phase,
                       double step);
std::array<double, 3> even_power_sums(const double* y, std::size_t count);
}  // namespace avx2

// Span conveniences over the active table.
inline void accumulate_cosine(std::span<double> out, double amplitude, double phase, double step)
{
    kernels().accumulate_cosine(out.data(), out.size(), amplitude, phase, step);
}

inline std::array<double, 3> even_power_sums(std::span<const double> y)
{
    return kernels().even_power_sums(y.data(), y.size());
}

}  // namespace wpt::simd
