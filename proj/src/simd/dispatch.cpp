// SPDX-License-Identifier: Apache-2.0

#include "wpt/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace wpt::simd {

namespace {

constexpr KernelTable kScalarTable{
    &scalar::affine_rows,
    &scalar::weighted_row_sum,
    &scalar::accumulate_cosine,
    &scalar::even_power_sums,
};

#if defined(WPT_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table{
    &avx2::affine_rows,
    &avx2::weighted_row_sum,
    &avx2::accumulate_cosine,
    &avx2::even_power_sums,
};
#endif

bool forced_scalar()
{
    const char* env = std::getenv("WPT_FORCE_SCALAR");
    return env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0';
}

}  // namespace

std::string_view isa_name(Isa isa)
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa detected_isa()
{
#if defined(WPT_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    static const bool has_avx2 = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (has_avx2) return Isa::avx2;
#endif
    return Isa::scalar;
}

Isa active_isa()
{
    static const Isa isa = forced_scalar() ? Isa::scalar : detected_isa();
    return isa;
}

const KernelTable& kernels_for(Isa isa)
{
#if defined(WPT_HAVE_AVX2_TU)
    if (isa == Isa::avx2) return kAvx2Table;
#endif
    (void)isa;
    return kScalarTable;
}

const KernelTable& kernels()
{
    static const KernelTable& table = kernels_for(active_isa());
    return table;
}

}  // namespace wpt::simd
