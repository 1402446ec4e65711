#include <cstdlib>
#include <string>

#include "hydra/kernels.hpp"

namespace hydra::kernels {

#if defined(HYDRA_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable* avx2_kernels() {
#if defined(HYDRA_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &avx2_kernel_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* env = std::getenv("HYDRA_SIMD");
        std::string want = env ? env : "auto";
        if (want == "scalar") return scalar_kernels();
        if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace hydra::kernels
