#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace hydra::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Hot loops of the ranking code. Every implementation performs the same
/// floating-point operations in the same order, so results are bit-identical.
struct KernelTable {
    Isa isa;
    /// out[i] = k1 * ((1 - b) + b * (doc_len[i] / avgdl))
    void (*bm25_norms)(const double* doc_len, std::size_t n, double k1, double b, double avgdl, double* out);
    /// scores[docs[i]] += idf * ((tf[i] * (k1 + 1)) / (tf[i] + norms[docs[i]])); docs must be distinct.
    void (*bm25_accumulate)(const std::uint32_t* docs, const double* tf, std::size_t n, double idf, double k1,
                            const double* norms, double* scores);
    /// Dot product with four interleaved partial sums, combined as (s0 + s1) + (s2 + s3),
    /// then the tail added in order.
    double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Picked once: the best supported table, or the one named by the
/// HYDRA_SIMD environment variable ("scalar", "avx2"; falls back when unsupported).
const KernelTable& active_kernels();

}  // namespace hydra::kernels
