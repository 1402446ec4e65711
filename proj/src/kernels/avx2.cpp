#include <immintrin.h>

#include "hydra/kernels.hpp"

namespace hydra::kernels {

namespace {

void bm25_norms_avx2(const double* doc_len, std::size_t n, double k1, double b, double avgdl, double* out) {
    const __m256d vk1 = _mm256_set1_pd(k1);
    const __m256d vb = _mm256_set1_pd(b);
    const __m256d vavg = _mm256_set1_pd(avgdl);
    const double one_minus_b = 1.0 - b;
    const __m256d vomb = _mm256_set1_pd(one_minus_b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ratio = _mm256_div_pd(_mm256_loadu_pd(doc_len + i), vavg);
        __m256d inner = _mm256_add_pd(vomb, _mm256_mul_pd(vb, ratio));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vk1, inner));
    }
    for (; i < n; ++i) out[i] = k1 * (one_minus_b + b * (doc_len[i] / avgdl));
}

void bm25_accumulate_avx2(const std::uint32_t* docs, const double* tf, std::size_t n, double idf, double k1,
                          const double* norms, double* scores) {
    const double k1p1 = k1 + 1.0;
    const __m256d vk1p1 = _mm256_set1_pd(k1p1);
    const __m256d vidf = _mm256_set1_pd(idf);
    alignas(32) double sums[4];
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(docs + i));
        const __m256d vtf = _mm256_loadu_pd(tf + i);
        const __m256d vnorm = _mm256_i32gather_pd(norms, idx, 8);
        const __m256d gain = _mm256_mul_pd(vidf, _mm256_div_pd(_mm256_mul_pd(vtf, vk1p1), _mm256_add_pd(vtf, vnorm)));
        const __m256d cur = _mm256_i32gather_pd(scores, idx, 8);
        _mm256_store_pd(sums, _mm256_add_pd(cur, gain));
        scores[docs[i]] = sums[0];
        scores[docs[i + 1]] = sums[1];
        scores[docs[i + 2]] = sums[2];
        scores[docs[i + 3]] = sums[3];
    }
    for (; i < n; ++i) {
        const std::uint32_t d = docs[i];
        scores[d] = scores[d] + idf * ((tf[i] * k1p1) / (tf[i] + norms[d]));
    }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) sum = sum + a[i] * b[i];
    return sum;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{Isa::Avx2, bm25_norms_avx2, bm25_accumulate_avx2, dot_avx2};
    return table;
}

}  // namespace hydra::kernels
