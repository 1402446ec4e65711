#include "hydra/kernels.hpp"

namespace hydra::kernels {

namespace {

void bm25_norms_scalar(const double* doc_len, std::size_t n, double k1, double b, double avgdl, double* out) {
    const double one_minus_b = 1.0 - b;
    for (std::size_t i = 0; i < n; ++i) out[i] = k1 * (one_minus_b + b * (doc_len[i] / avgdl));
}

void bm25_accumulate_scalar(const std::uint32_t* docs, const double* tf, std::size_t n, double idf, double k1,
                            const double* norms, double* scores) {
    const double k1p1 = k1 + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t d = docs[i];
        scores[d] = scores[d] + idf * ((tf[i] * k1p1) / (tf[i] + norms[d]));
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = s0 + a[i] * b[i];
        s1 = s1 + a[i + 1] * b[i + 1];
        s2 = s2 + a[i + 2] * b[i + 2];
        s3 = s3 + a[i + 3] * b[i + 3];
    }
    double sum = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) sum = sum + a[i] * b[i];
    return sum;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::Scalar, bm25_norms_scalar, bm25_accumulate_scalar, dot_scalar};
    return table;
}

}  // namespace hydra::kernels
