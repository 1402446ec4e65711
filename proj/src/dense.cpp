#include "hydra/dense.hpp"

#include <cmath>
#include <stdexcept>

#include "hydra/jsonl.hpp"

namespace hydra {

namespace {

double norm(const std::vector<double>& v, const kernels::KernelTable& kernels) {
    return std::sqrt(kernels.dot(v.data(), v.data(), v.size()));
}

}  // namespace

double cosine_similarity(const std::vector<double>& q, const std::vector<double>& d,
                         const kernels::KernelTable& kernels) {
    if (q.size() != d.size())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(q.size()) + " vs " + std::to_string(d.size()));
    const double nq = norm(q, kernels);
    const double nd = norm(d, kernels);
    if (nq == 0.0 || nd == 0.0) throw std::invalid_argument("zero vector has no direction");
    return kernels.dot(q.data(), d.data(), q.size()) / (nq * nd);
}

std::vector<RankedHit> cosine_rank(const EmbeddingTable& vectors, const std::vector<double>& query, std::size_t k,
                                   const kernels::KernelTable& kernels) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    const double nq = norm(query, kernels);
    if (nq == 0.0) throw std::invalid_argument("zero query vector");
    std::vector<RankedHit> hits;
    hits.reserve(vectors.size());
    for (const auto& [id, v] : vectors) {
        if (v.size() != query.size()) throw std::invalid_argument("dimension mismatch for document " + id);
        const double nd = norm(v, kernels);
        if (nd == 0.0) throw std::invalid_argument("zero vector for document " + id);
        hits.push_back({id, kernels.dot(query.data(), v.data(), v.size()) / (nq * nd), 0});
    }
    return rank_hits(std::move(hits), k);
}

EmbeddingTable read_embeddings(const std::string& path) {
    EmbeddingTable table;
    for (const auto& rec : read_jsonl(path)) {
        auto id = rec.at("doc_id").get<std::string>();
        if (!table.emplace(id, rec.at("vector").get<std::vector<double>>()).second)
            throw std::runtime_error(path + ": duplicate doc_id " + id);
    }
    return table;
}

}  // namespace hydra
