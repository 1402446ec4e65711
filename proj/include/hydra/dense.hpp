#pragma once

#include <map>
#include <string>
#include <vector>

#include "hydra/bm25.hpp"
#include "hydra/kernels.hpp"

namespace hydra {

using EmbeddingTable = std::map<std::string, std::vector<double>>;

/// q . d / (|q| |d|). Throws std::invalid_argument on dimension mismatch or a zero vector.
double cosine_similarity(const std::vector<double>& q, const std::vector<double>& d,
                         const kernels::KernelTable& kernels = kernels::active_kernels());

/// Every document ranked by cosine similarity, top k, ties by ascending id.
std::vector<RankedHit> cosine_rank(const EmbeddingTable& vectors, const std::vector<double>& query, std::size_t k,
                                   const kernels::KernelTable& kernels = kernels::active_kernels());

/// JSON-Lines {doc_id, vector}.
EmbeddingTable read_embeddings(const std::string& path);

}  // namespace hydra
